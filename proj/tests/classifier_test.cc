#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "oracles.h"
#include "tracenet/centrality.h"
#include "tracenet/classifier.h"

namespace tracenet {
namespace {

std::vector<char> bits(std::initializer_list<int> v) {
  return std::vector<char>(v.begin(), v.end());
}

TEST(F1, Examples) {
  EXPECT_DOUBLE_EQ(f1_score(bits({1, 0, 1}), bits({1, 0, 1})), 1.0);
  EXPECT_DOUBLE_EQ(f1_score(bits({0, 0, 0}), bits({1, 0, 0})), 0.0);
  // TP=2, FP=1, FN=1.
  EXPECT_DOUBLE_EQ(f1_score(bits({1, 1, 1, 0, 0}), bits({1, 1, 0, 1, 0})), 2.0 / 3.0);
  EXPECT_THROW(f1_score(bits({1}), bits({1, 0})), DomainError);
}

TEST(F1, BoundsAndPerfection) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 500; ++t) {
    std::vector<char> p(12), l(12);
    for (int i = 0; i < 12; ++i) {
      p[i] = rng() % 2;
      l[i] = rng() % 3 == 0;
    }
    const BinaryMetrics m = binary_metrics(p, l);
    EXPECT_GE(m.f1, 0.0);
    EXPECT_LE(m.f1, 1.0);
    int fp = 0, fn = 0, tp = 0;
    for (int i = 0; i < 12; ++i) {
      fp += p[i] && !l[i];
      fn += !p[i] && l[i];
      tp += p[i] && l[i];
    }
    EXPECT_EQ(m.f1 == 1.0, fp == 0 && fn == 0 && tp > 0);
  }
}

// Leaves with `per_leaf` candidates each. With `separable`, the true edge has
// normalized_pi 1 and the others 0; otherwise features are noise.
std::vector<EdgeExample> toy(int leaves, int per_leaf, bool separable,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EdgeExample> out;
  for (int l = 0; l < leaves; ++l) {
    const int truth = static_cast<int>(rng() % per_leaf);
    for (int c = 0; c < per_leaf; ++c) {
      EdgeExample e;
      e.leaf = l;
      e.candidate = 1000 + c;
      e.label = c == truth;
      e.features = {separable ? (e.label ? 1.0 : 0.0) : u(rng), u(rng), u(rng),
                    u(rng), u(rng), u(rng)};
      out.push_back(e);
    }
  }
  return out;
}

TrainConfig fast_config() {
  TrainConfig c;
  c.epochs = 150;
  c.rng_seed = 3;
  return c;
}

TEST(Classifier, SeparableToyIsPerfect) {
  const auto ex = toy(200, 4, true, 1);
  for (ModelKind kind : {ModelKind::kLogistic, ModelKind::kPerceptron}) {
    TrainConfig c = fast_config();
    c.kind = kind;
    const TrainingResult r = train(ex, FeatureSchema{}, c);
    EXPECT_DOUBLE_EQ(r.holdout.f1, 1.0) << model_kind_name(kind);
    if (kind == ModelKind::kLogistic) {
      EXPECT_GT(r.model.output_weights()[0], 0.0);
    }
  }
  TrainConfig threshold = fast_config();
  threshold.decision_rule = DecisionRule::kThreshold;
  EXPECT_DOUBLE_EQ(train(ex, FeatureSchema{}, threshold).holdout.f1, 1.0);
}

TEST(Classifier, ScoreIncreasesWithPi) {
  const auto ex = toy(200, 4, true, 2);
  const EdgeClassifier m = train(ex, FeatureSchema{}, fast_config()).model;
  double prev = -1;
  for (double pi = 0.0; pi <= 1.0; pi += 0.1) {
    const std::vector<double> f{pi, 0.5, 0.5, 0.5, 0.5, 0.5};
    const double s = m.score(f);
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(Classifier, ShuffledLabelsStayNearBaseRate) {
  // Four candidates per leaf: picking one at random scores F1 = 0.25.
  const auto ex = toy(1000, 4, false, 4);
  const TrainingResult r = train(ex, FeatureSchema{}, fast_config());
  EXPECT_LT(r.holdout.f1, 0.35);
  EXPECT_GT(r.holdout.f1, 0.15);
}

TEST(Classifier, SplitHygiene) {
  const auto ex = toy(300, 3, true, 5);
  const TrainConfig c = fast_config();
  std::set<int> train_leaves, hold_leaves;
  std::size_t hold = 0;
  for (const EdgeExample& e : ex) {
    if (in_holdout(e.leaf, c)) {
      hold_leaves.insert(e.leaf);
      ++hold;
    } else {
      train_leaves.insert(e.leaf);
    }
  }
  for (int l : hold_leaves) EXPECT_EQ(train_leaves.count(l), 0u);
  const TrainingResult r = train(ex, FeatureSchema{}, c);
  EXPECT_EQ(r.holdout_examples, hold);
  EXPECT_EQ(r.train_examples + r.holdout_examples, ex.size());
  EXPECT_GT(hold_leaves.size(), 30u);
  EXPECT_LT(hold_leaves.size(), 90u);
}

TEST(Classifier, SingleClassIsTrainingError) {
  auto ex = toy(50, 3, true, 6);
  for (EdgeExample& e : ex) e.label = false;
  EXPECT_THROW(train(ex, FeatureSchema{}, fast_config()), TrainingError);
  EXPECT_THROW(train({}, FeatureSchema{}, fast_config()), TrainingError);
}

TEST(Classifier, DeterministicAndHistoryComplete) {
  const auto ex = toy(200, 5, false, 7);
  TrainConfig c = fast_config();
  c.kind = ModelKind::kPerceptron;
  const TrainingResult a = train(ex, FeatureSchema{}, c);
  const TrainingResult b = train(ex, FeatureSchema{}, c);
  std::ostringstream sa, sb;
  a.model.save(sa);
  b.model.save(sb);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.history.size(), 2u * c.epochs);
  std::ostringstream ma, mb;
  write_metrics(ma, a.history);
  write_metrics(mb, b.history);
  EXPECT_EQ(ma.str(), mb.str());
  EXPECT_EQ(ma.str().rfind("epoch,split,f1,precision,recall\n", 0), 0u);
}

TEST(Classifier, SaveLoadRoundTrip) {
  const auto ex = toy(200, 4, false, 8);
  for (ModelKind kind : {ModelKind::kLogistic, ModelKind::kPerceptron}) {
    TrainConfig c = fast_config();
    c.kind = kind;
    const EdgeClassifier m = train(ex, FeatureSchema{}, c).model;
    std::ostringstream out;
    m.save(out);
    std::istringstream in(out.str());
    const EdgeClassifier back = EdgeClassifier::load(in, "model");
    EXPECT_EQ(back.kind(), kind);
    EXPECT_EQ(back.schema(), m.schema());
    for (const EdgeExample& e : ex) EXPECT_EQ(back.score(e.features), m.score(e.features));
  }
}

TEST(Classifier, CorruptModelRejected) {
  const EdgeClassifier m = train(toy(100, 3, true, 9), FeatureSchema{}, fast_config()).model;
  std::ostringstream out;
  m.save(out);
  std::string text = out.str();
  const auto pos = text.find("max_hops 2");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 10, "max_hops 3");
  std::istringstream in(text);
  EXPECT_THROW(EdgeClassifier::load(in, "model"), ParseError);
  std::istringstream junk("not a model\n");
  EXPECT_THROW(EdgeClassifier::load(junk, "model"), ParseError);
  EXPECT_THROW(EdgeClassifier::load(std::filesystem::path("/nonexistent/m.txt")),
               PrerequisiteError);
}

TEST(Classifier, PredictInfector) {
  const EdgeClassifier m = train(toy(200, 4, true, 10), FeatureSchema{}, fast_config()).model;
  auto make = [](PersonId c, double pi) {
    EdgeExample e;
    e.candidate = c;
    e.features = {pi, 0.5, 0.5, 0.5, 0.5, 0.5};
    return e;
  };
  std::vector<EdgeExample> one{make(5, 0.2)};
  EXPECT_EQ(predict_infector(m, one)->candidate, 5);
  std::vector<EdgeExample> two{make(5, 0.9), make(6, 0.2)};
  EXPECT_EQ(predict_infector(m, two)->candidate, 5);
  std::vector<EdgeExample> tie{make(9, 0.7), make(3, 0.7)};
  EXPECT_EQ(predict_infector(m, tie)->candidate, 3);
  EXPECT_FALSE(predict_infector(m, {}).has_value());
}

TEST(Classifier, SchemaShapes) {
  IpcParams p;
  EXPECT_EQ(FeatureSchema::from_ipc(p).width(), 6u);
  EXPECT_EQ(FeatureSchema::without_ipc().width(), 4u);
  EXPECT_EQ(FeatureSchema::from_ipc(p).names().size(), 6u);
  EXPECT_TRUE(FeatureSchema::from_ipc(p).matches(p));
  IpcParams q = p;
  q.alpha = 0.7;
  EXPECT_FALSE(FeatureSchema::from_ipc(p).matches(q));
  EXPECT_NE(FeatureSchema::from_ipc(p).hash(), FeatureSchema::from_ipc(q).hash());
}

TEST(TrainingSet, LeafWithFourCandidates) {
  TracingDag dag;
  std::vector<Contact> c{{1, 2, 0}, {2, 2, 0}, {3, 2, 0}, {4, 2, 0}};
  dag.record_infection({3, 9, 0, 2, 0}, c);
  IpcParams p;
  const auto ipc = batch_ipc(dag, dag.leaves(), p);
  const auto ex = build_training_set(dag, ipc, FeatureSchema::from_ipc(p));
  ASSERT_EQ(ex.size(), 4u);
  int positives = 0;
  for (const EdgeExample& e : ex) {
    positives += e.label;
    EXPECT_EQ(e.features.size(), 6u);
  }
  EXPECT_EQ(positives, 1);
  EXPECT_THROW(build_training_set(dag, {}, FeatureSchema::from_ipc(p)), IntegrityError);
  EXPECT_EQ(build_training_set(dag, {}, FeatureSchema::without_ipc()).size(), 4u);
}

TEST(TrainingSet, EmptyDag) {
  EXPECT_TRUE(build_training_set(TracingDag{}, {}, FeatureSchema{}).empty());
}

TEST(TrainingSet, PositiveFractionMatchesCount) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const TracingDag dag = oracle::random_dag(rng, 50, 4);
    IpcParams p;
    const auto ex = build_training_set(dag, batch_ipc(dag, dag.leaves(), p),
                                       FeatureSchema::from_ipc(p));
    std::size_t positives = 0;
    for (const EdgeExample& e : ex) positives += e.label;
    EXPECT_EQ(positives, dag.leaves().size());
    EXPECT_EQ(ex.size(), dag.edge_count());
  }
}

TEST(Ablation, SingleEntriesAndDeterminism) {
  std::mt19937_64 rng(12);
  // Stack many random DAG leaves into one DAG by recording them apart.
  TracingDag dag;
  PersonId base = 0;
  for (int t = 0; t < 150; ++t) {
    const TracingDag part = oracle::random_dag(rng, 12, 3);
    PersonId child = -1;
    std::vector<Contact> contacts;
    TransmissionEvent ev;
    for (const DagEdge& e : part.edges()) {
      if (e.child != child && child >= 0) {
        dag.record_infection(ev, contacts);
        contacts.clear();
      }
      child = e.child;
      contacts.push_back({base + e.parent, e.hour, e.poi});
      if (e.is_transmission) ev = {base + e.parent, base + e.child, e.day, e.hour, e.poi};
    }
    dag.record_infection(ev, contacts);
    base += 100;
  }
  TrainConfig c = fast_config();
  const std::vector<int> h0{0};
  const auto a = ablate_hops(dag, h0, 0.5, c);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].first, 0);
  const std::vector<double> alphas{0.5};
  const auto b = ablate_alpha(dag, alphas, 2, c);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b, ablate_alpha(dag, alphas, 2, c));
  const std::vector<int> hs{0, 1, 2};
  EXPECT_EQ(ablate_hops(dag, hs, 0.5, c), ablate_hops(dag, hs, 0.5, c));
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  c.epochs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.holdout_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_model_kind("gcn"), ConfigError);
  EXPECT_EQ(parse_model_kind("perceptron"), ModelKind::kPerceptron);
  EXPECT_EQ(parse_decision_rule("threshold"), DecisionRule::kThreshold);
}

}  // namespace
}  // namespace tracenet
