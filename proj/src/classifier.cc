#include "tracenet/classifier.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tracenet/csv.h"
#include "tracenet/rng.h"

namespace tracenet {

namespace {

constexpr std::string_view kModelMagic = "tracenet-edge-classifier";
constexpr int kModelVersion = 1;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

FeatureSchema FeatureSchema::from_ipc(const IpcParams& params) {
  return {true, params.max_hops, params.alpha};
}

FeatureSchema FeatureSchema::without_ipc() { return {false, 0, 0.0}; }

std::size_t FeatureSchema::width() const { return use_ipc ? 6 : 4; }

std::vector<std::string> FeatureSchema::names() const {
  std::vector<std::string> out;
  if (use_ipc) out = {"normalized_pi", "raw_pi"};
  for (const char* name : {"candidate_out_degree", "candidate_in_degree",
                           "same_day_contact_count", "hour_of_contact"}) {
    out.emplace_back(name);
  }
  return out;
}

std::uint64_t FeatureSchema::hash() const {
  std::string key = "v1";
  for (const std::string& n : names()) key += "|" + n;
  if (use_ipc) {
    key += "|H=" + std::to_string(max_hops) + "|alpha=" + format_double(alpha);
  }
  return hash_bytes(key);
}

bool FeatureSchema::matches(const IpcParams& params) const {
  return use_ipc && max_hops == params.max_hops && alpha == params.alpha;
}

std::vector<EdgeExample> leaf_examples(const TracingDag& dag, PersonId leaf,
                                       const IpcResult* ipc,
                                       const FeatureSchema& schema) {
  const auto incoming = dag.incoming(leaf);
  std::vector<EdgeExample> out;
  out.reserve(incoming.size());
  const double contacts = std::log1p(static_cast<double>(incoming.size()));
  for (EdgeId id : incoming) {
    const DagEdge& e = dag.edge(id);
    EdgeExample ex;
    ex.leaf = leaf;
    ex.candidate = e.parent;
    ex.hour = e.hour;
    ex.label = e.is_transmission;
    ex.features.reserve(schema.width());
    if (schema.use_ipc) {
      const CandidateScore* s = ipc ? ipc->find(e.parent) : nullptr;
      if (s == nullptr) {
        throw IntegrityError("no IPC score for candidate " +
                             std::to_string(e.parent) + " of leaf " +
                             std::to_string(leaf));
      }
      ex.features.push_back(s->normalized_pi);
      ex.features.push_back(std::log1p(s->raw_pi));
    }
    ex.features.push_back(std::log1p(dag.out_degree(e.parent)));
    ex.features.push_back(std::log1p(dag.in_degree(e.parent)));
    ex.features.push_back(contacts);
    ex.features.push_back(e.hour / 23.0);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<EdgeExample> build_training_set(const TracingDag& dag,
                                            std::span<const IpcResult> ipc,
                                            const FeatureSchema& schema) {
  std::map<PersonId, const IpcResult*> by_leaf;
  for (const IpcResult& r : ipc) by_leaf[r.leaf] = &r;
  std::vector<EdgeExample> out;
  for (PersonId leaf : dag.leaves()) {
    if (dag.in_degree(leaf) == 0) continue;
    const IpcResult* r = nullptr;
    if (schema.use_ipc) {
      const auto it = by_leaf.find(leaf);
      if (it == by_leaf.end()) {
        throw IntegrityError("leaf " + std::to_string(leaf) +
                             " has no IPC result");
      }
      r = it->second;
    }
    auto examples = leaf_examples(dag, leaf, r, schema);
    std::move(examples.begin(), examples.end(), std::back_inserter(out));
  }
  return out;
}

std::string_view model_kind_name(ModelKind kind) {
  return kind == ModelKind::kLogistic ? "logistic" : "perceptron";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "perceptron") return ModelKind::kPerceptron;
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

std::string_view decision_rule_name(DecisionRule rule) {
  return rule == DecisionRule::kArgmax ? "argmax" : "threshold";
}

DecisionRule parse_decision_rule(std::string_view name) {
  if (name == "argmax") return DecisionRule::kArgmax;
  if (name == "threshold") return DecisionRule::kThreshold;
  throw ConfigError("unknown decision rule '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("classifier.epochs must be >= 1");
  if (!(learning_rate > 0)) {
    throw ConfigError("classifier.learning_rate must be > 0");
  }
  if (hidden_units < 1) {
    throw ConfigError("classifier.hidden_units must be >= 1");
  }
  if (!(holdout_fraction > 0 && holdout_fraction < 1)) {
    throw ConfigError("classifier.holdout_fraction must be in (0, 1)");
  }
  if (!(threshold > 0 && threshold < 1)) {
    throw ConfigError("classifier.threshold must be in (0, 1)");
  }
}

double EdgeClassifier::logit(std::span<const double> features) const {
  const std::size_t d = mean_.size();
  if (features.size() != d) {
    throw DomainError("expected " + std::to_string(d) + " features, got " +
                      std::to_string(features.size()));
  }
  std::vector<double> x(d);
  for (std::size_t j = 0; j < d; ++j) x[j] = (features[j] - mean_[j]) / scale_[j];
  if (kind_ == ModelKind::kLogistic) {
    double z = out_b_;
    for (std::size_t j = 0; j < d; ++j) z += out_w_[j] * x[j];
    return z;
  }
  double z = out_b_;
  for (int k = 0; k < hidden_; ++k) {
    double a = hidden_b_[k];
    for (std::size_t j = 0; j < d; ++j) a += hidden_w_[k * d + j] * x[j];
    z += out_w_[k] * std::tanh(a);
  }
  return z;
}

double EdgeClassifier::score(std::span<const double> features) const {
  return sigmoid(logit(features));
}

namespace {

void write_row(std::ostream& out, std::string_view key,
               std::span<const double> values) {
  out << key << ' ' << values.size();
  for (double v : values) out << ' ' << format_double(v);
  out << '\n';
}

class ModelReader {
 public:
  ModelReader(std::istream& in, std::string_view source)
      : in_(in), source_(source) {}

  std::istringstream line(std::string_view key) {
    std::string text;
    do {
      if (!std::getline(in_, text)) fail("missing '" + std::string(key) + "'");
      ++line_;
    } while (text.empty());
    std::istringstream row(text);
    std::string got;
    row >> got;
    if (got != key) fail("expected '" + std::string(key) + "', got '" + got + "'");
    return row;
  }

  template <typename T>
  T value(std::string_view key) {
    auto row = line(key);
    T v{};
    if (!(row >> v)) fail("bad value for '" + std::string(key) + "'");
    return v;
  }

  double real(std::string_view key) {
    auto row = line(key);
    std::string token;
    row >> token;
    return parse_real(token, key);
  }

  std::vector<double> row(std::string_view key) {
    auto row = line(key);
    std::size_t n = 0;
    if (!(row >> n)) fail("bad length for '" + std::string(key) + "'");
    std::vector<double> out(n);
    for (double& v : out) {
      std::string token;
      if (!(row >> token)) fail("short row '" + std::string(key) + "'");
      v = parse_real(token, key);
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(source_, line_, msg);
  }

 private:
  double parse_real(const std::string& token, std::string_view key) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used == token.size()) return v;
    } catch (const std::exception&) {
    }
    fail("bad number '" + token + "' for '" + std::string(key) + "'");
  }

  std::istream& in_;
  std::string source_;
  int line_ = 0;
};

}  // namespace

void EdgeClassifier::save(std::ostream& out) const {
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "schema_hash " << schema_.hash() << '\n';
  out << "use_ipc " << (schema_.use_ipc ? 1 : 0) << '\n';
  out << "max_hops " << schema_.max_hops << '\n';
  out << "alpha " << format_double(schema_.alpha) << '\n';
  out << "kind " << model_kind_name(kind_) << '\n';
  out << "positive_weight " << format_double(positive_weight_) << '\n';
  write_row(out, "mean", mean_);
  write_row(out, "scale", scale_);
  out << "hidden " << hidden_ << '\n';
  write_row(out, "hidden_w", hidden_w_);
  write_row(out, "hidden_b", hidden_b_);
  write_row(out, "out_w", out_w_);
  out << "out_b " << format_double(out_b_) << '\n';
}

void EdgeClassifier::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ExitCode::kRuntime, "io", "cannot write " + path.string());
  save(out);
}

EdgeClassifier EdgeClassifier::load(std::istream& in, std::string_view source) {
  ModelReader r(in, source);
  if (r.value<int>(kModelMagic) != kModelVersion) {
    r.fail("unsupported model version");
  }
  EdgeClassifier m;
  const auto hash = r.value<std::uint64_t>("schema_hash");
  m.schema_.use_ipc = r.value<int>("use_ipc") != 0;
  m.schema_.max_hops = r.value<int>("max_hops");
  m.schema_.alpha = r.real("alpha");
  if (m.schema_.hash() != hash) r.fail("feature schema hash mismatch");
  const auto kind = r.value<std::string>("kind");
  if (kind == "logistic") {
    m.kind_ = ModelKind::kLogistic;
  } else if (kind == "perceptron") {
    m.kind_ = ModelKind::kPerceptron;
  } else {
    r.fail("unknown model kind '" + kind + "'");
  }
  m.positive_weight_ = r.real("positive_weight");
  m.mean_ = r.row("mean");
  m.scale_ = r.row("scale");
  m.hidden_ = r.value<int>("hidden");
  m.hidden_w_ = r.row("hidden_w");
  m.hidden_b_ = r.row("hidden_b");
  m.out_w_ = r.row("out_w");
  m.out_b_ = r.real("out_b");

  const std::size_t d = m.schema_.width();
  const auto h = static_cast<std::size_t>(std::max(m.hidden_, 0));
  const bool shapes_ok =
      m.mean_.size() == d && m.scale_.size() == d &&
      (m.kind_ == ModelKind::kLogistic
           ? m.hidden_ == 0 && m.hidden_w_.empty() && m.out_w_.size() == d
           : m.hidden_ > 0 && m.hidden_w_.size() == h * d &&
                 m.hidden_b_.size() == h && m.out_w_.size() == h);
  if (!shapes_ok) r.fail("weight shapes do not match the feature schema");
  return m;
}

EdgeClassifier EdgeClassifier::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PrerequisiteError("model file " + path.string() + " not found");
  return load(in, path.string());
}

BinaryMetrics binary_metrics(std::span<const char> predictions,
                             std::span<const char> labels) {
  if (predictions.size() != labels.size()) {
    throw DomainError("predictions and labels differ in length");
  }
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] != 0;
    const bool y = labels[i] != 0;
    tp += p && y;
    fp += p && !y;
    fn += !p && y;
  }
  BinaryMetrics m;
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / (tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / (tp + fn);
  if (m.precision + m.recall > 0) {
    m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

double f1_score(std::span<const char> predictions,
                std::span<const char> labels) {
  return binary_metrics(predictions, labels).f1;
}

bool in_holdout(PersonId leaf, const TrainConfig& config) {
  return keyed_uniform(derive_seed(config.rng_seed, "holdout"),
                       static_cast<std::uint64_t>(leaf)) <
         config.holdout_fraction;
}

std::vector<char> predict_edges(const EdgeClassifier& model,
                                std::span<const EdgeExample> examples,
                                const TrainConfig& config) {
  std::vector<char> out(examples.size(), 0);
  if (config.decision_rule == DecisionRule::kThreshold) {
    for (std::size_t i = 0; i < examples.size(); ++i) {
      out[i] = model.score(examples[i].features) >= config.threshold;
    }
    return out;
  }
  std::size_t begin = 0;
  while (begin < examples.size()) {
    std::size_t end = begin;
    std::size_t best = begin;
    double best_score = -1.0;
    while (end < examples.size() && examples[end].leaf == examples[begin].leaf) {
      const double s = model.score(examples[end].features);
      if (s > best_score ||
          (s == best_score && examples[end].candidate < examples[best].candidate)) {
        best = end;
        best_score = s;
      }
      ++end;
    }
    out[best] = 1;
    begin = end;
  }
  return out;
}

std::optional<InfectorPrediction> predict_infector(
    const EdgeClassifier& model, std::span<const EdgeExample> leaf_examples) {
  std::optional<InfectorPrediction> best;
  for (const EdgeExample& ex : leaf_examples) {
    const double s = model.score(ex.features);
    if (!best || s > best->score ||
        (s == best->score && ex.candidate < best->candidate)) {
      best = InfectorPrediction{ex.candidate, s};
    }
  }
  return best;
}

class Trainer {
 public:
  Trainer(std::span<const EdgeExample> examples, const FeatureSchema& schema,
          const TrainConfig& config)
      : schema_(schema), config_(config), d_(schema.width()) {
    for (const EdgeExample& ex : examples) {
      if (ex.features.size() != d_) {
        throw DomainError("example width does not match the feature schema");
      }
      (in_holdout(ex.leaf, config) ? holdout_ : train_).push_back(ex);
    }
  }

  TrainingResult run() {
    std::int64_t pos = 0;
    for (const EdgeExample& ex : train_) pos += ex.label;
    const std::int64_t neg = static_cast<std::int64_t>(train_.size()) - pos;
    if (pos == 0 || neg == 0) {
      throw TrainingError("training split needs both classes (positives=" +
                          std::to_string(pos) + ", negatives=" +
                          std::to_string(neg) + ")");
    }
    init_model(static_cast<double>(neg) / static_cast<double>(pos));

    std::vector<double> params = pack();
    std::vector<double> m(params.size(), 0.0);
    std::vector<double> v(params.size(), 0.0);
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

    TrainingResult result;
    result.train_examples = train_.size();
    result.holdout_examples = holdout_.size();
    const std::vector<char> train_labels = labels(train_);
    const std::vector<char> holdout_labels = labels(holdout_);
    for (int epoch = 1; epoch <= config_.epochs; ++epoch) {
      const std::vector<double> g = gradient();
      const double c1 = 1 - std::pow(kBeta1, epoch);
      const double c2 = 1 - std::pow(kBeta2, epoch);
      for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = kBeta1 * m[i] + (1 - kBeta1) * g[i];
        v[i] = kBeta2 * v[i] + (1 - kBeta2) * g[i] * g[i];
        params[i] -= config_.learning_rate * (m[i] / c1) /
                     (std::sqrt(v[i] / c2) + kEps);
      }
      unpack(params);
      const BinaryMetrics tr = binary_metrics(
          predict_edges(model_, train_, config_), train_labels);
      const BinaryMetrics ho = binary_metrics(
          predict_edges(model_, holdout_, config_), holdout_labels);
      result.history.push_back({epoch, "train", tr});
      result.history.push_back({epoch, "holdout", ho});
      result.holdout = ho;
    }
    result.model = model_;
    return result;
  }

 private:
  static std::vector<char> labels(std::span<const EdgeExample> xs) {
    std::vector<char> out;
    out.reserve(xs.size());
    for (const EdgeExample& ex : xs) out.push_back(ex.label);
    return out;
  }

  void init_model(double positive_weight) {
    model_.schema_ = schema_;
    model_.kind_ = config_.kind;
    model_.positive_weight_ = positive_weight;
    model_.mean_.assign(d_, 0.0);
    model_.scale_.assign(d_, 1.0);
    const double n = static_cast<double>(train_.size());
    for (const EdgeExample& ex : train_) {
      for (std::size_t j = 0; j < d_; ++j) model_.mean_[j] += ex.features[j] / n;
    }
    std::vector<double> var(d_, 0.0);
    for (const EdgeExample& ex : train_) {
      for (std::size_t j = 0; j < d_; ++j) {
        const double dx = ex.features[j] - model_.mean_[j];
        var[j] += dx * dx / n;
      }
    }
    for (std::size_t j = 0; j < d_; ++j) {
      if (var[j] > 0) model_.scale_[j] = std::sqrt(var[j]);
    }
    // Standardized copy of the training inputs.
    x_.assign(train_.size() * d_, 0.0);
    for (std::size_t i = 0; i < train_.size(); ++i) {
      for (std::size_t j = 0; j < d_; ++j) {
        x_[i * d_ + j] =
            (train_[i].features[j] - model_.mean_[j]) / model_.scale_[j];
      }
    }

    if (config_.kind == ModelKind::kLogistic) {
      model_.hidden_ = 0;
      model_.out_w_.assign(d_, 0.0);
      return;
    }
    const int h = config_.hidden_units;
    model_.hidden_ = h;
    Rng rng(derive_seed(config_.rng_seed, "init"));
    const double a1 = std::sqrt(6.0 / static_cast<double>(d_ + h));
    const double a2 = std::sqrt(6.0 / static_cast<double>(h + 1));
    model_.hidden_w_.resize(static_cast<std::size_t>(h) * d_);
    for (double& w : model_.hidden_w_) w = (2 * rng.uniform() - 1) * a1;
    model_.hidden_b_.assign(h, 0.0);
    model_.out_w_.resize(h);
    for (double& w : model_.out_w_) w = (2 * rng.uniform() - 1) * a2;
  }

  std::vector<double> pack() const {
    std::vector<double> p = model_.hidden_w_;
    p.insert(p.end(), model_.hidden_b_.begin(), model_.hidden_b_.end());
    p.insert(p.end(), model_.out_w_.begin(), model_.out_w_.end());
    p.push_back(model_.out_b_);
    return p;
  }

  void unpack(std::span<const double> p) {
    auto it = p.begin();
    for (double& w : model_.hidden_w_) w = *it++;
    for (double& w : model_.hidden_b_) w = *it++;
    for (double& w : model_.out_w_) w = *it++;
    model_.out_b_ = *it;
  }

  // Gradient of the weighted mean cross-entropy in pack() order.
  std::vector<double> gradient() const {
    const std::size_t h = static_cast<std::size_t>(model_.hidden_);
    const std::size_t nw1 = h * d_;
    const std::size_t n_out = model_.out_w_.size();
    std::vector<double> g(nw1 + h + n_out + 1, 0.0);
    double total_weight = 0.0;
    std::vector<double> act(h);
    for (std::size_t i = 0; i < train_.size(); ++i) {
      const double* x = &x_[i * d_];
      const bool y = train_[i].label;
      const double c = y ? model_.positive_weight_ : 1.0;
      total_weight += c;
      double z = model_.out_b_;
      if (h == 0) {
        for (std::size_t j = 0; j < d_; ++j) z += model_.out_w_[j] * x[j];
      } else {
        for (std::size_t k = 0; k < h; ++k) {
          double a = model_.hidden_b_[k];
          for (std::size_t j = 0; j < d_; ++j) {
            a += model_.hidden_w_[k * d_ + j] * x[j];
          }
          act[k] = std::tanh(a);
          z += model_.out_w_[k] * act[k];
        }
      }
      const double dz = c * (sigmoid(z) - (y ? 1.0 : 0.0));
      g.back() += dz;
      if (h == 0) {
        for (std::size_t j = 0; j < d_; ++j) g[j] += dz * x[j];
        continue;
      }
      for (std::size_t k = 0; k < h; ++k) {
        g[nw1 + h + k] += dz * act[k];
        const double da = dz * model_.out_w_[k] * (1 - act[k] * act[k]);
        g[nw1 + k] += da;
        for (std::size_t j = 0; j < d_; ++j) g[k * d_ + j] += da * x[j];
      }
    }
    for (double& v : g) v /= total_weight;
    return g;
  }

  FeatureSchema schema_;
  TrainConfig config_;
  std::size_t d_;
  std::vector<EdgeExample> train_;
  std::vector<EdgeExample> holdout_;
  std::vector<double> x_;
  EdgeClassifier model_;
};

TrainingResult train(std::span<const EdgeExample> examples,
                     const FeatureSchema& schema, const TrainConfig& config) {
  config.validate();
  return Trainer(examples, schema, config).run();
}

namespace {

double ablation_f1(const TracingDag& dag, const FeatureSchema& schema,
                   const TrainConfig& config) {
  std::vector<IpcResult> ipc;
  if (schema.use_ipc) {
    IpcParams params;
    params.alpha = schema.alpha;
    params.max_hops = schema.max_hops;
    ipc = batch_ipc(dag, dag.leaves(), params);
  }
  const auto examples = build_training_set(dag, ipc, schema);
  return train(examples, schema, config).holdout.f1;
}

}  // namespace

std::vector<std::pair<int, double>> ablate_hops(const TracingDag& dag,
                                                std::span<const int> hops,
                                                double alpha,
                                                const TrainConfig& config) {
  std::vector<std::pair<int, double>> out;
  for (int h : hops) {
    if (h < 0) throw ConfigError("hop counts must be >= 0");
    const FeatureSchema schema = h == 0 ? FeatureSchema::without_ipc()
                                        : FeatureSchema{true, h, alpha};
    out.emplace_back(h, ablation_f1(dag, schema, config));
  }
  return out;
}

std::vector<std::pair<double, double>> ablate_alpha(
    const TracingDag& dag, std::span<const double> alphas, int max_hops,
    const TrainConfig& config) {
  std::vector<std::pair<double, double>> out;
  for (double a : alphas) {
    IpcParams p;
    p.alpha = a;
    p.max_hops = max_hops;
    p.validate();
    out.emplace_back(a, ablation_f1(dag, FeatureSchema::from_ipc(p), config));
  }
  return out;
}

void write_metrics(std::ostream& out, std::span<const EpochMetrics> history,
                   std::string_view comment) {
  write_comment(out, comment);
  out << "epoch,split,f1,precision,recall\n";
  for (const EpochMetrics& e : history) {
    out << e.epoch << ',' << e.split << ',' << format_double(e.metrics.f1)
        << ',' << format_double(e.metrics.precision) << ','
        << format_double(e.metrics.recall) << '\n';
  }
}

}  // namespace tracenet
