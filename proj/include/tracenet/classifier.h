#ifndef TRACENET_CLASSIFIER_H_
#define TRACENET_CLASSIFIER_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tracenet/centrality.h"
#include "tracenet/tracing.h"
#include "tracenet/types.h"

namespace tracenet {

// Which features an example carries. With use_ipc false (the 0-hop ablation)
// only the plumbing features remain.
struct FeatureSchema {
  bool use_ipc = true;
  int max_hops = 2;
  double alpha = 0.5;

  static FeatureSchema from_ipc(const IpcParams& params);
  static FeatureSchema without_ipc();

  std::size_t width() const;
  std::vector<std::string> names() const;
  std::uint64_t hash() const;
  // True if a model built with this schema can consume IPC computed with
  // `params`.
  bool matches(const IpcParams& params) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

// One incoming DAG edge of a leaf. Feature layout (ipc part only when the
// schema uses it):
//   normalized_pi, log1p(raw_pi),
//   log1p(candidate out-degree), log1p(candidate in-degree),
//   log1p(leaf same-day contact count), hour / 23
struct EdgeExample {
  PersonId leaf = 0;
  PersonId candidate = 0;
  int hour = 0;
  std::vector<double> features;
  bool label = false;
};

// One example per incoming edge of every leaf that has at least one, grouped
// by leaf in DAG leaf order and by edge order within a leaf. `ipc` may be
// empty when the schema does not use IPC. Throws IntegrityError if a leaf or
// one of its candidates has no IPC entry.
std::vector<EdgeExample> build_training_set(const TracingDag& dag,
                                            std::span<const IpcResult> ipc,
                                            const FeatureSchema& schema);

// Examples for a single leaf, labels copied from the DAG.
std::vector<EdgeExample> leaf_examples(const TracingDag& dag, PersonId leaf,
                                       const IpcResult* ipc,
                                       const FeatureSchema& schema);

enum class ModelKind { kLogistic, kPerceptron };
std::string_view model_kind_name(ModelKind kind);
// Throws ConfigError for unknown names.
ModelKind parse_model_kind(std::string_view name);

// How edge scores become positive predictions when measuring F1. kArgmax
// marks the single best edge of each leaf; kThreshold marks every edge whose
// probability reaches `threshold`.
enum class DecisionRule { kArgmax, kThreshold };
std::string_view decision_rule_name(DecisionRule rule);
DecisionRule parse_decision_rule(std::string_view name);

struct TrainConfig {
  ModelKind kind = ModelKind::kLogistic;
  int epochs = 300;
  double learning_rate = 0.05;
  int hidden_units = 16;
  double holdout_fraction = 0.2;
  DecisionRule decision_rule = DecisionRule::kArgmax;
  double threshold = 0.5;
  std::uint64_t rng_seed = 0;

  // Throws ConfigError.
  void validate() const;
};

class EdgeClassifier {
 public:
  EdgeClassifier() = default;

  const FeatureSchema& schema() const { return schema_; }
  ModelKind kind() const { return kind_; }
  double positive_weight() const { return positive_weight_; }
  // Logistic: one weight per feature. Perceptron: output-layer weights.
  std::span<const double> output_weights() const { return out_w_; }

  // Probability that the edge is the transmission edge.
  double score(std::span<const double> features) const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  // Throws ParseError on a malformed file, including a schema hash that does
  // not match the stored schema fields.
  static EdgeClassifier load(std::istream& in, std::string_view source);
  static EdgeClassifier load(const std::filesystem::path& path);

 private:
  friend class Trainer;

  double logit(std::span<const double> features) const;

  FeatureSchema schema_;
  ModelKind kind_ = ModelKind::kLogistic;
  double positive_weight_ = 1.0;
  // Standardization fitted on the training split.
  std::vector<double> mean_;
  std::vector<double> scale_;
  // Perceptron hidden layer, row-major hidden x features.
  int hidden_ = 0;
  std::vector<double> hidden_w_;
  std::vector<double> hidden_b_;
  std::vector<double> out_w_;
  double out_b_ = 0.0;
};

struct BinaryMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Positive-class precision, recall and F1. Each is 0 when undefined.
// Throws DomainError if the spans differ in length.
BinaryMetrics binary_metrics(std::span<const char> predictions,
                             std::span<const char> labels);
double f1_score(std::span<const char> predictions,
                std::span<const char> labels);

struct EpochMetrics {
  int epoch = 0;
  std::string split;
  BinaryMetrics metrics;
};

struct TrainingResult {
  EdgeClassifier model;
  std::vector<EpochMetrics> history;
  std::size_t train_examples = 0;
  std::size_t holdout_examples = 0;
  // Held-out metrics after the last epoch.
  BinaryMetrics holdout;
};

// True if every example of `leaf` belongs to the held-out split.
bool in_holdout(PersonId leaf, const TrainConfig& config);

// Full-batch Adam on class-weighted cross-entropy (positive weight =
// #neg / #pos on the training split). Examples are split 80/20 by leaf.
// Throws TrainingError if the training split lacks either class.
TrainingResult train(std::span<const EdgeExample> examples,
                     const FeatureSchema& schema, const TrainConfig& config);

// Marks predicted positives according to the decision rule. Examples must be
// grouped by leaf.
std::vector<char> predict_edges(const EdgeClassifier& model,
                                std::span<const EdgeExample> examples,
                                const TrainConfig& config);

struct InfectorPrediction {
  PersonId candidate = 0;
  double score = 0.0;
};

// Highest-scoring candidate, ties to the lower id. nullopt when there are no
// candidates.
std::optional<InfectorPrediction> predict_infector(
    const EdgeClassifier& model, std::span<const EdgeExample> leaf_examples);

// Retrains per setting and reports held-out F1 after the last epoch. A hop
// count of 0 drops the IPC features.
std::vector<std::pair<int, double>> ablate_hops(const TracingDag& dag,
                                                std::span<const int> hops,
                                                double alpha,
                                                const TrainConfig& config);
std::vector<std::pair<double, double>> ablate_alpha(
    const TracingDag& dag, std::span<const double> alphas, int max_hops,
    const TrainConfig& config);

// CSV `epoch,split,f1,precision,recall`.
void write_metrics(std::ostream& out, std::span<const EpochMetrics> history,
                   std::string_view comment = {});

}  // namespace tracenet

#endif  // TRACENET_CLASSIFIER_H_
