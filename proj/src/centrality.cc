#include "tracenet/centrality.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tracenet/csv.h"

namespace tracenet {

void IpcParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("ipc.alpha must be in [0, 1]");
  }
  if (max_hops < 1) throw ConfigError("ipc.max_hops must be >= 1");
}

double edge_weight(int hop, const IpcParams& params) {
  if (hop < 1) {
    throw DomainError("hop index must be >= 1, got " + std::to_string(hop));
  }
  if (hop == 1) return 1.0;
  return std::pow(params.alpha, hop - 1);
}

namespace {

// One upstream step: every unit of signal at a child moves to each parent.
void step_upstream(const TracingDag& dag, std::span<const double> layer,
                   std::vector<double>& next) {
  std::fill(next.begin(), next.end(), 0.0);
  for (std::size_t y = 0; y < layer.size(); ++y) {
    if (layer[y] == 0.0) continue;
    for (EdgeId id : dag.incoming(static_cast<PersonId>(y))) {
      next[dag.edge(id).parent] += layer[y];
    }
  }
}

std::vector<double> dense_phi(const TracingDag& dag,
                              std::span<const PersonId> sources,
                              const IpcParams& params) {
  const auto n = static_cast<std::size_t>(dag.id_bound());
  std::vector<double> phi(n, 0.0);
  std::vector<double> layer(n, 0.0);
  std::vector<double> next(n, 0.0);
  for (PersonId s : sources) {
    if (s >= 0 && static_cast<std::size_t>(s) < n) layer[s] = 1.0;
  }
  for (int h = 1; h <= params.max_hops; ++h) {
    step_upstream(dag, layer, next);
    const double w = edge_weight(h, params);
    for (std::size_t x = 0; x < n; ++x) phi[x] += w * next[x];
    layer.swap(next);
  }
  return phi;
}

void check_leaf(const TracingDag& dag, PersonId leaf) {
  if (!dag.is_leaf(leaf)) {
    throw DomainError("person " + std::to_string(leaf) +
                      " is not a leaf of the tracing DAG");
  }
}

}  // namespace

std::map<PersonId, double> accumulate_phi(const TracingDag& dag,
                                          std::span<const PersonId> leaves,
                                          const IpcParams& params) {
  params.validate();
  std::vector<PersonId> sources(leaves.begin(), leaves.end());
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  const std::vector<double> phi = dense_phi(dag, sources, params);
  std::map<PersonId, double> out;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (phi[i] > 0.0) out.emplace(static_cast<PersonId>(i), phi[i]);
  }
  return out;
}

const CandidateScore* IpcResult::find(PersonId candidate) const {
  const auto it = std::lower_bound(
      scores.begin(), scores.end(), candidate,
      [](const CandidateScore& s, PersonId c) { return s.candidate < c; });
  return it != scores.end() && it->candidate == candidate ? &*it : nullptr;
}

IpcEngine::IpcEngine(const TracingDag& dag, const IpcParams& params)
    : dag_(dag), params_(params) {
  params_.validate();
  phi_ = dense_phi(dag_, dag_.leaves(), params_);

  // gathered_[v] = sum_{d=1..H-1} alpha^d * sum_x walks_d(v -> x) * phi_x
  const std::size_t n = phi_.size();
  gathered_.assign(n, 0.0);
  std::vector<double> layer = phi_;
  std::vector<double> next(n, 0.0);
  for (int d = 1; d < params_.max_hops; ++d) {
    for (std::size_t v = 0; v < n; ++v) {
      double sum = 0.0;
      for (EdgeId id : dag_.incoming(static_cast<PersonId>(v))) {
        sum += layer[dag_.edge(id).parent];
      }
      next[v] = sum;
    }
    const double w = edge_weight(d + 1, params_);
    for (std::size_t v = 0; v < n; ++v) gathered_[v] += w * next[v];
    layer.swap(next);
  }
}

double IpcEngine::phi(PersonId person) const {
  if (person < 0 || static_cast<std::size_t>(person) >= phi_.size()) return 0;
  return phi_[person];
}

std::map<PersonId, double> IpcEngine::phi_from(PersonId leaf) const {
  std::map<PersonId, double> phi;
  std::map<PersonId, double> layer{{leaf, 1.0}};
  for (int h = 1; h <= params_.max_hops && !layer.empty(); ++h) {
    std::map<PersonId, double> next;
    for (const auto& [y, count] : layer) {
      for (EdgeId id : dag_.incoming(y)) next[dag_.edge(id).parent] += count;
    }
    const double w = edge_weight(h, params_);
    for (const auto& [x, count] : next) phi[x] += w * count;
    layer.swap(next);
  }
  return phi;
}

double IpcEngine::gather_upstream(
    PersonId v, const std::map<PersonId, double>& field) const {
  double total = 0.0;
  std::map<PersonId, double> layer{{v, 1.0}};
  for (int d = 1; d < params_.max_hops && !layer.empty(); ++d) {
    std::map<PersonId, double> next;
    for (const auto& [y, count] : layer) {
      for (EdgeId id : dag_.incoming(y)) next[dag_.edge(id).parent] += count;
    }
    const double w = edge_weight(d + 1, params_);
    for (const auto& [x, count] : next) {
      const auto it = field.find(x);
      if (it != field.end()) total += w * count * it->second;
    }
    layer.swap(next);
  }
  return total;
}

IpcResult IpcEngine::score(PersonId leaf) const {
  check_leaf(dag_, leaf);
  IpcResult result;
  result.leaf = leaf;

  std::map<PersonId, int> multiplicity;
  for (EdgeId id : dag_.incoming(leaf)) ++multiplicity[dag_.edge(id).parent];
  if (multiplicity.empty()) return result;

  std::map<PersonId, double> own_phi;
  if (params_.exclude_focal_leaf) own_phi = phi_from(leaf);

  double best = 0.0;
  for (const auto& [v, m] : multiplicity) {
    double raw = static_cast<double>(m) + gathered_[v];
    if (params_.exclude_focal_leaf) {
      raw -= gather_upstream(v, own_phi);
      raw = std::max(raw, static_cast<double>(m));
    }
    result.scores.push_back({v, raw, 0.0});
    best = std::max(best, raw);
  }
  for (CandidateScore& s : result.scores) s.normalized_pi = s.raw_pi / best;
  return result;
}

IpcResult infectious_path_centrality(const TracingDag& dag, PersonId leaf,
                                     const IpcParams& params) {
  check_leaf(dag, leaf);
  return IpcEngine(dag, params).score(leaf);
}

std::vector<IpcResult> batch_ipc(const TracingDag& dag,
                                 std::span<const PersonId> leaves,
                                 const IpcParams& params) {
  for (PersonId leaf : leaves) check_leaf(dag, leaf);
  const IpcEngine engine(dag, params);
  std::vector<IpcResult> out;
  out.reserve(leaves.size());
  for (PersonId leaf : leaves) out.push_back(engine.score(leaf));
  return out;
}

void write_ipc(std::ostream& out, std::span<const IpcResult> results,
               std::string_view comment) {
  write_comment(out, comment);
  out << "leaf,candidate,raw_pi,normalized_pi\n";
  for (const IpcResult& r : results) {
    for (const CandidateScore& s : r.scores) {
      out << r.leaf << ',' << s.candidate << ',' << format_double(s.raw_pi)
          << ',' << format_double(s.normalized_pi) << '\n';
    }
  }
}

std::vector<IpcResult> parse_ipc(std::istream& in, std::string_view source) {
  CsvReader reader(in, std::string(source),
                   "leaf,candidate,raw_pi,normalized_pi");
  std::vector<IpcResult> out;
  while (reader.next()) {
    const auto leaf = static_cast<PersonId>(reader.integer(0));
    if (out.empty() || out.back().leaf != leaf) out.push_back({leaf, {}});
    auto& scores = out.back().scores;
    const CandidateScore s{static_cast<PersonId>(reader.integer(1)),
                           reader.real(2), reader.real(3)};
    if (!scores.empty() && scores.back().candidate >= s.candidate) {
      reader.fail("candidates of a leaf must be strictly increasing");
    }
    scores.push_back(s);
  }
  return out;
}

}  // namespace tracenet
