#include "tracenet/config.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "tracenet/csv.h"
#include "tracenet/rng.h"

namespace tracenet {

namespace {

struct Value;
using List = std::vector<Value>;
struct Value {
  std::variant<std::int64_t, double, bool, std::string, List> v;
};

class LineError {
 public:
  explicit LineError(std::string msg) : msg(std::move(msg)) {}
  std::string msg;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class ValueParser {
 public:
  explicit ValueParser(std::string_view text) : s_(text) {}

  Value parse() {
    Value v = value();
    skip_space();
    if (pos_ != s_.size()) throw LineError("trailing characters after value");
    return v;
  }

 private:
  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  Value value() {
    skip_space();
    if (pos_ >= s_.size()) throw LineError("missing value");
    const char c = s_[pos_];
    if (c == '"') return {string()};
    if (c == '[') return {list()};
    return scalar();
  }

  std::string string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
      out += s_[pos_++];
    }
    if (pos_ >= s_.size()) throw LineError("unterminated string");
    ++pos_;
    return out;
  }

  List list() {
    ++pos_;
    List out;
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(value());
      skip_space();
      if (pos_ >= s_.size()) throw LineError("unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      if (s_[pos_] != ',') throw LineError("expected ',' or ']' in array");
      ++pos_;
    }
  }

  Value scalar() {
    const auto end = s_.find_first_of(",] \t", pos_);
    const std::string_view tok =
        s_.substr(pos_, end == std::string_view::npos ? end : end - pos_);
    pos_ += tok.size();
    if (tok == "true") return {true};
    if (tok == "false") return {false};
    std::int64_t i = 0;
    auto r = std::from_chars(tok.data(), tok.data() + tok.size(), i);
    if (r.ec == std::errc() && r.ptr == tok.data() + tok.size()) return {i};
    double d = 0;
    r = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (r.ec == std::errc() && r.ptr == tok.data() + tok.size()) return {d};
    throw LineError("cannot parse value '" + std::string(tok) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::int64_t as_int(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v.v)) return *i;
  throw LineError("expected an integer");
}

int as_int32(const Value& v) {
  const std::int64_t i = as_int(v);
  if (i < INT32_MIN || i > INT32_MAX) throw LineError("integer out of range");
  return static_cast<int>(i);
}

double as_real(const Value& v) {
  if (const auto* d = std::get_if<double>(&v.v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v.v)) {
    return static_cast<double>(*i);
  }
  throw LineError("expected a number");
}

bool as_bool(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v.v)) return *b;
  throw LineError("expected true or false");
}

std::string as_string(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
  throw LineError("expected a quoted string");
}

const List& as_list(const Value& v) {
  if (const auto* l = std::get_if<List>(&v.v)) return *l;
  throw LineError("expected an array");
}

template <typename T, typename F>
std::vector<T> map_list(const Value& v, F f) {
  std::vector<T> out;
  for (const Value& x : as_list(v)) out.push_back(f(x));
  return out;
}

template <typename E>
E wrap_enum(const std::function<E(std::string_view)>& parse,
            const std::string& name) {
  try {
    return parse(name);
  } catch (const ConfigError& e) {
    throw LineError(e.what());
  }
}

using Setter = std::function<void(RunConfig&, const Value&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.master_seed",
       [](RunConfig& c, const Value& v) {
         const std::int64_t s = as_int(v);
         if (s < 0) throw LineError("master_seed must be >= 0");
         c.master_seed = static_cast<std::uint64_t>(s);
       }},
      {"run.train_days",
       [](RunConfig& c, const Value& v) { c.train_days = as_int32(v); }},

      {"mobility.n_people",
       [](RunConfig& c, const Value& v) { c.mobility.n_people = as_int32(v); }},
      {"mobility.n_pois",
       [](RunConfig& c, const Value& v) { c.mobility.n_pois = as_int32(v); }},
      {"mobility.horizon_days",
       [](RunConfig& c, const Value& v) {
         c.mobility.horizon_days = as_int32(v);
       }},
      {"mobility.visits_per_person_per_day",
       [](RunConfig& c, const Value& v) {
         c.mobility.visits_per_person_per_day = as_real(v);
       }},
      {"mobility.poi_popularity_exponent",
       [](RunConfig& c, const Value& v) {
         c.mobility.poi_popularity_exponent = as_real(v);
       }},
      {"mobility.activity_pareto_shape",
       [](RunConfig& c, const Value& v) {
         c.mobility.activity_pareto_shape = as_real(v);
       }},

      {"disease.incubation_days",
       [](RunConfig& c, const Value& v) {
         c.disease.incubation_days = as_int32(v);
       }},
      {"disease.infectious_days",
       [](RunConfig& c, const Value& v) {
         c.disease.infectious_days = as_int32(v);
       }},
      {"disease.seed_fraction",
       [](RunConfig& c, const Value& v) {
         c.disease.seed_fraction = as_real(v);
       }},
      {"disease.symptomatic_virality_threshold",
       [](RunConfig& c, const Value& v) {
         c.disease.symptomatic_virality_threshold = as_real(v);
       }},

      {"ipc.alpha",
       [](RunConfig& c, const Value& v) { c.ipc.alpha = as_real(v); }},
      {"ipc.max_hops",
       [](RunConfig& c, const Value& v) { c.ipc.max_hops = as_int32(v); }},
      {"ipc.exclude_focal_leaf",
       [](RunConfig& c, const Value& v) {
         c.ipc.exclude_focal_leaf = as_bool(v);
       }},

      {"classifier.model",
       [](RunConfig& c, const Value& v) {
         c.classifier.kind =
             wrap_enum<ModelKind>(parse_model_kind, as_string(v));
       }},
      {"classifier.epochs",
       [](RunConfig& c, const Value& v) { c.classifier.epochs = as_int32(v); }},
      {"classifier.learning_rate",
       [](RunConfig& c, const Value& v) {
         c.classifier.learning_rate = as_real(v);
       }},
      {"classifier.hidden_units",
       [](RunConfig& c, const Value& v) {
         c.classifier.hidden_units = as_int32(v);
       }},
      {"classifier.holdout_fraction",
       [](RunConfig& c, const Value& v) {
         c.classifier.holdout_fraction = as_real(v);
       }},
      {"classifier.decision_rule",
       [](RunConfig& c, const Value& v) {
         c.classifier.decision_rule =
             wrap_enum<DecisionRule>(parse_decision_rule, as_string(v));
       }},
      {"classifier.threshold",
       [](RunConfig& c, const Value& v) {
         c.classifier.threshold = as_real(v);
       }},

      {"ablation.hops",
       [](RunConfig& c, const Value& v) {
         c.ablation.hops = map_list<int>(v, as_int32);
       }},
      {"ablation.alphas",
       [](RunConfig& c, const Value& v) {
         c.ablation.alphas = map_list<double>(v, as_real);
       }},

      {"mitigation.policies",
       [](RunConfig& c, const Value& v) {
         c.mitigation.policies = map_list<PolicyKind>(v, [](const Value& x) {
           return wrap_enum<PolicyKind>(parse_policy, as_string(x));
         });
       }},
      {"mitigation.test_fractions",
       [](RunConfig& c, const Value& v) {
         c.mitigation.test_fractions = map_list<double>(v, as_real);
       }},
      {"mitigation.n_runs",
       [](RunConfig& c, const Value& v) {
         c.mitigation.n_runs = as_int32(v);
       }},
      {"mitigation.start_day",
       [](RunConfig& c, const Value& v) {
         c.mitigation.base.start_day = as_int32(v);
       }},
      {"mitigation.quarantine_days_forward",
       [](RunConfig& c, const Value& v) {
         c.mitigation.base.quarantine_days_forward = as_int32(v);
       }},
      {"mitigation.lookback_days",
       [](RunConfig& c, const Value& v) {
         c.mitigation.base.lookback_days = as_int32(v);
       }},
      {"mitigation.scope",
       [](RunConfig& c, const Value& v) {
         c.mitigation.base.scope =
             wrap_enum<QuarantineScope>(parse_scope, as_string(v));
       }},

      {"analysis.reference_nodes",
       [](RunConfig& c, const Value& v) {
         c.analysis.reference_nodes = as_int32(v);
       }},
      {"analysis.reference_edges",
       [](RunConfig& c, const Value& v) {
         c.analysis.reference_edges = as_int(v);
       }},
      {"analysis.sample_size",
       [](RunConfig& c, const Value& v) {
         c.analysis.sample_size = as_int32(v);
       }},
      {"analysis.max_hops",
       [](RunConfig& c, const Value& v) {
         c.analysis.max_hops = as_int32(v);
       }},
      {"analysis.top_k",
       [](RunConfig& c, const Value& v) { c.analysis.top_k = as_int32(v); }},
      {"analysis.betweenness_exact_limit",
       [](RunConfig& c, const Value& v) {
         c.analysis.betweenness_exact_limit = as_int32(v);
       }},
      {"analysis.betweenness_pivots",
       [](RunConfig& c, const Value& v) {
         c.analysis.betweenness_pivots = as_int32(v);
       }},
  };
  return table;
}

std::string real(double x) {
  std::string s = format_double(x);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <typename T, typename F>
std::string list(const std::vector<T>& xs, F f) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += f(xs[i]);
  }
  return out + "]";
}

std::string quoted(std::string_view s) { return "\"" + std::string(s) + "\""; }

}  // namespace

void RunConfig::finalize() {
  if (train_days < 1 || train_days > mobility.horizon_days) {
    throw ConfigError("run.train_days must be in [1, mobility.horizon_days]");
  }
  mobility.rng_seed = derive_seed(master_seed, "mobility");
  disease.rng_seed = derive_seed(master_seed, "disease");
  disease.horizon_days = train_days;
  classifier.rng_seed = derive_seed(master_seed, "classifier");
  mitigation.master_seed = derive_seed(master_seed, "mitigation");

  mobility.validate();
  disease.validate();
  ipc.validate();
  classifier.validate();
  for (int h : ablation.hops) {
    if (h < 0) throw ConfigError("ablation.hops must be >= 0");
  }
  for (double a : ablation.alphas) {
    if (!(a >= 0 && a <= 1)) throw ConfigError("ablation.alphas must be in [0, 1]");
  }
  mitigation.validate();
  if (analysis.reference_nodes < 1 || analysis.reference_edges < 0 ||
      analysis.sample_size < 1 || analysis.max_hops < 0 ||
      analysis.top_k < 1 || analysis.betweenness_pivots < 1 ||
      analysis.betweenness_exact_limit < 0) {
    throw ConfigError("analysis settings must be positive");
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream o;
  o << "[run]\n"
    << "master_seed = " << master_seed << "\n"
    << "train_days = " << train_days << "\n\n"
    << "[mobility]\n"
    << "n_people = " << mobility.n_people << "\n"
    << "n_pois = " << mobility.n_pois << "\n"
    << "horizon_days = " << mobility.horizon_days << "\n"
    << "visits_per_person_per_day = "
    << real(mobility.visits_per_person_per_day) << "\n"
    << "poi_popularity_exponent = " << real(mobility.poi_popularity_exponent)
    << "\n"
    << "activity_pareto_shape = " << real(mobility.activity_pareto_shape)
    << "\n\n"
    << "[disease]\n"
    << "incubation_days = " << disease.incubation_days << "\n"
    << "infectious_days = " << disease.infectious_days << "\n"
    << "seed_fraction = " << real(disease.seed_fraction) << "\n"
    << "symptomatic_virality_threshold = "
    << real(disease.symptomatic_virality_threshold) << "\n\n"
    << "[ipc]\n"
    << "alpha = " << real(ipc.alpha) << "\n"
    << "max_hops = " << ipc.max_hops << "\n"
    << "exclude_focal_leaf = " << (ipc.exclude_focal_leaf ? "true" : "false")
    << "\n\n"
    << "[classifier]\n"
    << "model = " << quoted(model_kind_name(classifier.kind)) << "\n"
    << "epochs = " << classifier.epochs << "\n"
    << "learning_rate = " << real(classifier.learning_rate) << "\n"
    << "hidden_units = " << classifier.hidden_units << "\n"
    << "holdout_fraction = " << real(classifier.holdout_fraction) << "\n"
    << "decision_rule = " << quoted(decision_rule_name(classifier.decision_rule))
    << "\n"
    << "threshold = " << real(classifier.threshold) << "\n\n"
    << "[ablation]\n"
    << "hops = "
    << list(ablation.hops, [](int h) { return std::to_string(h); }) << "\n"
    << "alphas = " << list(ablation.alphas, real) << "\n\n"
    << "[mitigation]\n"
    << "policies = "
    << list(mitigation.policies,
            [](PolicyKind p) { return quoted(policy_name(p)); })
    << "\n"
    << "test_fractions = " << list(mitigation.test_fractions, real) << "\n"
    << "n_runs = " << mitigation.n_runs << "\n"
    << "start_day = " << mitigation.base.start_day << "\n"
    << "quarantine_days_forward = " << mitigation.base.quarantine_days_forward
    << "\n"
    << "lookback_days = " << mitigation.base.lookback_days << "\n"
    << "scope = " << quoted(scope_name(mitigation.base.scope)) << "\n\n"
    << "[analysis]\n"
    << "reference_nodes = " << analysis.reference_nodes << "\n"
    << "reference_edges = " << analysis.reference_edges << "\n"
    << "sample_size = " << analysis.sample_size << "\n"
    << "max_hops = " << analysis.max_hops << "\n"
    << "top_k = " << analysis.top_k << "\n"
    << "betweenness_exact_limit = " << analysis.betweenness_exact_limit
    << "\n"
    << "betweenness_pivots = " << analysis.betweenness_pivots << "\n";
  return o.str();
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash_bytes(to_text())));
  return buf;
}

RunConfig parse_config(std::istream& in, std::string_view source) {
  RunConfig config;
  std::string section;
  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  const auto fail = [&](const std::string& msg) {
    throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                      ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> kSections = {
          "run",        "mobility", "disease",    "ipc",
          "classifier", "ablation", "mitigation", "analysis"};
      if (!kSections.contains(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (section.empty()) fail("key '" + key + "' outside a section");
    const std::string full = section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) fail("unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(full).second) fail("duplicate key '" + full + "'");
    try {
      it->second(config, ValueParser(line.substr(eq + 1)).parse());
    } catch (const LineError& e) {
      fail(full + ": " + e.msg);
    }
  }
  config.finalize();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in, path.string());
}

RunConfig desk_config() {
  RunConfig c;
  c.master_seed = 20200501;
  c.mobility.n_people = 5000;
  c.mobility.n_pois = 500;
  c.mobility.horizon_days = 60;
  c.mobility.visits_per_person_per_day = 0.09;
  c.mobility.poi_popularity_exponent = 1.45;
  c.mobility.activity_pareto_shape = 1.35;
  c.train_days = 30;
  c.finalize();
  return c;
}

}  // namespace tracenet
