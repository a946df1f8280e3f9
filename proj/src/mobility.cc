#include "tracenet/mobility.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <tuple>

#include "tracenet/csv.h"
#include "tracenet/rng.h"

namespace tracenet {
namespace {

constexpr std::string_view kVisitHeader = "device_id,poi_id,day,hour";

// Cumulative popularity weights for ranks 1..n.
std::vector<double> popularity_cdf(int n, double exponent) {
  std::vector<double> cdf(n);
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    total += std::pow(static_cast<double>(k + 1), -exponent);
    cdf[k] = total;
  }
  for (double& c : cdf) c /= total;
  cdf.back() = 1.0;
  return cdf;
}

}  // namespace

void MobilityConfig::validate() const {
  if (n_people < 1) throw ConfigError("mobility.n_people must be >= 1");
  if (n_pois < 1) throw ConfigError("mobility.n_pois must be >= 1");
  if (horizon_days < 1) throw ConfigError("mobility.horizon_days must be >= 1");
  if (!(visits_per_person_per_day >= 0.0) ||
      !std::isfinite(visits_per_person_per_day)) {
    throw ConfigError("mobility.visits_per_person_per_day must be >= 0");
  }
  if (!(poi_popularity_exponent > 1.0) ||
      !std::isfinite(poi_popularity_exponent)) {
    throw ConfigError("mobility.poi_popularity_exponent must be > 1");
  }
  if (activity_pareto_shape != 0.0 &&
      !(activity_pareto_shape > 1.0 && std::isfinite(activity_pareto_shape))) {
    throw ConfigError("mobility.activity_pareto_shape must be 0 or > 1");
  }
}

std::vector<double> person_activity(const MobilityConfig& config) {
  std::vector<double> activity(config.n_people, 1.0);
  if (config.activity_pareto_shape == 0.0) return activity;
  const double shape = config.activity_pareto_shape;
  const double scale = (shape - 1.0) / shape;  // makes the mean one
  Rng rng(derive_seed(config.rng_seed, "activity"));
  for (double& a : activity) {
    a = scale * std::pow(1.0 - rng.uniform(), -1.0 / shape);
  }
  return activity;
}

std::vector<VisitRecord> generate_visits(const MobilityConfig& config) {
  config.validate();
  Rng rng(config.rng_seed);
  const std::vector<double> activity = person_activity(config);
  const std::vector<double> cdf =
      popularity_cdf(config.n_pois, config.poi_popularity_exponent);

  std::vector<VisitRecord> visits;
  std::vector<VisitRecord> person_day;
  for (int day = 0; day < config.horizon_days; ++day) {
    for (PersonId person = 0; person < config.n_people; ++person) {
      const int count = rng.poisson(config.visits_per_person_per_day * activity[person]);
      person_day.clear();
      for (int i = 0; i < count; ++i) {
        const double u = rng.uniform();
        const auto poi = static_cast<PoiId>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        const int hour = static_cast<int>(rng.below(kHoursPerDay));
        person_day.push_back({person, std::min(poi, config.n_pois - 1), day,
                              hour});
      }
      std::sort(person_day.begin(), person_day.end(),
                [](const VisitRecord& a, const VisitRecord& b) {
                  return std::tie(a.hour, a.poi_id) < std::tie(b.hour, b.poi_id);
                });
      const auto last = std::unique(person_day.begin(), person_day.end());
      visits.insert(visits.end(), person_day.begin(), last);
    }
  }
  return visits;
}

void validate_visits(std::span<const VisitRecord> visits) {
  std::vector<VisitRecord> sorted(visits.begin(), visits.end());
  for (const VisitRecord& v : sorted) {
    if (v.device_id < 0 || v.poi_id < 0 || v.day < 0) {
      throw ValidationError("negative id or day in visit record");
    }
    if (v.hour < 0 || v.hour >= kHoursPerDay) {
      throw ValidationError("hour " + std::to_string(v.hour) +
                            " outside [0, 23]");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw ValidationError(
        "duplicate visit (" + std::to_string(dup->device_id) + "," +
        std::to_string(dup->poi_id) + "," + std::to_string(dup->day) + "," +
        std::to_string(dup->hour) + ")");
  }
}

std::vector<VisitRecord> parse_visits(std::istream& in,
                                      std::string_view source) {
  CsvReader reader(in, std::string(source), kVisitHeader);
  std::vector<VisitRecord> visits;
  while (reader.next()) {
    VisitRecord v;
    v.device_id = static_cast<PersonId>(reader.integer(0));
    v.poi_id = static_cast<PoiId>(reader.integer(1));
    v.day = static_cast<int>(reader.integer(2));
    v.hour = static_cast<int>(reader.integer(3));
    if (v.device_id < 0 || v.poi_id < 0 || v.day < 0) {
      reader.fail("ids and day must be non-negative");
    }
    if (v.hour < 0 || v.hour >= kHoursPerDay) {
      reader.fail("hour must be in [0, 23]");
    }
    visits.push_back(v);
  }
  validate_visits(visits);
  return visits;
}

std::vector<VisitRecord> read_visits(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PrerequisiteError("cannot open visit file " + path.string());
  return parse_visits(in, path.string());
}

void write_visits(std::ostream& out, std::span<const VisitRecord> visits,
                  std::string_view comment) {
  write_comment(out, comment);
  out << kVisitHeader << '\n';
  for (const VisitRecord& v : visits) {
    out << v.device_id << ',' << v.poi_id << ',' << v.day << ',' << v.hour
        << '\n';
  }
}

std::vector<VisitRecord> slice_days(std::span<const VisitRecord> visits,
                                    int begin_day, int end_day) {
  std::vector<VisitRecord> out;
  for (VisitRecord v : visits) {
    if (v.day < begin_day || v.day >= end_day) continue;
    v.day -= begin_day;
    out.push_back(v);
  }
  return out;
}

int population_of(std::span<const VisitRecord> visits) {
  int n = 0;
  for (const VisitRecord& v : visits) n = std::max(n, v.device_id + 1);
  return n;
}

}  // namespace tracenet
