#ifndef TRACENET_MOBILITY_H_
#define TRACENET_MOBILITY_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "tracenet/types.h"

namespace tracenet {

// One device's presence at a venue during one hour bucket of one day.
struct VisitRecord {
  PersonId device_id = 0;
  PoiId poi_id = 0;
  int day = 0;
  int hour = 0;

  friend auto operator<=>(const VisitRecord&, const VisitRecord&) = default;
};

struct MobilityConfig {
  int n_people = 5000;
  int n_pois = 500;
  int horizon_days = 30;
  double visits_per_person_per_day = 1.0;
  // Venue popularity weight of rank k (1-based) is k^-exponent.
  double poi_popularity_exponent = 2.0;
  // 0 keeps every person's daily visit count Poisson(mean). A value > 1 gives
  // each person a fixed activity multiplier drawn from a mean-one Pareto law
  // with this tail index, so counts become Poisson(mean * activity).
  double activity_pareto_shape = 0.0;
  std::uint64_t rng_seed = 0;

  // Throws ConfigError.
  void validate() const;
};

// Synthetic visits: per person-day a Poisson number of visits, venues drawn
// from a Zipf-like popularity law, hours uniform. A person drawing the same
// (venue, hour) twice on one day keeps a single record. Output is ordered by
// (day, device, hour, venue).
std::vector<VisitRecord> generate_visits(const MobilityConfig& config);

// Per-person activity multipliers used by generate_visits (all 1 when
// activity_pareto_shape is 0).
std::vector<double> person_activity(const MobilityConfig& config);

// CSV with header `device_id,poi_id,day,hour`. Leading '#' lines are ignored.
// Throws ParseError on malformed rows and ValidationError on duplicates.
std::vector<VisitRecord> parse_visits(std::istream& in,
                                      std::string_view source = "<visits>");
std::vector<VisitRecord> read_visits(const std::filesystem::path& path);

void write_visits(std::ostream& out, std::span<const VisitRecord> visits,
                  std::string_view comment = {});

// Throws ValidationError if a (device, poi, day, hour) tuple repeats, an hour
// is outside [0, 23], or a day/id is negative.
void validate_visits(std::span<const VisitRecord> visits);

// Visits with day in [begin_day, end_day), re-based so begin_day becomes 0.
std::vector<VisitRecord> slice_days(std::span<const VisitRecord> visits,
                                    int begin_day, int end_day);

// Largest device id + 1 (0 for an empty span).
int population_of(std::span<const VisitRecord> visits);

}  // namespace tracenet

#endif  // TRACENET_MOBILITY_H_
