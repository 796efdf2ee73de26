#include "ucfl/comms.hpp"

namespace ucfl {

void CommSystem::validate() const {
  if (!(uplink_ratio > 0.0)) throw validation_error("comms: uplink ratio must be positive");
  if (!(t_downlink > 0.0)) throw validation_error("comms: downlink time must be positive");
  if (!(t_min >= 0.0)) throw validation_error("comms: minimum compute time must be nonnegative");
  if (!(mean_extra_delay >= 0.0)) throw validation_error("comms: mean extra delay must be nonnegative");
  if (clients < 1) throw validation_error("comms: client count must be positive");
  if (!(ul_multiplier > 0.0)) throw validation_error("comms: uplink multiplier must be positive");
}

double expected_compute_time(const CommSystem& sys) {
  sys.validate();
  double harmonic = 0.0;
  for (int i = 1; i <= sys.clients; ++i) harmonic += 1.0 / static_cast<double>(i);
  return sys.t_min + harmonic * sys.mean_extra_delay;
}

double round_wall_time(const CommSystem& sys, int stream_count) {
  sys.validate();
  if (stream_count < 1 || stream_count > sys.clients)
    throw validation_error("comms: stream count " + std::to_string(stream_count) +
                           " outside [1, " + std::to_string(sys.clients) + "]");
  const double dl = (sys.dl_serialized ? static_cast<double>(stream_count) : 1.0) * sys.t_downlink;
  const double ul = sys.uplink_ratio * sys.t_downlink * sys.ul_multiplier;
  return dl + expected_compute_time(sys) + ul;
}

std::vector<TimelinePoint> rescale_timeline(const std::vector<double>& mean_acc_per_round,
                                            const CommSystem& sys, int stream_count,
                                            double uplink_multiplier) {
  if (mean_acc_per_round.empty())
    throw validation_error("rescale_timeline: need at least one round");
  CommSystem scaled = sys;
  scaled.ul_multiplier = sys.ul_multiplier * uplink_multiplier;
  const double round_time = round_wall_time(scaled, stream_count);

  std::vector<TimelinePoint> out;
  out.reserve(mean_acc_per_round.size());
  for (std::size_t r = 0; r < mean_acc_per_round.size(); ++r)
    out.push_back({static_cast<double>(r) * round_time / sys.t_downlink, mean_acc_per_round[r]});
  return out;
}

}  // namespace ucfl
