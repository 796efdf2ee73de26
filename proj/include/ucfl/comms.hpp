#pragma once

#include <vector>

#include "ucfl/types.hpp"

namespace ucfl {

// Round-time model for a parameter-server system with asymmetric link rates
// and straggling clients whose compute time is shifted-exponential.
struct CommSystem {
  double uplink_ratio = 4.0;     // rho = T_ul / T_dl
  double t_downlink = 1.0;       // model transmission time on the downlink
  double t_min = 1.0;            // minimum compute time
  double mean_extra_delay = 1.0; // 1/mu; 0 models fully reliable nodes
  int clients = 1;
  bool dl_serialized = true;     // charge one downlink slot per personalized stream
  double ul_multiplier = 1.0;    // models uploaded per client per round

  void validate() const;
};

/// Expected compute time of the slowest of m clients:
/// T_min + H_m / mu with H_m the m-th harmonic number.
double expected_compute_time(const CommSystem& sys);

/// Expected wall time of one round with `stream_count` personalized downlink
/// streams: serialized group broadcasts, the straggler compute term, and one
/// uplink model per client (scaled by the uplink multiplier).
double round_wall_time(const CommSystem& sys, int stream_count);

struct TimelinePoint {
  double t_over_tdl = 0.0;
  double mean_acc = 0.0;
};

/// Accuracy-versus-time curve: round r maps to r * round time / T_dl with the
/// accuracy values untouched.
std::vector<TimelinePoint> rescale_timeline(const std::vector<double>& mean_acc_per_round,
                                            const CommSystem& sys, int stream_count,
                                            double uplink_multiplier = 1.0);

}  // namespace ucfl
