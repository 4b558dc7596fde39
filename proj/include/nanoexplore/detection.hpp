#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nanoexplore/random.hpp"

namespace nanoexplore {

// Statistical stand-in for the onboard SSD detector: frames arrive at `fps`
// and each in-view, not-yet-found object is recognised with `p_detect`.
struct DetectorModel {
  std::string name;      // ssd-1.0 | ssd-0.75 | ssd-0.5 | custom
  double fps = 1.6;
  double p_detect = 0.5;  // int8 mAP used as per-frame success probability
  double params_m = 0.0;  // metadata
  double mmacs = 0.0;     // metadata
};

// Stock models: throughput and int8 mAP of the three backbone widths.
DetectorModel ssd_1_0();
DetectorModel ssd_0_75();
DetectorModel ssd_0_5();
const std::vector<DetectorModel>& detector_catalog();

// Accepts ssd-1.0 | ssd-0.75 | ssd-0.5.
DetectorModel detector_from_token(std::string_view token);

void validate(const DetectorModel& model);

struct DetectionLedger {
  std::map<int, double> first_seen;  // object id -> seconds
  std::vector<int> order;            // ids in detection order
  long long frames_fired = 0;
  long long frames_with_target = 0;
};

// t - last_fire >= 1/fps, with a small tolerance for accumulated time.
bool inference_due(const DetectorModel& model, double t, double last_fire);

// Exact instant of the n-th frame (n >= 1).
double frame_instant(const DetectorModel& model, long long n);

// Independent Bernoulli(p_detect) per visible object that is not yet found;
// successes latch at time `t`.
DetectionLedger attempt_detection(const DetectorModel& model, const std::vector<int>& visible,
                                  DetectionLedger ledger, double t, Rng& rng);

// Throws std::invalid_argument when total_objects == 0.
double detection_rate(const DetectionLedger& ledger, std::size_t total_objects);

}  // namespace nanoexplore
