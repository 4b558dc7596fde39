#include "nanoexplore/detection.hpp"

#include <cmath>
#include <stdexcept>

namespace nanoexplore {

DetectorModel ssd_1_0() { return {"ssd-1.0", 1.6, 0.50, 4.7, 534.0}; }
DetectorModel ssd_0_75() { return {"ssd-0.75", 2.3, 0.48, 2.7, 358.0}; }
DetectorModel ssd_0_5() { return {"ssd-0.5", 4.3, 0.32, 1.2, 193.0}; }

const std::vector<DetectorModel>& detector_catalog() {
  static const std::vector<DetectorModel> catalog{ssd_1_0(), ssd_0_75(), ssd_0_5()};
  return catalog;
}

DetectorModel detector_from_token(std::string_view token) {
  for (const DetectorModel& m : detector_catalog()) {
    if (m.name == token) return m;
  }
  throw std::invalid_argument("unknown detector '" + std::string(token) +
                              "' (valid: ssd-1.0, ssd-0.75, ssd-0.5, none)");
}

void validate(const DetectorModel& model) {
  if (!(std::isfinite(model.fps) && model.fps > 0.0)) throw std::invalid_argument("detector.fps must be > 0");
  if (!(model.p_detect >= 0.0 && model.p_detect <= 1.0)) {
    throw std::invalid_argument("detector.p_detect must lie in [0, 1]");
  }
}

bool inference_due(const DetectorModel& model, double t, double last_fire) {
  return t - last_fire >= 1.0 / model.fps - 1e-9;
}

double frame_instant(const DetectorModel& model, long long n) { return static_cast<double>(n) / model.fps; }

DetectionLedger attempt_detection(const DetectorModel& model, const std::vector<int>& visible,
                                  DetectionLedger ledger, double t, Rng& rng) {
  ++ledger.frames_fired;
  if (!visible.empty()) ++ledger.frames_with_target;
  for (int id : visible) {
    if (ledger.first_seen.contains(id)) continue;
    if (rng.bernoulli(model.p_detect)) {
      ledger.first_seen.emplace(id, t);
      ledger.order.push_back(id);
    }
  }
  return ledger;
}

double detection_rate(const DetectionLedger& ledger, std::size_t total_objects) {
  if (total_objects == 0) throw std::invalid_argument("detection rate is undefined for an arena without objects");
  return static_cast<double>(ledger.first_seen.size()) / static_cast<double>(total_objects);
}

}  // namespace nanoexplore
