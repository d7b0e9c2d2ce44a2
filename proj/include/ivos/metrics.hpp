#pragma once

// Region similarity (J), contour accuracy (F), their mean (J&F) and the
// curve integrals used to summarise an interactive session: the round-based
// R-AUC and the wall-clock based AUC / J&F@t.

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ivos/mask.hpp"

namespace ivos {

/// Intersection over union. Both masks empty scores 1.
double jaccard(const BinaryMask& pred, const BinaryMask& gt);

/// Boundary F-measure: boundary pixels match when a boundary pixel of the
/// other mask lies within `tolerance` (Chebyshev). Both boundaries empty
/// scores 1; exactly one empty scores 0.
double boundary_f(const BinaryMask& pred, const BinaryMask& gt, int tolerance);

/// round(0.008 * frame diagonal), the usual DAVIS contour tolerance.
int default_boundary_tolerance(int width, int height);

struct ObjectScore {
  double j = 0.0;
  double f = 0.0;
  double jf = 0.0;

  friend bool operator==(const ObjectScore&, const ObjectScore&) = default;
};

struct FrameScore {
  int frame_index = 0;
  std::map<int, ObjectScore> per_object;

  double mean_jf() const;
  friend bool operator==(const FrameScore&, const FrameScore&) = default;
};

FrameScore frame_score(const LabelMask& pred, const LabelMask& gt, std::span<const int> objects,
                       int tolerance, int frame_index = 0);

struct CurveSample {
  int round = 1;
  double global_jf = 0.0;
  std::optional<double> wall_clock_seconds;

  friend bool operator==(const CurveSample&, const CurveSample&) = default;
};

// Per-round global J&F. Rounds are 1-based and strictly increasing.
class RoundCurve {
 public:
  RoundCurve() = default;
  explicit RoundCurve(std::vector<CurveSample> samples);

  void append(CurveSample sample);
  const std::vector<CurveSample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  bool has_timestamps() const;

  // Value at round r with the last sample held; 0 before the first sample.
  double value_at_round(int round) const;

  friend bool operator==(const RoundCurve&, const RoundCurve&) = default;

 private:
  std::vector<CurveSample> samples_;
};

/// Area under the J&F-versus-round curve, normalised to [0, 1]: the curve is
/// extended to r_max by holding its last sample and averaged over rounds
/// 1..r_max. Independent of any timestamps the curve carries.
double r_auc(const RoundCurve& curve, int r_max);

/// Time-based AUC over [0, budget_seconds] of the step function that is 0
/// before the first sample and holds each sample until the next.
double auc_time(const RoundCurve& curve, double budget_seconds);

/// Value of that step function at time t.
double jf_at(const RoundCurve& curve, double seconds);

}  // namespace ivos
