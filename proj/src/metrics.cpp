#include "ivos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ivos/kernels.hpp"

namespace ivos {
namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": mask dimensions differ (" +
                                std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                " vs " + std::to_string(b.width()) + "x" +
                                std::to_string(b.height()) + ")");
  }
}

void require_timestamps(const RoundCurve& curve) {
  if (!curve.has_timestamps()) {
    throw std::invalid_argument("time-based metric needs wall-clock timestamps on every sample");
  }
}

}  // namespace

double jaccard(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt, "jaccard");
  const auto counts = kernels::overlap(pred.values(), gt.values());
  if (counts.union_count == 0) return 1.0;
  return static_cast<double>(counts.intersection) / static_cast<double>(counts.union_count);
}

double boundary_f(const BinaryMask& pred, const BinaryMask& gt, int tolerance) {
  require_same_shape(pred, gt, "boundary_f");
  if (tolerance < 0) throw std::invalid_argument("boundary_f: tolerance must be >= 0");
  const BinaryMask pred_edges = boundary(pred);
  const BinaryMask gt_edges = boundary(gt);
  const std::size_t n_pred = count(pred_edges);
  const std::size_t n_gt = count(gt_edges);
  if (n_pred == 0 && n_gt == 0) return 1.0;
  if (n_pred == 0 || n_gt == 0) return 0.0;

  const BinaryMask gt_zone = dilate(gt_edges, tolerance);
  const BinaryMask pred_zone = dilate(pred_edges, tolerance);
  const auto pred_hits = kernels::overlap(pred_edges.values(), gt_zone.values()).intersection;
  const auto gt_hits = kernels::overlap(gt_edges.values(), pred_zone.values()).intersection;
  const double precision = static_cast<double>(pred_hits) / static_cast<double>(n_pred);
  const double recall = static_cast<double>(gt_hits) / static_cast<double>(n_gt);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

int default_boundary_tolerance(int width, int height) {
  return static_cast<int>(std::lround(0.008 * std::hypot(width, height)));
}

double FrameScore::mean_jf() const {
  if (per_object.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& [id, score] : per_object) sum += score.jf;
  return sum / static_cast<double>(per_object.size());
}

FrameScore frame_score(const LabelMask& pred, const LabelMask& gt, std::span<const int> objects,
                       int tolerance, int frame_index) {
  if (!pred.same_shape(gt)) throw std::invalid_argument("frame_score: mask dimensions differ");
  if (objects.empty()) throw std::invalid_argument("frame_score: no objects to score");
  FrameScore out;
  out.frame_index = frame_index;
  for (int id : objects) {
    const BinaryMask p = binary_of(pred, id);
    const BinaryMask g = binary_of(gt, id);
    ObjectScore s;
    s.j = jaccard(p, g);
    s.f = boundary_f(p, g, tolerance);
    s.jf = (s.j + s.f) / 2.0;
    out.per_object[id] = s;
  }
  return out;
}

RoundCurve::RoundCurve(std::vector<CurveSample> samples) {
  for (auto& s : samples) append(s);
}

void RoundCurve::append(CurveSample sample) {
  if (samples_.empty() ? sample.round != 1 : sample.round <= samples_.back().round) {
    throw std::invalid_argument("round curve: rounds must start at 1 and strictly increase");
  }
  if (!(sample.global_jf >= 0.0 && sample.global_jf <= 1.0)) {
    throw std::invalid_argument("round curve: J&F outside [0, 1]");
  }
  if (sample.wall_clock_seconds && *sample.wall_clock_seconds < 0.0) {
    throw std::invalid_argument("round curve: negative timestamp");
  }
  samples_.push_back(sample);
}

bool RoundCurve::has_timestamps() const {
  return !samples_.empty() && std::all_of(samples_.begin(), samples_.end(), [](const auto& s) {
    return s.wall_clock_seconds.has_value();
  });
}

double RoundCurve::value_at_round(int round) const {
  double value = 0.0;
  for (const auto& s : samples_) {
    if (s.round > round) break;
    value = s.global_jf;
  }
  return value;
}

double r_auc(const RoundCurve& curve, int r_max) {
  if (curve.empty()) throw std::invalid_argument("r_auc: empty curve");
  if (r_max < 1) throw std::invalid_argument("r_auc: r_max must be >= 1");
  if (curve.samples().back().round > r_max) {
    throw std::invalid_argument("r_auc: curve has rounds beyond r_max");
  }
  // Mean written as offset + mean deviation so a constant curve returns its
  // value bit-exactly.
  const double base = curve.samples().front().global_jf;
  double deviation = 0.0;
  double carry = 0.0;  // Neumaier compensation
  for (int r = 1; r <= r_max; ++r) {
    const double term = curve.value_at_round(r) - base;
    const double t = deviation + term;
    carry += std::abs(deviation) >= std::abs(term) ? (deviation - t) + term : (term - t) + deviation;
    deviation = t;
  }
  return base + (deviation + carry) / static_cast<double>(r_max);
}

double auc_time(const RoundCurve& curve, double budget_seconds) {
  require_timestamps(curve);
  if (!(budget_seconds > 0.0)) throw std::invalid_argument("auc_time: budget must be positive");
  const auto& s = curve.samples();
  double peak = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0 && !(*s[i].wall_clock_seconds > *s[i - 1].wall_clock_seconds)) {
      throw std::invalid_argument("auc_time: timestamps must strictly increase");
    }
    peak = std::max(peak, s[i].global_jf);
  }
  double area = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double start = *s[i].wall_clock_seconds;
    if (start >= budget_seconds) break;
    const double end =
        i + 1 < s.size() ? std::min(*s[i + 1].wall_clock_seconds, budget_seconds) : budget_seconds;
    area += s[i].global_jf * ((end - start) / budget_seconds);
  }
  return std::clamp(area, 0.0, peak);
}

double jf_at(const RoundCurve& curve, double seconds) {
  require_timestamps(curve);
  double value = 0.0;
  for (const auto& s : curve.samples()) {
    if (*s.wall_clock_seconds > seconds) break;
    value = s.global_jf;
  }
  return value;
}

}  // namespace ivos
