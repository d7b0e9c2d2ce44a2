#include "ivos/robot.hpp"

#include <algorithm>
#include <stdexcept>

namespace ivos {

int worst_frame(std::span<const FrameScore> scores) {
  if (scores.empty()) throw std::invalid_argument("worst_frame: no frames");
  std::size_t worst = 0;
  double worst_jf = scores[0].mean_jf();
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const double jf = scores[i].mean_jf();
    if (jf < worst_jf) {
      worst_jf = jf;
      worst = i;
    }
  }
  return static_cast<int>(worst);
}

std::vector<Scribble> synthesize_scribbles(const ErrorRegions& regions, int object_id,
                                           int frame_index, int per_object,
                                           double min_region_area) {
  if (per_object < 1) throw std::invalid_argument("synthesize_scribbles: per_object must be >= 1");
  struct Candidate {
    const Region* region;
    int label;
  };
  std::vector<Candidate> candidates;
  for (const auto& r : regions.false_negatives) candidates.push_back({&r, object_id});
  for (const auto& r : regions.false_positives) candidates.push_back({&r, 0});
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.region->area() != b.region->area()) return a.region->area() > b.region->area();
    const auto& ba = a.region->bounding_box;
    const auto& bb = b.region->bounding_box;
    if (ba.y_min != bb.y_min) return ba.y_min < bb.y_min;
    return ba.x_min < bb.x_min;
  });
  std::vector<Scribble> out;
  for (const auto& c : candidates) {
    if (static_cast<int>(out.size()) >= per_object) break;
    if (static_cast<double>(c.region->area()) < min_region_area) continue;
    const BinaryMask within = mask_of(*c.region, regions.width, regions.height);
    out.push_back({c.label, skeletonize(*c.region, within), frame_index});
  }
  return out;
}

namespace {

std::vector<Click> f3_clicks(const LabelMask& pred, const LabelMask& gt,
                             std::span<const int> objects, int frame, int max_clicks,
                             double min_area) {
  std::vector<Click> out;
  for (int o : objects) {
    const auto clicks = strategy_f3(error_regions(pred, gt, o), o, frame, max_clicks, min_area);
    out.insert(out.end(), clicks.begin(), clicks.end());
  }
  return out;
}

// f1 gives one click per scribble label, f2 one per scribble.
std::vector<Click> scribble_clicks(Strategy strategy, std::span<const Scribble> scribbles,
                                   const LabelMask& pred) {
  std::vector<Click> out;
  if (scribbles.empty()) return out;
  if (strategy == Strategy::f2) return strategy_f2(scribbles, pred);
  std::vector<int> labels;
  for (const auto& s : scribbles) {
    if (std::find(labels.begin(), labels.end(), s.object_id) == labels.end()) {
      labels.push_back(s.object_id);
    }
  }
  for (int label : labels) {
    std::vector<Scribble> group;
    for (const auto& s : scribbles) {
      if (s.object_id == label) group.push_back(s);
    }
    if (auto c = strategy_f1(group, pred)) out.push_back(*c);
  }
  return out;
}

}  // namespace

RoundAnnotation next_annotation(const SessionState& state, const SequenceView& sequence,
                                const RobotConfig& config, const ScribbleFrames* recorded) {
  if (config.budget.max_rounds < 1) throw std::invalid_argument("robot: max_rounds must be >= 1");
  if (config.max_clicks < 1) throw std::invalid_argument("robot: max_clicks must be >= 1");
  if (state.round >= config.budget.max_rounds) {
    throw std::logic_error("robot: round budget exhausted");
  }
  const int n = sequence.frame_count();
  if (n < 1) throw std::invalid_argument("robot: sequence has no frames");
  if (static_cast<int>(state.masks.size()) != n || static_cast<int>(state.scores.size()) != n) {
    throw std::invalid_argument("robot: session state does not match the sequence");
  }

  RoundAnnotation ann;
  ann.round = state.round + 1;
  const double min_area =
      config.min_region_fraction * static_cast<double>(sequence.width()) * sequence.height();
  const int per_object = config.scribbles_per_object > 0 ? config.scribbles_per_object
                                                         : config.max_clicks;
  std::vector<Click> clicks;

  int recorded_frame = -1;
  if (ann.round == 1 && recorded) {
    for (std::size_t f = 0; f < recorded->size() && f < static_cast<std::size_t>(n); ++f) {
      if (!(*recorded)[f].empty()) {
        recorded_frame = static_cast<int>(f);
        break;
      }
    }
  }

  if (recorded_frame >= 0) {
    ann.frame_index = recorded_frame;
    const LabelMask& pred = state.masks[recorded_frame];
    if (config.strategy == Strategy::f3) {
      clicks = f3_clicks(pred, sequence.ground_truth[recorded_frame], sequence.objects,
                         recorded_frame, 1, min_area);
    } else {
      std::vector<Scribble> scribbles = (*recorded)[recorded_frame];
      for (auto& s : scribbles) s.frame_index = recorded_frame;
      clicks = scribble_clicks(config.strategy, scribbles, pred);
    }
  } else if (ann.round == 1) {
    // No recorded scribbles: click the centre of each object's largest part.
    ann.frame_index = worst_frame(state.scores);
    clicks = f3_clicks(state.masks[ann.frame_index], sequence.ground_truth[ann.frame_index],
                       sequence.objects, ann.frame_index, 1, min_area);
  } else {
    const int f = worst_frame(state.scores);
    ann.frame_index = f;
    const LabelMask& pred = state.masks[f];
    const LabelMask& gt = sequence.ground_truth[f];
    if (config.strategy == Strategy::f3) {
      clicks = f3_clicks(pred, gt, sequence.objects, f, config.max_clicks, min_area);
    } else {
      for (int o : sequence.objects) {
        const auto scribbles =
            synthesize_scribbles(error_regions(pred, gt, o), o, f, per_object, min_area);
        if (scribbles.empty()) continue;
        if (config.strategy == Strategy::f1) {
          // One click per object: the label of its largest error region.
          std::vector<Scribble> group;
          for (const auto& s : scribbles) {
            if (s.object_id == scribbles.front().object_id) group.push_back(s);
          }
          if (auto c = strategy_f1(group, pred)) clicks.push_back(*c);
        } else {
          const auto more = strategy_f2(scribbles, pred);
          clicks.insert(clicks.end(), more.begin(), more.end());
        }
      }
    }
  }
  ann.clicks = cap_per_round(clicks, config.max_clicks, ann.round);
  return ann;
}

}  // namespace ivos
