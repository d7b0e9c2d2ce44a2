#pragma once

// Sequence data: DAVIS-layout loading, scribble files and synthetic scenes.
//
// Layout under a dataset root:
//   JPEGImages/<res>/<seq>/00000.jpg ...
//   Annotations/<res>/<seq>/00000.png ...  (palette index == object id)
//   Scribbles/<seq>/001.json              (optional)

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivos/image_io.hpp"
#include "ivos/robot.hpp"

namespace ivos {

inline constexpr std::string_view kDefaultResolution = "480p";

class SequenceDataset {
 public:
  std::string name;
  std::vector<LabelMask> annotations;
  std::vector<int> object_ids;  // ascending, background excluded
  std::optional<ScribbleFrames> scribbles;

  int frame_count() const { return static_cast<int>(annotations.size()); }

  // Frames are either in memory or decoded on first access. Not thread-safe;
  // a dataset belongs to one worker at a time.
  void set_frame_paths(std::vector<std::filesystem::path> paths);
  void set_frames(std::vector<Image> frames);
  const std::vector<std::filesystem::path>& frame_paths() const { return frame_paths_; }
  bool has_frames() const { return !frame_paths_.empty() || !frames_.empty(); }
  const Image* frame(int index) const;

  // Non-owning view for the engine; the dataset must outlive it.
  SequenceView view() const;

 private:
  std::vector<std::filesystem::path> frame_paths_;
  mutable std::vector<std::optional<Image>> frames_;
};

// Sorted union of nonzero labels.
std::vector<int> collect_object_ids(const std::vector<LabelMask>& annotations);

// Empty `names` loads every sequence found under Annotations/<res>.
std::vector<SequenceDataset> load_dataset(const std::filesystem::path& root,
                                          const std::vector<std::string>& names,
                                          std::string_view resolution = kDefaultResolution);

// Annotations only, for scoring predictions written in the same layout.
std::vector<LabelMask> load_annotations(const std::filesystem::path& dir);

struct ScribbleFile {
  std::string sequence;
  ScribbleFrames frames;
};

// Normalised coordinates map to pixels as floor(v * (dim - 1) + 0.5).
ScribbleFile load_scribbles(const std::filesystem::path& path, int width, int height,
                            const std::vector<int>& object_ids);

struct SyntheticShape {
  enum class Kind { rectangle, ellipse };
  int id = 1;
  Kind kind = Kind::rectangle;
  // Rectangle: top-left corner and size. Ellipse: centre and radii.
  double x = 0.0;
  double y = 0.0;
  double width = 1.0;
  double height = 1.0;
  double vx = 0.0;  // pixels per frame
  double vy = 0.0;
  struct Jump {
    int frame = 0;
    double dx = 0.0;
    double dy = 0.0;
  };
  std::vector<Jump> jumps;  // offsets applied from `frame` onward
  std::array<std::uint8_t, 3> color{255, 255, 255};
};

struct SyntheticSpec {
  std::string name = "synthetic";
  int width = 64;
  int height = 48;
  int frames = 10;
  std::uint64_t seed = 0;
  int noise = 0;  // per-channel pixel noise amplitude
  std::array<std::uint8_t, 3> background{0, 0, 0};
  std::vector<SyntheticShape> objects;
};

SyntheticSpec parse_synthetic_spec(std::string_view json_text);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

// Throws std::invalid_argument on duplicate ids or shapes that overlap in any
// frame.
SequenceDataset generate_synthetic(const SyntheticSpec& spec);

// Writes frames as JPEG and annotations as palette PNG in the DAVIS layout.
void write_dataset(const SequenceDataset& dataset, const std::filesystem::path& root,
                   std::string_view resolution = kDefaultResolution);

}  // namespace ivos
