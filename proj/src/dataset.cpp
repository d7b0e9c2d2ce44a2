#include "ivos/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ivos {
namespace fs = std::filesystem;

void SequenceDataset::set_frame_paths(std::vector<fs::path> paths) {
  frame_paths_ = std::move(paths);
  frames_.assign(frame_paths_.size(), std::nullopt);
}

void SequenceDataset::set_frames(std::vector<Image> frames) {
  frame_paths_.clear();
  frames_.clear();
  for (auto& f : frames) frames_.emplace_back(std::move(f));
}

const Image* SequenceDataset::frame(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= frames_.size()) return nullptr;
  auto& slot = frames_[index];
  if (!slot) {
    Image image = read_jpeg(frame_paths_[index]);
    const LabelMask& ann = annotations.at(index);
    if (image.width != ann.width() || image.height != ann.height()) {
      throw LoadError(frame_paths_[index].string() + ": frame size differs from its annotation");
    }
    slot = std::move(image);
  }
  return &*slot;
}

SequenceView SequenceDataset::view() const {
  SequenceView v;
  v.ground_truth = annotations;
  v.objects = object_ids;
  if (has_frames()) v.pixels = [this](int i) { return frame(i); };
  return v;
}

std::vector<int> collect_object_ids(const std::vector<LabelMask>& annotations) {
  std::array<bool, 256> seen{};
  for (const auto& a : annotations) {
    for (auto v : a.values()) seen[v] = true;
  }
  std::vector<int> ids;
  for (int i = 1; i < 256; ++i) {
    if (seen[i]) ids.push_back(i);
  }
  return ids;
}

namespace {

// Files with the given extension whose stems are frame numbers, in order.
std::vector<fs::path> numbered_files(const fs::path& dir, std::string_view ext) {
  if (!fs::is_directory(dir)) throw LoadError(dir.string() + ": missing directory");
  std::vector<std::pair<long, fs::path>> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ext) continue;
    const std::string stem = entry.path().stem().string();
    if (stem.empty() || !std::all_of(stem.begin(), stem.end(), [](unsigned char c) {
          return std::isdigit(c);
        })) {
      throw LoadError(entry.path().string() + ": file name is not a frame number");
    }
    found.emplace_back(std::stol(stem), entry.path());
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& [n, p] : found) out.push_back(std::move(p));
  return out;
}

}  // namespace

std::vector<LabelMask> load_annotations(const fs::path& dir) {
  const auto files = numbered_files(dir, ".png");
  if (files.empty()) throw LoadError(dir.string() + ": no annotations");
  std::vector<LabelMask> out;
  for (const auto& f : files) {
    out.push_back(read_label_png(f));
    if (!out.back().same_shape(out.front())) {
      throw LoadError(f.string() + ": annotation size differs from the first frame");
    }
  }
  return out;
}

std::vector<SequenceDataset> load_dataset(const fs::path& root,
                                          const std::vector<std::string>& names,
                                          std::string_view resolution) {
  const fs::path ann_root = root / "Annotations" / resolution;
  const fs::path img_root = root / "JPEGImages" / resolution;
  std::vector<std::string> sequences = names;
  if (sequences.empty()) {
    if (!fs::is_directory(ann_root)) throw LoadError(ann_root.string() + ": missing directory");
    for (const auto& entry : fs::directory_iterator(ann_root)) {
      if (entry.is_directory()) sequences.push_back(entry.path().filename().string());
    }
    std::sort(sequences.begin(), sequences.end());
  }

  std::vector<SequenceDataset> out;
  for (const auto& name : sequences) {
    SequenceDataset seq;
    seq.name = name;
    const auto frames = numbered_files(img_root / name, ".jpg");
    const auto masks = numbered_files(ann_root / name, ".png");
    if (frames.size() != masks.size()) {
      throw LoadError("sequence " + name + ": " + std::to_string(frames.size()) + " frames but " +
                      std::to_string(masks.size()) + " annotations");
    }
    if (frames.empty()) throw LoadError("sequence " + name + ": no frames");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (frames[i].stem() != masks[i].stem()) {
        throw LoadError(masks[i].string() + ": numbering does not match " + frames[i].string());
      }
    }
    seq.annotations = load_annotations(ann_root / name);
    seq.object_ids = collect_object_ids(seq.annotations);
    seq.set_frame_paths(frames);

    const fs::path scribble_dir = root / "Scribbles" / name;
    if (fs::is_directory(scribble_dir)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(scribble_dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      if (!files.empty()) {
        const auto& first = seq.annotations.front();
        seq.scribbles =
            load_scribbles(files.front(), first.width(), first.height(), seq.object_ids).frames;
      }
    }
    out.push_back(std::move(seq));
  }
  return out;
}

ScribbleFile load_scribbles(const fs::path& path, int width, int height,
                            const std::vector<int>& object_ids) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open for reading");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  const std::string file = path.string();
  auto fail = [&](const std::string& where, const std::string& what) -> LoadError {
    return LoadError(file + ": " + where + ": " + what);
  };
  if (!doc.is_object() || !doc.contains("scribbles") || !doc["scribbles"].is_array()) {
    throw fail("top level", "expected an object with a \"scribbles\" array");
  }
  auto to_pixel = [](double v, int dim) {
    return static_cast<int>(std::floor(v * static_cast<double>(dim - 1) + 0.5));
  };

  ScribbleFile out;
  if (doc.contains("sequence") && doc["sequence"].is_string()) out.sequence = doc["sequence"];
  const auto& frames = doc["scribbles"];
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const std::string fwhere = "scribbles[" + std::to_string(f) + "]";
    if (!frames[f].is_array()) throw fail(fwhere, "expected a list");
    std::vector<Scribble> list;
    for (std::size_t k = 0; k < frames[f].size(); ++k) {
      const auto& rec = frames[f][k];
      const std::string where = fwhere + "[" + std::to_string(k) + "]";
      if (!rec.is_object() || !rec.contains("path") || !rec.contains("object_id") ||
          !rec["path"].is_array() || !rec["object_id"].is_number_integer()) {
        throw fail(where, "expected {\"path\": [...], \"object_id\": int}");
      }
      Scribble s;
      s.object_id = rec["object_id"].get<int>();
      s.frame_index = static_cast<int>(f);
      if (s.object_id != 0 &&
          std::find(object_ids.begin(), object_ids.end(), s.object_id) == object_ids.end()) {
        throw fail(where, "unknown object id " + std::to_string(s.object_id));
      }
      const auto& path_points = rec["path"];
      if (path_points.empty()) throw fail(where, "empty path");
      for (std::size_t p = 0; p < path_points.size(); ++p) {
        const auto& pt = path_points[p];
        const std::string pwhere = where + ".path[" + std::to_string(p) + "]";
        if (!pt.is_array() || pt.size() < 2 || !pt[0].is_number() || !pt[1].is_number()) {
          throw fail(pwhere, "expected [x, y]");
        }
        const double x = pt[0].get<double>();
        const double y = pt[1].get<double>();
        if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
          std::ostringstream msg;
          msg << "coordinate (" << x << ", " << y << ") outside [0, 1]";
          throw fail(pwhere, msg.str());
        }
        s.path.push_back({to_pixel(x, width), to_pixel(y, height)});
      }
      list.push_back(std::move(s));
    }
    out.frames.push_back(std::move(list));
  }
  return out;
}

void write_dataset(const SequenceDataset& dataset, const fs::path& root,
                   std::string_view resolution) {
  const fs::path img_dir = root / "JPEGImages" / resolution / dataset.name;
  const fs::path ann_dir = root / "Annotations" / resolution / dataset.name;
  fs::create_directories(img_dir);
  fs::create_directories(ann_dir);
  for (int i = 0; i < dataset.frame_count(); ++i) {
    char stem[16];
    std::snprintf(stem, sizeof stem, "%05d", i);
    write_label_png(ann_dir / (std::string(stem) + ".png"), dataset.annotations[i]);
    const Image* image = dataset.frame(i);
    if (!image) throw std::invalid_argument("write_dataset: sequence has no frame pixels");
    write_jpeg(img_dir / (std::string(stem) + ".jpg"), *image);
  }
}

}  // namespace ivos
