#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "ivos/dataset.hpp"
#include "json.hpp"

namespace ivos {
namespace {

using nlohmann::json;

std::array<std::uint8_t, 3> parse_color(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument(std::string(what) + ": expected [r, g, b]");
  std::array<std::uint8_t, 3> c{};
  for (int k = 0; k < 3; ++k) {
    const int v = j[k].get<int>();
    if (v < 0 || v > 255) throw std::invalid_argument(std::string(what) + ": channel outside 0..255");
    c[k] = static_cast<std::uint8_t>(v);
  }
  return c;
}

std::array<std::uint8_t, 3> default_color(int id) {
  return {static_cast<std::uint8_t>(60 + (id * 73) % 196),
          static_cast<std::uint8_t>(60 + (id * 151) % 196),
          static_cast<std::uint8_t>(60 + (id * 199) % 196)};
}

SyntheticShape parse_shape(const json& j) {
  SyntheticShape s;
  s.id = j.at("id").get<int>();
  const std::string kind = j.value("shape", std::string("rectangle"));
  if (kind == "rectangle" || kind == "rect") {
    s.kind = SyntheticShape::Kind::rectangle;
    s.x = j.at("x").get<double>();
    s.y = j.at("y").get<double>();
    s.width = j.at("width").get<double>();
    s.height = j.at("height").get<double>();
  } else if (kind == "ellipse") {
    s.kind = SyntheticShape::Kind::ellipse;
    s.x = j.at("cx").get<double>();
    s.y = j.at("cy").get<double>();
    s.width = j.at("rx").get<double>();
    s.height = j.at("ry").get<double>();
  } else {
    throw std::invalid_argument("synthetic spec: unknown shape '" + kind + "'");
  }
  if (j.contains("velocity")) {
    const auto& v = j["velocity"];
    if (!v.is_array() || v.size() != 2) throw std::invalid_argument("synthetic spec: velocity must be [vx, vy]");
    s.vx = v[0].get<double>();
    s.vy = v[1].get<double>();
  }
  if (j.contains("jumps")) {
    for (const auto& jump : j["jumps"]) {
      s.jumps.push_back({jump.at("frame").get<int>(), jump.value("dx", 0.0), jump.value("dy", 0.0)});
    }
  }
  s.color = j.contains("color") ? parse_color(j["color"], "object color") : default_color(s.id);
  return s;
}

}  // namespace

SyntheticSpec parse_synthetic_spec(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
    SyntheticSpec spec;
    spec.name = j.value("name", spec.name);
    spec.width = j.at("width").get<int>();
    spec.height = j.at("height").get<int>();
    spec.frames = j.at("frames").get<int>();
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.noise = j.value("noise", 0);
    if (j.contains("background")) spec.background = parse_color(j["background"], "background");
    for (const auto& o : j.at("objects")) spec.objects.push_back(parse_shape(o));
    return spec;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("synthetic spec: ") + e.what());
  }
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_synthetic_spec(buf.str());
  } catch (const std::invalid_argument& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

SequenceDataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.width < 1 || spec.height < 1 || spec.frames < 1) {
    throw std::invalid_argument("synthetic spec: width, height and frames must be positive");
  }
  if (spec.noise < 0 || spec.noise > 255) throw std::invalid_argument("synthetic spec: noise outside 0..255");
  std::set<int> ids;
  for (const auto& s : spec.objects) {
    if (s.id < 1 || s.id > kMaxObjectId) throw std::invalid_argument("synthetic spec: object id outside 1..255");
    if (!ids.insert(s.id).second) {
      throw std::invalid_argument("synthetic spec: duplicate object id " + std::to_string(s.id));
    }
    if (!(s.width > 0.0 && s.height > 0.0)) throw std::invalid_argument("synthetic spec: shape size must be positive");
  }

  SequenceDataset out;
  out.name = spec.name;
  std::vector<Image> frames;
  std::mt19937_64 rng(spec.seed);
  for (int t = 0; t < spec.frames; ++t) {
    LabelMask labels(spec.width, spec.height);
    Image image{spec.width, spec.height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(spec.width) * spec.height * 3)};
    for (std::size_t i = 0; i < image.rgb.size(); i += 3) {
      std::copy(spec.background.begin(), spec.background.end(), image.rgb.begin() + i);
    }
    for (const auto& s : spec.objects) {
      double dx = s.vx * t;
      double dy = s.vy * t;
      for (const auto& j : s.jumps) {
        if (t >= j.frame) {
          dx += j.dx;
          dy += j.dy;
        }
      }
      auto paint = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= spec.width || y >= spec.height) return;
        if (labels(x, y) != 0 && labels(x, y) != s.id) {
          throw std::invalid_argument("synthetic spec: objects " + std::to_string(labels(x, y)) +
                                      " and " + std::to_string(s.id) + " overlap in frame " +
                                      std::to_string(t));
        }
        labels(x, y) = static_cast<std::uint8_t>(s.id);
        std::uint8_t* px = image.rgb.data() + 3 * (static_cast<std::size_t>(y) * spec.width + x);
        std::copy(s.color.begin(), s.color.end(), px);
      };
      if (s.kind == SyntheticShape::Kind::rectangle) {
        const int x0 = static_cast<int>(std::floor(s.x + dx + 0.5));
        const int y0 = static_cast<int>(std::floor(s.y + dy + 0.5));
        const int w = static_cast<int>(std::floor(s.width + 0.5));
        const int h = static_cast<int>(std::floor(s.height + 0.5));
        for (int y = y0; y < y0 + h; ++y) {
          for (int x = x0; x < x0 + w; ++x) paint(x, y);
        }
      } else {
        const double cx = s.x + dx;
        const double cy = s.y + dy;
        for (int y = 0; y < spec.height; ++y) {
          for (int x = 0; x < spec.width; ++x) {
            const double u = (x - cx) / s.width;
            const double v = (y - cy) / s.height;
            if (u * u + v * v <= 1.0) paint(x, y);
          }
        }
      }
    }
    if (spec.noise > 0) {
      const auto span = static_cast<std::uint64_t>(2 * spec.noise + 1);
      for (auto& c : image.rgb) {
        const int v = int{c} + static_cast<int>(rng() % span) - spec.noise;
        c = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
      }
    }
    out.annotations.push_back(std::move(labels));
    frames.push_back(std::move(image));
  }
  out.object_ids.assign(ids.begin(), ids.end());
  out.set_frames(std::move(frames));
  return out;
}

}  // namespace ivos
