#pragma once

#include <filesystem>
#include <stdexcept>

#include "ivos/image.hpp"
#include "ivos/mask.hpp"

namespace ivos {

// Raised for unreadable or malformed input files; the message names the file.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 8-bit (or packed lower-depth) palette PNG; the palette index is the label.
// Any other colour type is rejected.
LabelMask read_label_png(const std::filesystem::path& path);
void write_label_png(const std::filesystem::path& path, const LabelMask& labels);

Image read_jpeg(const std::filesystem::path& path);
void write_jpeg(const std::filesystem::path& path, const Image& image, int quality = 95);

}  // namespace ivos
