#include "ivos/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace ivos {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_file(const std::filesystem::path& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw LoadError(path.string() + ": cannot open for " +
                    (mode[0] == 'r' ? "reading" : "writing"));
  }
  return f;
}

// libpng and libjpeg report errors through callbacks; both are turned into
// exceptions carrying the file name.
struct PngContext {
  std::string file;
};

[[noreturn]] void png_fail(png_structp png, png_const_charp message) {
  const auto* ctx = static_cast<const PngContext*>(png_get_error_ptr(png));
  throw LoadError(ctx->file + ": " + message);
}

void png_warn(png_structp, png_const_charp) {}

// Label colours in the usual VOC/DAVIS style: bits of the index spread over
// the high bits of R, G and B.
std::vector<png_color> label_palette() {
  std::vector<png_color> palette(256);
  for (int i = 0; i < 256; ++i) {
    int r = 0, g = 0, b = 0, c = i;
    for (int j = 0; j < 8; ++j) {
      r |= ((c >> 0) & 1) << (7 - j);
      g |= ((c >> 1) & 1) << (7 - j);
      b |= ((c >> 2) & 1) << (7 - j);
      c >>= 3;
    }
    palette[i] = {static_cast<png_byte>(r), static_cast<png_byte>(g), static_cast<png_byte>(b)};
  }
  return palette;
}

}  // namespace

LabelMask read_label_png(const std::filesystem::path& path) {
  File file = open_file(path, "rb");
  PngContext ctx{path.string()};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx, png_fail, png_warn);
  if (!png) throw LoadError(ctx.file + ": out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (!info) throw LoadError(ctx.file + ": out of memory");

  png_init_io(png, file.get());
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type != PNG_COLOR_TYPE_PALETTE) {
    throw LoadError(ctx.file + ": annotation is not an indexed-palette PNG");
  }
  if (bit_depth < 8) png_set_packing(png);
  if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) png_set_interlace_handling(png);
  png_read_update_info(png, info);

  LabelMask labels(static_cast<int>(width), static_cast<int>(height));
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = labels.row(static_cast<int>(y)).data();
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return labels;
}

void write_label_png(const std::filesystem::path& path, const LabelMask& labels) {
  File file = open_file(path, "wb");
  PngContext ctx{path.string()};
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx, png_fail, png_warn);
  if (!png) throw LoadError(ctx.file + ": out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (!info) throw LoadError(ctx.file + ": out of memory");

  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(labels.width()),
               static_cast<png_uint_32>(labels.height()), 8, PNG_COLOR_TYPE_PALETTE,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  const auto palette = label_palette();
  png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
  png_write_info(png, info);
  for (int y = 0; y < labels.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(labels.row(y).data()));
  }
  png_write_end(png, nullptr);
}

namespace {

struct JpegError {
  jpeg_error_mgr base;
  std::string file;
};

[[noreturn]] void jpeg_fail(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  char message[JMSG_LENGTH_MAX];
  (*cinfo->err->format_message)(cinfo, message);
  throw LoadError(err->file + ": " + message);
}

}  // namespace

Image read_jpeg(const std::filesystem::path& path) {
  File file = open_file(path, "rb");
  jpeg_decompress_struct cinfo{};
  JpegError err;
  err.file = path.string();
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_fail;
  jpeg_create_decompress(&cinfo);
  struct Guard {
    jpeg_decompress_struct* c;
    ~Guard() { jpeg_destroy_decompress(c); }
  } guard{&cinfo};

  jpeg_stdio_src(&cinfo, file.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  Image image;
  image.width = static_cast<int>(cinfo.output_width);
  image.height = static_cast<int>(cinfo.output_height);
  image.rgb.resize(static_cast<std::size_t>(image.width) * image.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = image.rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * image.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  return image;
}

void write_jpeg(const std::filesystem::path& path, const Image& image, int quality) {
  if (image.width < 1 || image.height < 1 ||
      image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw std::invalid_argument("write_jpeg: malformed image");
  }
  File file = open_file(path, "wb");
  jpeg_compress_struct cinfo{};
  JpegError err;
  err.file = path.string();
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_fail;
  jpeg_create_compress(&cinfo);
  struct Guard {
    jpeg_compress_struct* c;
    ~Guard() { jpeg_destroy_compress(c); }
  } guard{&cinfo};

  jpeg_stdio_dest(&cinfo, file.get());
  cinfo.image_width = static_cast<JDIMENSION>(image.width);
  cinfo.image_height = static_cast<JDIMENSION>(image.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(image.rgb.data() +
                                        static_cast<std::size_t>(cinfo.next_scanline) * image.width * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
}

}  // namespace ivos
