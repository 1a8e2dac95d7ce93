#include "cellfield/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>

namespace cellfield {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error("cannot open " + path.string());
  return f;
}

struct RawPng {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<std::uint8_t> bytes;  // row-major, 16-bit samples big-endian
};

// libpng reports through these instead of printing to stderr.
struct PngMessage {
  char text[160] = "";
};

void on_png_error(png_structp png, png_const_charp message) {
  auto* m = static_cast<PngMessage*>(png_get_error_ptr(png));
  std::snprintf(m->text, sizeof m->text, "%s", message);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// Keeps libpng's longjmp confined to this frame; nothing with a destructor is
// created between setjmp and the libpng calls.
bool read_png_raw(std::FILE* file, RawPng& out, std::string& error) {
  thread_local PngMessage message;
  message.text[0] = '\0';
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, on_png_error, on_png_warning);
  if (!png) {
    error = "out of memory";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    error = "out of memory";
    return false;
  }
  std::vector<png_bytep>* rows = new std::vector<png_bytep>();
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    delete rows;
    error = std::string("corrupt or unsupported PNG (") + message.text + ")";
    return false;
  }
  png_init_io(png, file);
  png_read_info(png, info);
  const png_byte color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  out.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.bytes.resize(stride * static_cast<std::size_t>(out.height));
  rows->resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) (*rows)[y] = out.bytes.data() + stride * y;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  delete rows;
  return true;
}

bool write_png_raw(std::FILE* file, int width, int height, int bit_depth, int color_type,
                   const std::uint8_t* bytes, std::size_t stride, std::string& error) {
  thread_local PngMessage message;
  message.text[0] = '\0';
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, on_png_error, on_png_warning);
  if (!png) {
    error = "out of memory";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    error = "out of memory";
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    error = std::string("PNG encoding failed (") + message.text + ")";
    return false;
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(bytes + stride * static_cast<std::size_t>(y)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

RawPng load_png(const fs::path& path) {
  FilePtr f = open_file(path, "rb");
  RawPng raw;
  std::string error;
  if (!read_png_raw(f.get(), raw, error)) throw Error(path.string() + ": " + error);
  return raw;
}

void save_png(const fs::path& path, int width, int height, int bit_depth, int color_type,
              const std::vector<std::uint8_t>& bytes) {
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t stride = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  write_atomically(path, [&](const fs::path& tmp) {
    FilePtr f = open_file(tmp, "wb");
    std::string error;
    if (!write_png_raw(f.get(), width, height, bit_depth, color_type, bytes.data(), stride, error)) {
      throw Error(path.string() + ": " + error);
    }
  });
}

void put_u32le(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32le(const unsigned char* b) {
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

}  // namespace

LabelImage read_label_png(const fs::path& path) {
  const RawPng raw = load_png(path);
  if (raw.channels != 1) throw Error(path.string() + ": label images must be single-channel");
  LabelImage labels(raw.width, raw.height, 0);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    labels.data()[i] = raw.bit_depth == 16 ? (Label(raw.bytes[2 * k]) << 8) | raw.bytes[2 * k + 1]
                                           : Label(raw.bytes[k]);
  }
  return labels;
}

void write_label_png(const fs::path& path, const LabelImage& labels) {
  if (labels.size() > 0 && (labels.array().minCoeff() < 0 || labels.array().maxCoeff() > 65535)) {
    throw Error(path.string() + ": instance ids must lie in [0, 65535] for 16-bit PNG");
  }
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(labels.size()) * 2);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const auto v = static_cast<std::uint16_t>(labels.data()[i]);
    bytes[2 * static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> 8);
    bytes[2 * static_cast<std::size_t>(i) + 1] = static_cast<std::uint8_t>(v & 0xff);
  }
  save_png(path, labels.width(), labels.height(), 16, PNG_COLOR_TYPE_GRAY, bytes);
}

Image<std::uint8_t> read_gray8_png(const fs::path& path) {
  const RawPng raw = load_png(path);
  if (raw.channels != 1 || raw.bit_depth != 8) {
    throw Error(path.string() + ": expected an 8-bit grayscale PNG");
  }
  Image<std::uint8_t> image(raw.width, raw.height, 0);
  std::copy(raw.bytes.begin(), raw.bytes.end(), image.data());
  return image;
}

void write_gray8_png(const fs::path& path, const Image<std::uint8_t>& image) {
  std::vector<std::uint8_t> bytes(image.data(), image.data() + image.size());
  save_png(path, image.width(), image.height(), 8, PNG_COLOR_TYPE_GRAY, bytes);
}

void write_rgb8_png(const fs::path& path, int width, int height, const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error(path.string() + ": RGB buffer size does not match dimensions");
  }
  save_png(path, width, height, 8, PNG_COLOR_TYPE_RGB, rgb);
}

void write_fmap(std::ostream& out, const Field<float>& field) {
  out.write("FMAP", 4);
  put_u32le(out, static_cast<std::uint32_t>(field.width()));
  put_u32le(out, static_cast<std::uint32_t>(field.height()));
  for (Eigen::Index i = 0; i < field.size(); ++i) put_u32le(out, std::bit_cast<std::uint32_t>(field.data()[i]));
  if (!out) throw Error("failed to write FMAP data");
}

Field<float> read_fmap(std::istream& in, const std::string& name) {
  std::array<unsigned char, 12> header{};
  if (!in.read(reinterpret_cast<char*>(header.data()), 12)) {
    throw Error(name + ": truncated FMAP header");
  }
  if (std::memcmp(header.data(), "FMAP", 4) != 0) throw Error(name + ": bad FMAP magic");
  const std::uint32_t width = get_u32le(header.data() + 4);
  const std::uint32_t height = get_u32le(header.data() + 8);
  if (width == 0 || height == 0 || width > (1u << 16) || height > (1u << 16)) {
    throw Error(name + ": invalid FMAP dimensions " + std::to_string(width) + "x" +
                std::to_string(height));
  }
  const std::size_t count = std::size_t(width) * height;
  std::vector<unsigned char> payload(count * 4);
  if (!in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()))) {
    throw Error(name + ": FMAP payload shorter than " + std::to_string(width) + "x" +
                std::to_string(height) + " floats");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error(name + ": trailing bytes after FMAP payload");
  Field<float> field(static_cast<int>(width), static_cast<int>(height), 0.0f);
  for (std::size_t i = 0; i < count; ++i) {
    const float v = std::bit_cast<float>(get_u32le(payload.data() + 4 * i));
    if (!std::isfinite(v)) throw Error(name + ": non-finite value in FMAP");
    field.data()[i] = v;
  }
  return field;
}

void write_fmap(const fs::path& path, const Field<float>& field) {
  write_atomically(path, [&](const fs::path& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot open " + tmp.string());
    write_fmap(out, field);
  });
}

void write_fmap(const fs::path& path, const FieldMap& field) {
  write_fmap(path, field.cast<float>());
}

Field<float> read_fmap(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_fmap(in, path.string());
}

Image<std::uint8_t> field_to_gray8(const FieldMap& field) {
  return Image<std::uint8_t>(
      (field.array() * 255.0).round().max(0.0).min(255.0).cast<std::uint8_t>().eval());
}

std::vector<std::uint8_t> colorize_labels(const LabelImage& labels) {
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(labels.size()) * 3, 0);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const auto k = static_cast<std::uint32_t>(labels.data()[i]);
    if (k == 0) continue;
    std::uint32_t h = k * 2654435761u;
    h ^= h >> 15;
    for (int c = 0; c < 3; ++c) {
      rgb[3 * static_cast<std::size_t>(i) + c] = static_cast<std::uint8_t>(64 + ((h >> (8 * c)) & 0xff) % 192);
    }
  }
  return rgb;
}

void write_atomically(const fs::path& path, const std::function<void(const fs::path&)>& writer) {
  fs::path tmp = path;
  tmp += ".tmp";
  try {
    writer(tmp);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
  fs::rename(tmp, path);
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension) {
  if (!fs::is_directory(dir)) throw Error(dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cellfield
