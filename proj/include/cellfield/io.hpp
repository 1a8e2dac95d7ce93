#pragma once

#include "cellfield/image.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cellfield {

namespace fs = std::filesystem;

/// Reads a single-channel 8- or 16-bit PNG; pixel values become instance ids.
LabelImage read_label_png(const fs::path& path);
/// Writes a 16-bit grayscale PNG. Throws if an id does not fit in 16 bits.
void write_label_png(const fs::path& path, const LabelImage& labels);

Image<std::uint8_t> read_gray8_png(const fs::path& path);
void write_gray8_png(const fs::path& path, const Image<std::uint8_t>& image);
/// `rgb` is interleaved, row-major, 3 bytes per pixel.
void write_rgb8_png(const fs::path& path, int width, int height, const std::vector<std::uint8_t>& rgb);

/// "FMAP" + u32 width + u32 height + row-major float32, all little-endian.
void write_fmap(std::ostream& out, const Field<float>& field);
Field<float> read_fmap(std::istream& in, const std::string& name = "<stream>");
void write_fmap(const fs::path& path, const Field<float>& field);
void write_fmap(const fs::path& path, const FieldMap& field);
Field<float> read_fmap(const fs::path& path);

/// value * 255, clamped to [0, 255].
Image<std::uint8_t> field_to_gray8(const FieldMap& field);
/// Deterministic pseudo-color per instance; background black.
std::vector<std::uint8_t> colorize_labels(const LabelImage& labels);

/// Writes through a temporary sibling file and renames it into place.
void write_atomically(const fs::path& path, const std::function<void(const fs::path&)>& writer);

/// Regular files in `dir` with the given extension, sorted by name.
std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension);

}  // namespace cellfield
