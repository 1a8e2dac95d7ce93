#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>

namespace cellfield {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Label = std::int32_t;

struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(Pixel, Pixel) = default;
  // Raster order: row-major, top to bottom.
  friend bool operator<(Pixel a, Pixel b) {
    return std::tie(a.y, a.x) < std::tie(b.y, b.x);
  }
};

/// Row-major raster of `T`. Storage is an Eigen array with height rows and
/// width columns, so `array()` takes part in Eigen expressions directly.
template <typename T>
class Image {
 public:
  using Scalar = T;
  using Storage = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Image() = default;

  Image(int width, int height, T fill = T{}) {
    if (width < 1 || height < 1) {
      throw Error("image dimensions must be positive, got " + std::to_string(width) + "x" +
                  std::to_string(height));
    }
    data_.setConstant(height, width, fill);
  }

  explicit Image(Storage data) : data_(std::move(data)) {
    if (data_.rows() < 1 || data_.cols() < 1) throw Error("image dimensions must be positive");
  }

  int width() const { return static_cast<int>(data_.cols()); }
  int height() const { return static_cast<int>(data_.rows()); }
  Eigen::Index size() const { return data_.size(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width() && y < height(); }
  bool contains(Pixel p) const { return contains(p.x, p.y); }

  T& operator()(int x, int y) { return data_(y, x); }
  const T& operator()(int x, int y) const { return data_(y, x); }
  T& operator[](Pixel p) { return data_(p.y, p.x); }
  const T& operator[](Pixel p) const { return data_(p.y, p.x); }

  // Flat row-major access.
  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  Storage& array() { return data_; }
  const Storage& array() const { return data_; }

  template <typename U>
  Image<U> cast() const {
    return Image<U>(data_.template cast<U>().eval());
  }

  bool same_shape(const auto& other) const {
    return width() == other.width() && height() == other.height();
  }

  friend bool operator==(const Image& a, const Image& b) {
    return a.same_shape(b) && (a.data_ == b.data_).all();
  }

 private:
  Storage data_;
};

using LabelImage = Image<Label>;
using Mask = Image<bool>;

template <typename Scalar = double>
using Field = Image<Scalar>;
using FieldMap = Field<double>;

/// The 8 symmetries of the square grid: optional transpose followed by
/// optional horizontal and vertical flips.
struct GridSymmetry {
  bool transpose = false;
  bool flip_x = false;
  bool flip_y = false;

  static constexpr int count = 8;
  static GridSymmetry from_index(int i) { return {(i & 4) != 0, (i & 1) != 0, (i & 2) != 0}; }
};

template <typename T>
Image<T> apply(GridSymmetry s, const Image<T>& in) {
  typename Image<T>::Storage out = in.array();
  if (s.transpose) out = in.array().transpose().eval();
  if (s.flip_x) out = out.rowwise().reverse().eval();
  if (s.flip_y) out = out.colwise().reverse().eval();
  return Image<T>(std::move(out));
}

}  // namespace cellfield
