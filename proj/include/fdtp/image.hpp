#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fdtp {

/// Single-channel image of doubles, row-major. Sensor data is kept in
/// linear units normalized to [0, 1] full scale.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0)
      : width_(width), height_(height) {
    if (width < 0 || height < 0) throw std::invalid_argument("Image: negative size");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  double& operator()(int row, int col) { return data_[index(row, col)]; }
  double operator()(int row, int col) const { return data_[index(row, col)]; }

  bool contains(int row, int col) const {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

}  // namespace fdtp
