// Copyright 2026 The sfoa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SFOA_GRID_H_
#define SFOA_GRID_H_

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sfoa {

// Dense frames x bins matrix, row-major (one row per STFT frame).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t frames, std::size_t bins, const T& fill = T{})
      : frames_(frames), bins_(bins), data_(frames * bins, fill) {}

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  std::size_t size() const { return data_.size(); }
  bool SameShape(const auto& other) const {
    return frames_ == other.frames() && bins_ == other.bins();
  }

  T& operator()(std::size_t t, std::size_t k) { return data_[t * bins_ + k]; }
  const T& operator()(std::size_t t, std::size_t k) const {
    return data_[t * bins_ + k];
  }

  std::span<T> row(std::size_t t) { return {data_.data() + t * bins_, bins_}; }
  std::span<const T> row(std::size_t t) const {
    return {data_.data() + t * bins_, bins_};
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<T> data_;
};

using Complex = std::complex<double>;
using ComplexGrid = Grid<Complex>;
using RealGrid = Grid<double>;
using Vec3 = std::array<double, 3>;
using VectorGrid = Grid<Vec3>;

inline double Dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double Norm(const Vec3& a) { return std::sqrt(Dot(a, a)); }

}  // namespace sfoa

#endif  // SFOA_GRID_H_
