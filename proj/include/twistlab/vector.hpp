#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/error.hpp"

namespace twistlab {

// Finite real sequence of fixed positive dimension. Every constructor and every
// arithmetic result is checked for NaN/inf, so a Vector in hand is always finite.
class Vector {
 public:
  explicit Vector(std::vector<double> entries) : data_(std::move(entries)) { validate(); }
  Vector(std::initializer_list<double> entries) : data_(entries) { validate(); }

  static Vector zeros(std::size_t dim) { return Vector(std::vector<double>(dim, 0.0)); }
  static Vector constant(std::size_t dim, double value) {
    return Vector(std::vector<double>(dim, value));
  }
  static Vector unit(std::size_t dim, std::size_t index) {
    std::vector<double> v(dim, 0.0);
    if (index >= dim) throw InvalidArgument("unit vector index out of range");
    v[index] = 1.0;
    return Vector(std::move(v));
  }
  // n^{-1/2}(1,...,1): unit in l2, the extremal family for log-type maps.
  static Vector uniform(std::size_t dim) {
    return constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  }

  std::size_t dim() const { return data_.size(); }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<const double> entries() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool is_zero() const {
    for (double v : data_)
      if (v != 0.0) return false;
    return true;
  }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  void validate() const {
    if (data_.empty()) throw InvalidArgument("Vector: dimension must be positive");
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!std::isfinite(data_[i]))
        throw InvalidArgument("Vector: non-finite entry at index " + std::to_string(i));
    }
  }

  std::vector<double> data_;
};

inline void require_same_dim(const char* where, const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(where, a.dim(), b.dim());
}

template <class F>
Vector zip_with(const Vector& a, const Vector& b, F&& f) {
  require_same_dim("zip_with", a, b);
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = f(a[i], b[i]);
  return Vector(std::move(out));
}

template <class F>
Vector map_entries(const Vector& a, F&& f) {
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = f(a[i]);
  return Vector(std::move(out));
}

inline Vector operator+(const Vector& a, const Vector& b) {
  return zip_with(a, b, [](double x, double y) { return x + y; });
}
inline Vector operator-(const Vector& a, const Vector& b) {
  return zip_with(a, b, [](double x, double y) { return x - y; });
}
inline Vector operator-(const Vector& a) {
  return map_entries(a, [](double x) { return -x; });
}
inline Vector operator*(double s, const Vector& a) {
  return map_entries(a, [s](double x) { return s * x; });
}
inline Vector hadamard(const Vector& a, const Vector& b) {
  return zip_with(a, b, [](double x, double y) { return x * y; });
}

inline double dot(const Vector& a, const Vector& b) {
  require_same_dim("dot", a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

// Block helpers for ambient spaces realised as tuples of equal-dimension blocks.
inline Vector concat(std::span<const Vector> blocks) {
  std::vector<double> out;
  for (const auto& b : blocks) out.insert(out.end(), b.values().begin(), b.values().end());
  return Vector(std::move(out));
}
inline Vector concat(const Vector& a, const Vector& b) {
  const Vector parts[] = {a, b};
  return concat(parts);
}

inline std::vector<Vector> split_blocks(const Vector& v, std::size_t blocks) {
  if (blocks == 0 || v.dim() % blocks != 0)
    throw InvalidArgument("split_blocks: dimension " + std::to_string(v.dim()) +
                          " is not a multiple of " + std::to_string(blocks));
  const std::size_t n = v.dim() / blocks;
  std::vector<Vector> out;
  out.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    out.emplace_back(std::vector<double>(v.values().begin() + static_cast<std::ptrdiff_t>(b * n),
                                         v.values().begin() + static_cast<std::ptrdiff_t>((b + 1) * n)));
  }
  return out;
}

// max_i |a_i - b_i| / max(|b|_inf, floor)
inline double max_relative_deviation(const Vector& a, const Vector& b, double floor = 1e-300) {
  require_same_dim("max_relative_deviation", a, b);
  double scale = floor, dev = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    dev = std::max(dev, std::abs(a[i] - b[i]));
  }
  return dev / scale;
}

inline double relative_deviation(double a, double b) {
  const double scale = std::max(std::abs(b), 1e-300);
  return std::abs(a - b) / scale;
}

}  // namespace twistlab
