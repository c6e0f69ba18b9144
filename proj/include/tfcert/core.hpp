#pragma once

// Shared value types and error classes for tfcert.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfcert {

using Complex = std::complex<double>;
using Vec = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Malformed arguments: dimension mismatch, bad parameters, duplicate points.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The numerics refuse to produce an answer they cannot back up
/// (missing envelope, non-L2 input, sup that never drops below a bound).
class NumericalRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested evaluation point coincides with a declared singularity.
class SingularityHit : public NumericalRefusal {
 public:
  using NumericalRefusal::NumericalRefusal;
};

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vec operator+(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("vector add: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("vector sub: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator*(double s, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

/// e^{i theta}
inline Complex unit_phase(double theta) { return std::polar(1.0, theta); }

/// A point lambda = (x, omega) of the time-frequency plane R^{2n}.
struct TFPoint {
  Vec x;
  Vec omega;

  TFPoint() = default;
  TFPoint(Vec x_, Vec omega_) : x(std::move(x_)), omega(std::move(omega_)) {
    if (x.size() != omega.size() || x.empty())
      throw InvalidInput("TFPoint: x and omega must have equal nonzero length");
  }
  TFPoint(double x_, double omega_) : TFPoint(Vec{x_}, Vec{omega_}) {}

  std::size_t dim() const { return x.size(); }

  /// Concatenated (x, omega) as a vector of R^{2n}.
  Vec joined() const {
    Vec v = x;
    v.insert(v.end(), omega.begin(), omega.end());
    return v;
  }

  friend bool operator==(const TFPoint&, const TFPoint&) = default;
};

/// Finite ordered set Lambda of pairwise distinct time-frequency points.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::vector<TFPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw InvalidInput("PointSet: need at least one point");
    const std::size_t n = points_.front().dim();
    for (const auto& p : points_) {
      if (p.dim() != n || p.omega.size() != n)
        throw InvalidInput("PointSet: points have mixed dimensions");
    }
    for (std::size_t i = 0; i < points_.size(); ++i)
      for (std::size_t j = i + 1; j < points_.size(); ++j)
        if (points_[i] == points_[j])
          throw InvalidInput("PointSet: duplicate point at indices " + std::to_string(i) +
                             " and " + std::to_string(j));
  }

  /// One-dimensional convenience: rows of (x, omega).
  static PointSet from_pairs(std::initializer_list<std::pair<double, double>> rows) {
    std::vector<TFPoint> pts;
    for (auto [x, w] : rows) pts.emplace_back(x, w);
    return PointSet(std::move(pts));
  }

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return points_.empty() ? 0 : points_.front().dim(); }
  const TFPoint& operator[](std::size_t i) const { return points_[i]; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }
  const std::vector<TFPoint>& points() const { return points_; }

  std::vector<Vec> times() const {
    std::vector<Vec> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.x);
    return out;
  }

  std::vector<Vec> frequencies() const {
    std::vector<Vec> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.omega);
    return out;
  }

 private:
  std::vector<TFPoint> points_;
};

/// Smallest pairwise Euclidean distance; +inf for fewer than two vectors.
inline double min_pairwise_distance(const std::vector<Vec>& vs) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) m = std::min(m, distance(vs[i], vs[j]));
  return m;
}

/// Truncation box [-L, L]^n sampled with m points per axis.
struct GridSpec {
  double half_width = 8.0;
  int samples_per_axis = 4096;
  double exclusion_radius = 0.0;

  void validate() const {
    if (!(half_width > 0.0)) throw InvalidInput("GridSpec: half_width must be positive");
    if (samples_per_axis < 2) throw InvalidInput("GridSpec: samples_per_axis must be >= 2");
    if (!(exclusion_radius >= 0.0) || exclusion_radius >= half_width)
      throw InvalidInput("GridSpec: exclusion_radius must lie in [0, half_width)");
  }

  double step() const { return 2.0 * half_width / (samples_per_axis - 1); }

  double node(int k) const { return -half_width + k * step(); }

  /// Default quadrature grid per dimension.
  static GridSpec defaults(std::size_t n) {
    if (n == 2) return {6.0, 512, 0.0};
    return {8.0, 4096, 0.0};
  }
};

}  // namespace tfcert
