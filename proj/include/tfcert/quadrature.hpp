#pragma once

// Tensor-product trapezoid sums with a fixed chunked reduction order, and an
// adaptive Gauss-Legendre rule for smooth one-dimensional integrands.

#include <array>
#include <functional>
#include <thread>

#include "tfcert/core.hpp"

namespace tfcert {

/// Runs fn(i) for i in [0, count). Each index must write only its own slot,
/// which keeps results independent of the thread count.
template <class F>
void parallel_for(std::size_t count, F&& fn) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, count);
  if (workers <= 1 || count < 4) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
}

/// The sample points of [-L, L]^n with trapezoid weights.
class TensorGrid {
 public:
  static constexpr std::size_t kChunk = 4096;

  TensorGrid(const GridSpec& spec, std::size_t dim) : spec_(spec), dim_(dim) {
    spec_.validate();
    if (dim_ == 0 || dim_ > 2) throw InvalidInput("TensorGrid: dimension must be 1 or 2");
    const int m = spec_.samples_per_axis;
    nodes_.resize(m);
    weights_.resize(m);
    const double h = spec_.step();
    for (int k = 0; k < m; ++k) {
      nodes_[k] = spec_.node(k);
      weights_[k] = (k == 0 || k == m - 1) ? 0.5 * h : h;
    }
    total_ = 1;
    for (std::size_t d = 0; d < dim_; ++d) total_ *= static_cast<std::size_t>(m);
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return total_; }
  const GridSpec& spec() const { return spec_; }
  const Vec& nodes() const { return nodes_; }
  const Vec& axis_weights() const { return weights_; }

  /// Flattened index -> per-axis indices, last axis fastest.
  void point(std::size_t idx, std::span<double> out) const {
    const std::size_t m = nodes_.size();
    for (std::size_t d = dim_; d-- > 0;) {
      out[d] = nodes_[idx % m];
      idx /= m;
    }
  }

  double weight(std::size_t idx) const {
    const std::size_t m = nodes_.size();
    double w = 1.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      w *= weights_[idx % m];
      idx /= m;
    }
    return w;
  }

 private:
  GridSpec spec_;
  std::size_t dim_;
  Vec nodes_;
  Vec weights_;
  std::size_t total_ = 0;
};

/// True when t lies within `radius` of any singularity (exact hit if radius is 0).
inline bool near_singularity(std::span<const double> t, const std::vector<Vec>& singularities,
                             double radius) {
  for (const auto& p : singularities) {
    const double d = distance(t, p);
    if (d <= radius) return true;
  }
  return false;
}

/// Sum over the grid of weight(t) * integrand(t). Partial sums are formed on
/// fixed-size chunks and reduced left to right.
template <class F>
Complex integrate(const TensorGrid& grid, F&& integrand) {
  const std::size_t n = grid.size();
  const std::size_t chunks = (n + TensorGrid::kChunk - 1) / TensorGrid::kChunk;
  std::vector<Complex> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Vec t(grid.dim());
    Complex acc = 0.0;
    const std::size_t hi = std::min(n, (c + 1) * TensorGrid::kChunk);
    for (std::size_t i = c * TensorGrid::kChunk; i < hi; ++i) {
      grid.point(i, t);
      acc += grid.weight(i) * integrand(std::span<const double>(t));
    }
    partial[c] = acc;
  });
  Complex total = 0.0;
  for (const auto& p : partial) total += p;
  return total;
}

/// Reduces an already-weighted sample array in the same chunked order.
inline Complex chunked_sum(std::span<const Complex> values) {
  Complex total = 0.0;
  for (std::size_t c = 0; c < values.size(); c += TensorGrid::kChunk) {
    Complex acc = 0.0;
    const std::size_t hi = std::min(values.size(), c + TensorGrid::kChunk);
    for (std::size_t i = c; i < hi; ++i) acc += values[i];
    total += acc;
  }
  return total;
}

/// e^{-2 pi i omega t_k} on uniformly spaced nodes, by rotation with an exact
/// re-anchor every 64 nodes.
inline std::vector<Complex> axis_phases(double omega, const Vec& nodes) {
  std::vector<Complex> out(nodes.size());
  if (nodes.empty()) return out;
  const double h = nodes.size() > 1 ? nodes[1] - nodes[0] : 0.0;
  const Complex step = unit_phase(-kTwoPi * omega * h);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    out[k] = (k % 64 == 0) ? unit_phase(-kTwoPi * omega * nodes[k]) : out[k - 1] * step;
  }
  return out;
}

/// Fixed-order Gauss-Legendre rule on [-1, 1].
template <std::size_t Order>
struct GaussLegendreRule {
  std::array<double, Order> nodes{};
  std::array<double, Order> weights{};

  GaussLegendreRule() {
    for (std::size_t i = 0; i < Order; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (Order + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= Order; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = Order * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  template <class F>
  Complex apply(F&& fn, double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Complex s = 0.0;
    for (std::size_t i = 0; i < Order; ++i) s += weights[i] * fn(mid + half * nodes[i]);
    return half * s;
  }
};

inline const GaussLegendreRule<10>& gauss_legendre10() {
  static const GaussLegendreRule<10> rule;
  return rule;
}

namespace detail {
template <class F>
Complex adaptive_gl_step(F& fn, double a, double b, Complex whole, double tol, int depth) {
  const auto& rule = gauss_legendre10();
  const double mid = 0.5 * (a + b);
  const Complex left = rule.apply(fn, a, mid);
  const Complex right = rule.apply(fn, mid, b);
  const Complex both = left + right;
  if (std::abs(both - whole) < tol || depth >= 40) return both;
  return adaptive_gl_step(fn, a, mid, left, 0.5 * tol, depth + 1) +
         adaptive_gl_step(fn, mid, b, right, 0.5 * tol, depth + 1);
}
}  // namespace detail

/// Adaptive 10-point Gauss-Legendre on [a, b]: panels are bisected until the
/// two-panel and one-panel estimates differ by less than their share of tol.
template <class F>
Complex adaptive_gauss_legendre(F&& fn, double a, double b, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("adaptive_gauss_legendre: tol must be positive");
  const Complex whole = gauss_legendre10().apply(fn, a, b);
  return detail::adaptive_gl_step(fn, a, b, whole, tol, 0);
}

}  // namespace tfcert
