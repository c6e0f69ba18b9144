#pragma once

// Time-frequency operators acting on pointwise function evaluators:
// translation, modulation, time-frequency shift, dilation, chirp
// multiplication, truncated-quadrature Fourier transform and the STFT.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "tfcert/core.hpp"
#include "tfcert/quadrature.hpp"

namespace tfcert {

/// Radial bound sup_{||t - center|| >= r} |f(t)|, nonincreasing in r.
struct Envelope {
  std::function<double(double)> bound;
  Vec center;

  double operator()(double r) const { return bound(r); }

  /// Bound valid around another point: ||t - anchor|| >= r implies
  /// ||t - center|| >= r - ||anchor - center||.
  double around(std::span<const double> anchor, double r) const {
    return bound(std::max(0.0, r - distance(anchor, center)));
  }
};

/// Immutable complex-valued function on R^n with decay and singularity metadata.
/// Copies share the underlying closure.
class FunctionEvaluator {
 public:
  using EvalFn = std::function<Complex(std::span<const double>)>;

  FunctionEvaluator(std::size_t dim, EvalFn fn, bool square_integrable = true,
                    std::string label = "f")
      : dim_(dim),
        fn_(std::make_shared<const EvalFn>(std::move(fn))),
        square_integrable_(square_integrable),
        label_(std::move(label)) {
    if (dim_ == 0) throw InvalidInput("FunctionEvaluator: dimension must be positive");
  }

  std::size_t dim() const { return dim_; }
  bool square_integrable() const { return square_integrable_; }
  const std::optional<Envelope>& envelope() const { return envelope_; }
  const std::vector<Vec>& singularities() const { return singularities_; }
  const std::string& label() const { return label_; }

  Complex operator()(std::span<const double> t) const {
    if (t.size() != dim_)
      throw InvalidInput("evaluate: point has dimension " + std::to_string(t.size()) +
                         ", function has " + std::to_string(dim_));
    return (*fn_)(t);
  }
  Complex operator()(const Vec& t) const { return (*this)(std::span<const double>(t)); }
  Complex operator()(double t) const {
    const double p[1] = {t};
    return (*this)(std::span<const double>(p, 1));
  }
  Complex operator()(double a, double b) const {
    const double p[2] = {a, b};
    return (*this)(std::span<const double>(p, 2));
  }

  /// Attaches an envelope centred at `center` (origin when empty).
  FunctionEvaluator with_envelope(std::function<double(double)> bound, Vec center = {}) const {
    FunctionEvaluator out = *this;
    if (center.empty()) center.assign(dim_, 0.0);
    if (center.size() != dim_) throw InvalidInput("with_envelope: center dimension mismatch");
    out.envelope_ = Envelope{std::move(bound), std::move(center)};
    return out;
  }
  FunctionEvaluator without_envelope() const {
    FunctionEvaluator out = *this;
    out.envelope_.reset();
    return out;
  }
  FunctionEvaluator with_singularities(std::vector<Vec> points) const {
    for (const auto& p : points)
      if (p.size() != dim_) throw InvalidInput("with_singularities: dimension mismatch");
    FunctionEvaluator out = *this;
    out.singularities_ = std::move(points);
    return out;
  }
  FunctionEvaluator with_square_integrable(bool flag) const {
    FunctionEvaluator out = *this;
    out.square_integrable_ = flag;
    return out;
  }
  FunctionEvaluator with_label(std::string label) const {
    FunctionEvaluator out = *this;
    out.label_ = std::move(label);
    return out;
  }

  /// Same metadata, new closure.
  FunctionEvaluator rebind(EvalFn fn, std::string label) const {
    FunctionEvaluator out = *this;
    out.fn_ = std::make_shared<const EvalFn>(std::move(fn));
    out.label_ = std::move(label);
    return out;
  }

 private:
  std::size_t dim_;
  std::shared_ptr<const EvalFn> fn_;
  bool square_integrable_;
  std::string label_;
  std::optional<Envelope> envelope_;
  std::vector<Vec> singularities_;
};

namespace detail {
inline void require_dim(const FunctionEvaluator& f, std::size_t n, const char* op) {
  if (f.dim() != n)
    throw InvalidInput(std::string(op) + ": expected dimension " + std::to_string(f.dim()) +
                       ", got " + std::to_string(n));
}
}  // namespace detail

/// T_x f(t) = f(t - x). The envelope moves with the function.
inline FunctionEvaluator translate(const FunctionEvaluator& f, const Vec& x) {
  detail::require_dim(f, x.size(), "translate");
  FunctionEvaluator out = f.rebind(
      [f, x](std::span<const double> t) {
        Vec s(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) s[i] = t[i] - x[i];
        return f(s);
      },
      "T(" + f.label() + ")");
  std::vector<Vec> sing;
  for (const auto& p : f.singularities()) sing.push_back(p + x);
  out = out.with_singularities(std::move(sing));
  if (f.envelope()) out = out.with_envelope(f.envelope()->bound, f.envelope()->center + x);
  return out;
}
inline FunctionEvaluator translate(const FunctionEvaluator& f, double x) {
  return translate(f, Vec{x});
}

/// M_omega f(t) = e^{2 pi i omega.t} f(t).
inline FunctionEvaluator modulate(const FunctionEvaluator& f, const Vec& omega) {
  detail::require_dim(f, omega.size(), "modulate");
  return f.rebind(
      [f, omega](std::span<const double> t) {
        return unit_phase(kTwoPi * dot(omega, t)) * f(t);
      },
      "M(" + f.label() + ")");
}
inline FunctionEvaluator modulate(const FunctionEvaluator& f, double omega) {
  return modulate(f, Vec{omega});
}

/// pi(lambda) f = M_omega T_x f.
inline FunctionEvaluator tf_shift(const FunctionEvaluator& f, const TFPoint& lam) {
  detail::require_dim(f, lam.dim(), "tf_shift");
  return modulate(translate(f, lam.x), lam.omega);
}

/// D_r f(t) = |r|^{n/2} f(r t).
inline FunctionEvaluator dilate(const FunctionEvaluator& f, double r) {
  if (r == 0.0) throw InvalidInput("dilate: r must be nonzero");
  const std::size_t n = f.dim();
  const double scale = std::pow(std::abs(r), 0.5 * static_cast<double>(n));
  FunctionEvaluator out = f.rebind(
      [f, r, scale](std::span<const double> t) {
        Vec s(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) s[i] = r * t[i];
        return scale * f(s);
      },
      "D(" + f.label() + ")");
  std::vector<Vec> sing;
  for (const auto& p : f.singularities()) sing.push_back((1.0 / r) * p);
  out = out.with_singularities(std::move(sing));
  if (const auto& env = f.envelope()) {
    auto bound = env->bound;
    const double ar = std::abs(r);
    out = out.with_envelope([bound, scale, ar](double rho) { return scale * bound(ar * rho); },
                            (1.0 / r) * env->center);
  } else {
    out = out.without_envelope();
  }
  return out;
}

/// S_r f(t) = e^{2 pi i r t^2} f(t), one dimension only.
inline FunctionEvaluator chirp_mul(const FunctionEvaluator& f, double r) {
  if (f.dim() != 1) throw InvalidInput("chirp_mul: only defined for dimension 1");
  return f.rebind(
      [f, r](std::span<const double> t) { return unit_phase(kTwoPi * r * t[0] * t[0]) * f(t); },
      "S(" + f.label() + ")");
}

/// Weighted samples w_k f(t_k); points near a singularity contribute zero.
inline std::vector<Complex> weighted_samples(const FunctionEvaluator& f, const TensorGrid& grid) {
  detail::require_dim(f, grid.dim(), "weighted_samples");
  std::vector<Complex> out(grid.size());
  const double excl = grid.spec().exclusion_radius;
  parallel_for((grid.size() + TensorGrid::kChunk - 1) / TensorGrid::kChunk, [&](std::size_t c) {
    Vec t(grid.dim());
    const std::size_t hi = std::min(grid.size(), (c + 1) * TensorGrid::kChunk);
    for (std::size_t i = c * TensorGrid::kChunk; i < hi; ++i) {
      grid.point(i, t);
      out[i] = near_singularity(t, f.singularities(), excl) ? Complex{} : grid.weight(i) * f(t);
    }
  });
  return out;
}

/// Unweighted samples f(t_k); points near a singularity give zero.
inline std::vector<Complex> samples(const FunctionEvaluator& f, const TensorGrid& grid) {
  detail::require_dim(f, grid.dim(), "samples");
  std::vector<Complex> out(grid.size());
  const double excl = grid.spec().exclusion_radius;
  Vec t(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, t);
    out[i] = near_singularity(t, f.singularities(), excl) ? Complex{} : f(t);
  }
  return out;
}

/// Sum_k s_k e^{-2 pi i omega.t_k} for weighted samples s on the grid.
inline Complex phase_sum(std::span<const Complex> s, const TensorGrid& grid, const Vec& omega) {
  const auto& nodes = grid.nodes();
  const std::size_t m = nodes.size();
  if (grid.dim() == 1) {
    const auto ph = axis_phases(omega[0], nodes);
    Complex acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += s[k] * ph[k];
    return acc;
  }
  const auto p0 = axis_phases(omega[0], nodes);
  const auto p1 = axis_phases(omega[1], nodes);
  Complex acc = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    Complex row = 0.0;
    const Complex* sr = s.data() + a * m;
    for (std::size_t b = 0; b < m; ++b) row += sr[b] * p1[b];
    acc += row * p0[a];
  }
  return acc;
}

/// <f, g> = int f conj(g) over the truncation box.
inline Complex inner_product(const FunctionEvaluator& f, const FunctionEvaluator& g,
                             const GridSpec& spec) {
  detail::require_dim(f, g.dim(), "inner_product");
  const TensorGrid grid(spec, f.dim());
  const double excl = spec.exclusion_radius;
  return integrate(grid, [&](std::span<const double> t) -> Complex {
    if (near_singularity(t, f.singularities(), excl) ||
        near_singularity(t, g.singularities(), excl))
      return 0.0;
    return f(t) * std::conj(g(t));
  });
}

inline double l2_norm(const FunctionEvaluator& f, const GridSpec& spec) {
  return std::sqrt(std::abs(inner_product(f, f, spec).real()));
}

/// Truncated-quadrature Fourier transform
///   fhat(omega) = int_{[-L,L]^n} f(t) e^{-2 pi i omega.t} dt,
/// evaluable at any real omega. Samples of f are taken once.
inline FunctionEvaluator fourier(const FunctionEvaluator& f, const GridSpec& spec) {
  if (!f.envelope() && !f.square_integrable())
    throw NumericalRefusal("fourier: no envelope and not flagged integrable; truncation error "
                           "cannot be bounded");
  auto grid = std::make_shared<const TensorGrid>(spec, f.dim());
  auto s = std::make_shared<const std::vector<Complex>>(weighted_samples(f, *grid));
  const std::size_t n = f.dim();
  return FunctionEvaluator(
      n,
      [grid, s](std::span<const double> omega) {
        return phase_sum(*s, *grid, Vec(omega.begin(), omega.end()));
      },
      f.square_integrable(), "F(" + f.label() + ")");
}

/// V_g f(lambda) = <f, pi(lambda) g> by direct quadrature over the box.
inline Complex stft(const FunctionEvaluator& f, const FunctionEvaluator& g, const TFPoint& lam,
                    const GridSpec& spec) {
  if (!f.square_integrable() || !g.square_integrable())
    throw NumericalRefusal("stft: both function and window must be square integrable");
  detail::require_dim(f, g.dim(), "stft");
  detail::require_dim(f, lam.dim(), "stft");
  const TensorGrid grid(spec, f.dim());
  const double excl = spec.exclusion_radius;
  std::vector<Vec> gsing;
  for (const auto& p : g.singularities()) gsing.push_back(p + lam.x);
  return integrate(grid, [&](std::span<const double> t) -> Complex {
    if (near_singularity(t, f.singularities(), excl) || near_singularity(t, gsing, excl))
      return 0.0;
    Vec s(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) s[i] = t[i] - lam.x[i];
    return f(t) * std::conj(g(s)) * unit_phase(-kTwoPi * dot(lam.omega, t));
  });
}

/// V_g f on the product lattice xs x omegas, row-major [x][omega]. Samples of
/// f are taken once and phases come from axis_phases, so this agrees with
/// `stft` to rounding level while costing one multiply-add per grid node.
inline std::vector<Complex> stft_lattice(const FunctionEvaluator& f, const FunctionEvaluator& g,
                                         const std::vector<Vec>& xs,
                                         const std::vector<Vec>& omegas, const GridSpec& spec) {
  if (!f.square_integrable() || !g.square_integrable())
    throw NumericalRefusal("stft: both function and window must be square integrable");
  detail::require_dim(f, g.dim(), "stft_lattice");
  const TensorGrid grid(spec, f.dim());
  const auto fs = weighted_samples(f, grid);
  const double excl = spec.exclusion_radius;
  std::vector<Complex> out(xs.size() * omegas.size());
  // One-dimensional lattices reuse one phase table per frequency.
  std::vector<std::vector<Complex>> tables;
  if (grid.dim() == 1) {
    tables.resize(omegas.size());
    parallel_for(omegas.size(),
                 [&](std::size_t iw) { tables[iw] = axis_phases(omegas[iw].at(0), grid.nodes()); });
  }
  parallel_for(xs.size(), [&](std::size_t ix) {
    const Vec& x = xs[ix];
    detail::require_dim(f, x.size(), "stft_lattice");
    std::vector<Vec> gsing;
    for (const auto& p : g.singularities()) gsing.push_back(p + x);
    std::vector<Complex> prod(grid.size());
    Vec t(grid.dim()), s(grid.dim());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (fs[k] == Complex{}) continue;
      grid.point(k, t);
      if (near_singularity(t, gsing, excl)) continue;
      for (std::size_t d = 0; d < t.size(); ++d) s[d] = t[d] - x[d];
      prod[k] = fs[k] * std::conj(g(s));
    }
    for (std::size_t iw = 0; iw < omegas.size(); ++iw) {
      if (grid.dim() == 1) {
        Complex acc = 0.0;
        const auto& ph = tables[iw];
        for (std::size_t k = 0; k < prod.size(); ++k) acc += prod[k] * ph[k];
        out[ix * omegas.size() + iw] = acc;
      } else {
        out[ix * omegas.size() + iw] = phase_sum(prod, grid, omegas[iw]);
      }
    }
  });
  return out;
}

}  // namespace tfcert
