#pragma once

// Numerical (in)dependence oracles, independent of the certificate checkers:
// Gram and collocation rank tests, plus residual testers for the dependence
// of the Edgar-Rosenblatt function and for covariance identities.

#include <Eigen/Dense>

#include "tfcert/funcs.hpp"
#include "tfcert/tfops.hpp"

namespace tfcert {

enum class OracleMode { Gram, Collocation };
enum class IndependenceVerdict { Independent, Dependent, Inconclusive };

inline const char* to_string(OracleMode m) { return m == OracleMode::Gram ? "Gram" : "Collocation"; }
inline const char* to_string(IndependenceVerdict v) {
  switch (v) {
    case IndependenceVerdict::Independent: return "Independent";
    case IndependenceVerdict::Dependent: return "Dependent";
    case IndependenceVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

/// Relative singular-value gaps separating the three verdicts.
inline constexpr double kEpsIndependent = 1e-6;
inline constexpr double kEpsDependent = 1e-10;
/// Below this sigma_max the matrix carries no information at all.
inline constexpr double kSigmaFloor = 1e-12;
inline constexpr std::size_t kMaxOracleSize = 64;

struct IndependenceReport {
  OracleMode mode = OracleMode::Gram;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double relative_gap = 0.0;
  /// Smallest eigenvalue before clamping (Gram mode only).
  double min_eigenvalue = 0.0;
  IndependenceVerdict verdict = IndependenceVerdict::Inconclusive;
  double quad_error_estimate = 0.0;
  Eigen::MatrixXcd matrix;
};

struct ResidualReport {
  std::string identity_name;
  double max_abs_residual = 0.0;
  bool phase_optimized = false;
  Complex best_phase{1.0, 0.0};
  std::size_t points = 0;
};

namespace detail {
inline void classify(IndependenceReport& rep) {
  if (!(rep.sigma_max > kSigmaFloor)) {
    rep.relative_gap = 0.0;
    rep.verdict = IndependenceVerdict::Inconclusive;
    return;
  }
  rep.relative_gap = rep.sigma_min / rep.sigma_max;
  if (rep.relative_gap > kEpsIndependent)
    rep.verdict = IndependenceVerdict::Independent;
  else if (rep.relative_gap < kEpsDependent)
    rep.verdict = IndependenceVerdict::Dependent;
  else
    rep.verdict = IndependenceVerdict::Inconclusive;
}

inline Eigen::MatrixXcd gram_from_samples(const std::vector<std::vector<Complex>>& u,
                                          const TensorGrid& grid, bool coarse) {
  const std::size_t N = u.size();
  const std::size_t m = grid.nodes().size();
  const double h = grid.spec().step();
  // Weights for the sub-grid of even axis indices (spacing 2h).
  auto coarse_weight = [&](std::size_t idx) -> double {
    double w = 1.0;
    for (std::size_t d = 0; d < grid.dim(); ++d) {
      const std::size_t k = idx % m;
      idx /= m;
      if (k % 2 != 0) return 0.0;
      const std::size_t last = (m - 1) - ((m - 1) % 2);
      w *= (k == 0 || k == last) ? h : 2.0 * h;
    }
    return w;
  };
  std::vector<double> w(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) w[k] = coarse ? coarse_weight(k) : grid.weight(k);
  Eigen::MatrixXcd G(N, N);
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j) cells.emplace_back(i, j);
  std::vector<Complex> vals(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    const auto [i, j] = cells[c];
    Complex total = 0.0;
    for (std::size_t s = 0; s < grid.size(); s += TensorGrid::kChunk) {
      Complex acc = 0.0;
      const std::size_t hi = std::min(grid.size(), s + TensorGrid::kChunk);
      for (std::size_t k = s; k < hi; ++k) acc += w[k] * u[i][k] * std::conj(u[j][k]);
      total += acc;
    }
    vals[c] = total;
  });
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [i, j] = cells[c];
    G(i, j) = vals[c];
    G(j, i) = std::conj(vals[c]);
  }
  return G;
}
}  // namespace detail

/// Gram matrix G_ij = <pi(lambda_i) f, pi(lambda_j) f> over the truncation
/// box, with extremal eigenvalues of its Hermitian part. Independence of the
/// truncated functions implies independence on all of R^n.
inline IndependenceReport gram_matrix(const FunctionEvaluator& f, const PointSet& lam,
                                      const GridSpec& spec) {
  if (!f.square_integrable())
    throw NumericalRefusal("gram_matrix: f is not square integrable; use collocation_rank");
  detail::require_dim(f, lam.dim(), "gram_matrix");
  if (lam.size() > kMaxOracleSize) throw InvalidInput("gram_matrix: at most 64 points");
  const TensorGrid grid(spec, f.dim());
  std::vector<std::vector<Complex>> u;
  for (const auto& p : lam) u.push_back(samples(tf_shift(f, p), grid));

  IndependenceReport rep;
  rep.mode = OracleMode::Gram;
  rep.rows = rep.cols = lam.size();
  rep.matrix = detail::gram_from_samples(u, grid, false);
  const Eigen::MatrixXcd coarse = detail::gram_from_samples(u, grid, true);
  rep.quad_error_estimate = (rep.matrix - coarse).cwiseAbs().maxCoeff();

  const Eigen::MatrixXcd herm = 0.5 * (rep.matrix + rep.matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  rep.min_eigenvalue = ev.minCoeff();
  rep.sigma_min = std::max(0.0, rep.min_eigenvalue);
  rep.sigma_max = std::max(0.0, ev.maxCoeff());
  detail::classify(rep);
  return rep;
}

/// Collocation matrix A_ki = (pi(lambda_i) f)(t_k) and its singular values.
/// An Independent verdict is sound for continuous f; Dependent is heuristic.
inline IndependenceReport collocation_rank(const FunctionEvaluator& f, const PointSet& lam,
                                           const std::vector<Vec>& sample_points,
                                           double exclusion_radius = 0.0) {
  detail::require_dim(f, lam.dim(), "collocation_rank");
  const std::size_t N = lam.size(), K = sample_points.size();
  if (N > kMaxOracleSize) throw InvalidInput("collocation_rank: at most 64 points");
  if (K < N) throw InvalidInput("collocation_rank: need at least N sample points");
  IndependenceReport rep;
  rep.mode = OracleMode::Collocation;
  rep.rows = K;
  rep.cols = N;
  rep.matrix.resize(K, N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto shifted = tf_shift(f, lam[i]);
    for (std::size_t k = 0; k < K; ++k) {
      const Vec& t = sample_points[k];
      if (near_singularity(t, shifted.singularities(), exclusion_radius))
        throw SingularityHit("collocation_rank: sample point " + std::to_string(k) +
                             " hits a shifted singularity");
      const Complex v = shifted(t);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw SingularityHit("collocation_rank: non-finite sample at point " + std::to_string(k));
      rep.matrix(k, i) = v;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rep.matrix);
  const auto& sv = svd.singularValues();
  rep.sigma_max = sv.size() ? sv.maxCoeff() : 0.0;
  rep.sigma_min = sv.size() ? sv.minCoeff() : 0.0;
  rep.min_eigenvalue = rep.sigma_min;
  detail::classify(rep);
  return rep;
}

/// Time coordinates of Lambda, midpoints of consecutive time coordinates, and
/// 4N Kronecker-sequence points in the box; anything within the exclusion
/// radius of a shifted singularity (or exactly on one) is dropped.
inline std::vector<Vec> default_collocation_samples(const FunctionEvaluator& f,
                                                    const PointSet& lam, const GridSpec& spec) {
  const std::size_t n = lam.dim();
  std::vector<Vec> times = lam.times();
  if (n == 1)
    std::sort(times.begin(), times.end());
  std::vector<Vec> cand = times;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    if (times[i] == times[i + 1]) continue;
    cand.push_back(0.5 * (times[i] + times[i + 1]));
  }
  // Generalised golden ratio additive recurrence.
  double phi = 2.0;
  for (int it = 0; it < 30; ++it) phi = std::pow(1.0 + phi, 1.0 / static_cast<double>(n + 1));
  Vec alpha(n);
  for (std::size_t d = 0; d < n; ++d) alpha[d] = std::fmod(std::pow(1.0 / phi, d + 1.0), 1.0);
  for (std::size_t k = 1; k <= 4 * lam.size(); ++k) {
    Vec t(n);
    for (std::size_t d = 0; d < n; ++d) {
      const double frac = std::fmod(0.5 + static_cast<double>(k) * alpha[d], 1.0);
      t[d] = -spec.half_width + 2.0 * spec.half_width * frac;
    }
    cand.push_back(std::move(t));
  }
  std::vector<Vec> shifted_sing;
  for (const auto& p : lam)
    for (const auto& s : f.singularities()) shifted_sing.push_back(s + p.x);
  std::vector<Vec> out;
  for (auto& t : cand) {
    if (near_singularity(t, shifted_sing, spec.exclusion_radius)) continue;
    if (std::find(out.begin(), out.end(), t) != out.end()) continue;
    out.push_back(std::move(t));
  }
  return out;
}

/// Lattice of (a, b) points with the given half width and step.
inline std::vector<Vec> square_lattice(double half_width, double step) {
  std::vector<Vec> pts;
  const int k = static_cast<int>(std::lround(half_width / step));
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j) pts.push_back({i * step, j * step});
  return pts;
}

/// max |c f(a,b) - f(a+1,b) - f(a-1,b) - f(a,b+1) - f(a,b-1)| over the
/// lattice; c = 2 is the exact dependence, other values are negative controls.
inline ResidualReport dependence_residual_er(const std::vector<Vec>& lattice, double quad_tol,
                                             double center_coefficient = 2.0) {
  if (!(quad_tol > 0.0) || quad_tol > 1e-6)
    throw InvalidInput("dependence_residual_er: quad_tol must lie in (0, 1e-6]");
  const auto f = make_edgar_rosenblatt(quad_tol);
  std::vector<double> res(lattice.size());
  parallel_for(lattice.size(), [&](std::size_t i) {
    const double a = lattice[i].at(0), b = lattice[i].at(1);
    const Complex r = center_coefficient * f(a, b) - f(a + 1, b) - f(a - 1, b) - f(a, b + 1) -
                      f(a, b - 1);
    res[i] = std::abs(r);
  });
  ResidualReport rep;
  rep.identity_name = "edgar_rosenblatt_dependence";
  rep.points = lattice.size();
  for (double r : res) rep.max_abs_residual = std::max(rep.max_abs_residual, r);
  return rep;
}

enum class ShiftOrder { TranslateAfterModulate, ModulateAfterTranslate };

/// Covariance residual of the STFT:
///   V_g(T_u M_eta f)(x, w) = e^{-2 pi i u.w} V_g f(x - u, w - eta)
/// over the product lattice (both axes from `lattice`). With
/// ModulateAfterTranslate the left side is V_g(M_eta T_u f), which carries the
/// extra factor e^{2 pi i u.eta}. phase_sign = +1 gives a deliberately wrong
/// identity for negative controls.
inline ResidualReport stft_identity_residual(const FunctionEvaluator& f,
                                             const FunctionEvaluator& g, const Vec& u,
                                             const Vec& eta, const GridSpec& lattice,
                                             const GridSpec& grid,
                                             ShiftOrder order = ShiftOrder::TranslateAfterModulate,
                                             double phase_sign = -1.0) {
  const std::size_t n = f.dim();
  detail::require_dim(f, u.size(), "stft_identity_residual");
  detail::require_dim(f, eta.size(), "stft_identity_residual");
  const TensorGrid axis(lattice, n);
  std::vector<Vec> xs(axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i) {
    xs[i].resize(n);
    axis.point(i, xs[i]);
  }
  std::vector<Vec> xs_shift, ws_shift;
  for (const auto& x : xs) {
    xs_shift.push_back(x - u);
    ws_shift.push_back(x - eta);
  }
  const FunctionEvaluator lhs_f = order == ShiftOrder::TranslateAfterModulate
                                      ? translate(modulate(f, eta), u)
                                      : modulate(translate(f, u), eta);
  const Complex order_phase =
      order == ShiftOrder::TranslateAfterModulate ? Complex{1.0} : unit_phase(kTwoPi * dot(u, eta));
  const auto lhs = stft_lattice(lhs_f, g, xs, xs, grid);
  const auto rhs = stft_lattice(f, g, xs_shift, ws_shift, grid);
  ResidualReport rep;
  rep.identity_name = "stft_covariance";
  rep.points = lhs.size();
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const std::size_t k = i * xs.size() + j;
      const Complex expected = order_phase * unit_phase(phase_sign * kTwoPi * dot(u, xs[j])) * rhs[k];
      rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(lhs[k] - expected));
    }
  return rep;
}

enum class MetaplecticKind { DilationCov, ChirpCov, FourierMultCov };

inline const char* to_string(MetaplecticKind k) {
  switch (k) {
    case MetaplecticKind::DilationCov: return "DilationCov";
    case MetaplecticKind::ChirpCov: return "ChirpCov";
    case MetaplecticKind::FourierMultCov: return "FourierMultCov";
  }
  return "?";
}

struct MetaplecticParams {
  double r = 1.0;
  double x = 0.0;
  double omega = 0.0;
};

/// Right-hand side M_{modulation} T_{translation} (Op f) of a covariance identity.
struct Parameterization {
  std::string label;
  double modulation = 0.0;
  double translation = 0.0;
};

/// The parameter change as printed alongside each identity.
inline Parameterization printed_parameterization(MetaplecticKind kind,
                                                 const MetaplecticParams& p) {
  switch (kind) {
    case MetaplecticKind::DilationCov:
      return {"printed M_{w/r} T_{xr}", p.omega / p.r, p.x * p.r};
    case MetaplecticKind::ChirpCov:
      return {"printed M_{w-xr} T_x", p.omega - p.x * p.r, p.x};
    case MetaplecticKind::FourierMultCov:
      return {"printed M_{-w} T_{-x-rw}", -p.omega, -p.x - p.r * p.omega};
  }
  throw InvalidInput("printed_parameterization: unknown kind");
}

/// Pointwise-correct parameter change for D_r f = |r|^{1/2} f(rt),
/// S_r f = e^{2 pi i r t^2} f and U_r = multiplier e^{2 pi i r xi^2}.
inline Parameterization standard_parameterization(MetaplecticKind kind,
                                                  const MetaplecticParams& p) {
  switch (kind) {
    case MetaplecticKind::DilationCov:
      return {"standard M_{rw} T_{x/r}", p.r * p.omega, p.x / p.r};
    case MetaplecticKind::ChirpCov:
      return {"standard M_{w+2rx} T_x", p.omega + 2.0 * p.r * p.x, p.x};
    case MetaplecticKind::FourierMultCov:
      return {"standard M_w T_{x-2rw}", p.omega, p.x - 2.0 * p.r * p.omega};
  }
  throw InvalidInput("standard_parameterization: unknown kind");
}

/// U_r f = inverse Fourier transform of e^{2 pi i r xi^2} fhat(xi), both
/// transforms by quadrature on `spec` (dimension 1).
inline FunctionEvaluator fourier_multiplier_chirp(const FunctionEvaluator& f, double r,
                                                  const GridSpec& spec) {
  if (f.dim() != 1) throw InvalidInput("fourier_multiplier_chirp: only dimension 1");
  const auto fh = fourier(f, spec);
  auto grid = std::make_shared<const TensorGrid>(spec, 1);
  auto s = std::make_shared<std::vector<Complex>>(grid->size());
  parallel_for(grid->size(), [&](std::size_t k) {
    const double xi = grid->nodes()[k];
    (*s)[k] = grid->weight(k) * unit_phase(kTwoPi * r * xi * xi) * fh(xi);
  });
  return FunctionEvaluator(
             1,
             [grid, s](std::span<const double> t) {
               return phase_sum(*s, *grid, Vec{-t[0]});
             },
             f.square_integrable(), "U(" + f.label() + ")");
}

namespace detail {
/// Unit c minimising max_k |lhs_k - c rhs_k|: least-squares start, then an
/// angular scan and golden-section polish; the start is kept unless beaten.
inline std::pair<Complex, double> fit_phase(const std::vector<Complex>& lhs,
                                            const std::vector<Complex>& rhs) {
  auto cost = [&](double th) {
    const Complex c = unit_phase(th);
    double m = 0.0;
    for (std::size_t k = 0; k < lhs.size(); ++k) m = std::max(m, std::abs(lhs[k] - c * rhs[k]));
    return m;
  };
  Complex cross = 0.0;
  for (std::size_t k = 0; k < lhs.size(); ++k) cross += std::conj(rhs[k]) * lhs[k];
  double best_th = std::abs(cross) > 0.0 ? std::arg(cross) : 0.0;
  double best = cost(best_th);
  const int scan = 720;
  double scan_th = best_th, scan_cost = best;
  for (int i = 0; i < scan; ++i) {
    const double th = -kPi + kTwoPi * i / scan;
    const double cst = cost(th);
    if (cst < scan_cost) {
      scan_cost = cst;
      scan_th = th;
    }
  }
  double a = scan_th - kTwoPi / scan, b = scan_th + kTwoPi / scan;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    if (cost(c1) < cost(c2))
      b = c2;
    else
      a = c1;
  }
  const double polished = 0.5 * (a + b);
  if (cost(polished) < best) {
    best_th = polished;
    best = cost(polished);
  }
  return {unit_phase(best_th), best};
}
}  // namespace detail

/// Evaluates Op M_omega T_x f and, for each parameterization,
/// M_a T_b Op f on the sample points, fits the best global unit phase and
/// reports the residual. The printed form comes first, then `alternatives`.
inline std::vector<ResidualReport> metaplectic_residual(
    MetaplecticKind kind, const MetaplecticParams& params, const FunctionEvaluator& f,
    const std::vector<double>& sample, std::vector<Parameterization> alternatives = {},
    const GridSpec& spec = {8.0, 1024, 0.0}) {
  if (f.dim() != 1) throw InvalidInput("metaplectic_residual: dimension 1 only");
  if (kind == MetaplecticKind::DilationCov && params.r == 0.0)
    throw InvalidInput("metaplectic_residual: r must be nonzero for DilationCov");
  auto op = [&](const FunctionEvaluator& h) {
    switch (kind) {
      case MetaplecticKind::DilationCov: return dilate(h, params.r);
      case MetaplecticKind::ChirpCov: return chirp_mul(h, params.r);
      case MetaplecticKind::FourierMultCov: return fourier_multiplier_chirp(h, params.r, spec);
    }
    throw InvalidInput("metaplectic_residual: unknown kind");
  };
  const auto lhs_f = op(modulate(translate(f, params.x), params.omega));
  const auto opf = op(f);
  std::vector<Complex> lhs(sample.size());
  for (std::size_t k = 0; k < sample.size(); ++k) lhs[k] = lhs_f(sample[k]);

  std::vector<Parameterization> forms{printed_parameterization(kind, params)};
  forms.insert(forms.end(), alternatives.begin(), alternatives.end());
  std::vector<ResidualReport> out;
  for (const auto& form : forms) {
    const auto rhs_f = modulate(translate(opf, form.translation), form.modulation);
    std::vector<Complex> rhs(sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k) rhs[k] = rhs_f(sample[k]);
    const auto [phase, resid] = detail::fit_phase(lhs, rhs);
    ResidualReport rep;
    rep.identity_name = std::string(to_string(kind)) + ": " + form.label;
    rep.max_abs_residual = resid;
    rep.phase_optimized = true;
    rep.best_phase = phase;
    rep.points = sample.size();
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace tfcert
