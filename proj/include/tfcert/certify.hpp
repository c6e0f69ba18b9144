#pragma once

// Sufficient conditions for linear independence of {pi(lambda) f}: each
// checker evaluates the hypothesis of one result numerically and records the
// witnesses in a Certificate.

#include <optional>
#include <sstream>

#include "tfcert/funcs.hpp"
#include "tfcert/tfops.hpp"

namespace tfcert {

enum class Theorem { Lemma1, Thm1, Cor1, Cor2, Cor3, Thm2, Thm3 };
enum class Verdict { Certified, NotCertified };

/// How a sup was obtained. Envelope bounds are rigorous; DenseSample values
/// are lower bounds of the true sup (heuristic); Pointwise means only finitely
/// many exact evaluations were needed.
enum class SupMethod { Envelope, DenseSample, Pointwise };

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::Lemma1: return "Lemma1";
    case Theorem::Thm1: return "Thm1";
    case Theorem::Cor1: return "Cor1";
    case Theorem::Cor2: return "Cor2";
    case Theorem::Cor3: return "Cor3";
    case Theorem::Thm2: return "Thm2";
    case Theorem::Thm3: return "Thm3";
  }
  return "?";
}
inline const char* to_string(Verdict v) {
  return v == Verdict::Certified ? "Certified" : "NotCertified";
}
inline const char* to_string(SupMethod m) {
  switch (m) {
    case SupMethod::Envelope: return "Envelope";
    case SupMethod::DenseSample: return "DenseSample";
    case SupMethod::Pointwise: return "Pointwise";
  }
  return "?";
}

struct SupEstimate {
  double value = 0.0;
  SupMethod method = SupMethod::Envelope;
  std::optional<GridSpec> grid;
};

struct RadiusEstimate {
  double radius = 0.0;
  SupMethod method = SupMethod::Envelope;
  std::optional<GridSpec> grid;
};

struct Certificate {
  Theorem theorem = Theorem::Thm1;
  Verdict verdict = Verdict::NotCertified;
  std::size_t N = 0;
  double R = 0.0;
  double M = 0.0;
  double peak = 0.0;
  double bound = 0.0;
  std::vector<double> margins;
  std::optional<Vec> translate_x;
  std::optional<double> threshold_r;
  SupMethod sup_method = SupMethod::Envelope;
  std::string note;

  bool certified() const { return verdict == Verdict::Certified; }
};

struct CertifyOptions {
  /// Refuse instead of falling back to dense sampling when no envelope exists.
  bool rigorous = false;
  /// Grid used for DenseSample sup estimates; per-dimension default when unset.
  std::optional<GridSpec> sample_grid;
  /// Largest radius searched for the decay radius.
  double horizon = 1e6;
  /// Bisection tolerance on radii.
  double tolerance = 1e-9;

  GridSpec grid_for(std::size_t n) const { return sample_grid.value_or(GridSpec::defaults(n)); }
};

namespace detail {

inline double bound_for(double peak, std::size_t N) {
  return N >= 2 ? peak / static_cast<double>(N - 1) : std::numeric_limits<double>::infinity();
}

/// inf{r >= 0 : env(r) < bound} for nonincreasing env, to within tol.
template <class Env>
double envelope_radius(Env&& env, double bound, double horizon, double tol) {
  if (!(env(horizon) < bound))
    throw NumericalRefusal("decay radius: envelope never drops below the bound within radius " +
                           std::to_string(horizon) + " (NotCertifiable)");
  if (env(0.0) < bound) return 0.0;
  double hi = 1.0;
  while (!(env(hi) < bound)) hi = std::min(2.0 * hi, horizon);
  double lo = 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (env(mid) < bound)
      hi = mid;
    else
      lo = mid;
  }
  // Below ~64 tol the envelope is flat to rounding (e^{-pi r^2} == 1), so the
  // strict inequality cannot be resolved there and the radius is taken as 0.
  return hi <= 64.0 * tol ? 0.0 : hi;
}

/// Decay radius from samples: the farthest sample (from anchor) whose value
/// reaches the bound, refined by bisection along its ray across one cell.
template <class Probe>
double sampled_radius(const std::vector<Vec>& points, const std::vector<double>& values,
                      const Vec& anchor, double bound, double cell_diag, double tol,
                      Probe&& probe) {
  std::vector<double> dist(points.size());
  double far = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    dist[i] = distance(points[i], anchor);
    if (values[i] >= bound) far = std::max(far, dist[i]);
  }
  if (far < 0.0) return 0.0;
  double radius = far;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(values[i] >= bound) || dist[i] < far - cell_diag || dist[i] == 0.0) continue;
    Vec u = (1.0 / dist[i]) * (points[i] - anchor);
    double lo = dist[i], hi = dist[i] + cell_diag;
    if (probe(anchor + hi * u) >= bound) {
      radius = std::max(radius, hi);
      continue;
    }
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (probe(anchor + mid * u) >= bound)
        lo = mid;
      else
        hi = mid;
    }
    radius = std::max(radius, hi);
  }
  return radius;
}

inline std::vector<double> pair_margins(const std::vector<Vec>& pts, double R) {
  std::vector<double> m;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) m.push_back(distance(pts[i], pts[j]) - R);
  return m;
}

inline std::string duplicate_note(const std::vector<Vec>& pts, const char* what) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (pts[i] == pts[j]) {
        std::ostringstream os;
        os << "duplicate " << what << " coordinates: points " << i << " and " << j
           << " coincide, so M = 0";
        return os.str();
      }
  return {};
}

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

inline double abs_at(const FunctionEvaluator& f, const Vec& t) {
  for (const auto& p : f.singularities())
    if (distance(t, p) == 0.0) throw SingularityHit("evaluation point hits a singularity");
  const double v = std::abs(f(t));
  if (!std::isfinite(v)) throw SingularityHit("non-finite value: evaluation point is singular");
  return v;
}

}  // namespace detail

/// Smallest R with sup_{||t - anchor|| > R} |f(t)| < |f(anchor)|/(N-1).
inline RadiusEstimate decay_radius(const FunctionEvaluator& f, std::size_t N, const Vec& anchor,
                                   const CertifyOptions& opts = {}) {
  if (N < 2) throw InvalidInput("decay_radius: N must be at least 2");
  detail::require_dim(f, anchor.size(), "decay_radius");
  const double peak = std::abs(f(anchor));
  if (!(peak > 0.0) || !std::isfinite(peak))
    throw NumericalRefusal("decay_radius: |f(anchor)| must be finite and nonzero");
  const double bound = detail::bound_for(peak, N);

  if (const auto& env = f.envelope()) {
    auto around = [&](double r) { return env->around(anchor, r); };
    return {detail::envelope_radius(around, bound, opts.horizon, opts.tolerance),
            SupMethod::Envelope, std::nullopt};
  }
  if (opts.rigorous)
    throw NumericalRefusal("decay_radius: no envelope available and rigorous mode requested");

  const GridSpec spec = opts.grid_for(f.dim());
  const TensorGrid grid(spec, f.dim());
  std::vector<Vec> pts;
  std::vector<double> vals;
  Vec t(f.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, t);
    if (near_singularity(t, f.singularities(), spec.exclusion_radius)) continue;
    const double v = std::abs(f(t));
    if (!std::isfinite(v)) continue;
    pts.push_back(t);
    vals.push_back(v);
  }
  const double diag = spec.step() * std::sqrt(static_cast<double>(f.dim()));
  const double R = detail::sampled_radius(pts, vals, anchor, bound, diag, opts.tolerance,
                                          [&](const Vec& p) { return std::abs(f(p)); });
  return {R, SupMethod::DenseSample, spec};
}

/// Checks |f(anchor + x_i - x_j)| < |f(anchor)|/(N-1) at every ordered pair.
inline Certificate check_lemma1(const FunctionEvaluator& f, const std::vector<Vec>& S,
                                std::optional<Vec> anchor = std::nullopt) {
  if (S.empty()) throw InvalidInput("check_lemma1: S must be nonempty");
  const Vec a = anchor.value_or(detail::zeros(f.dim()));
  detail::require_dim(f, a.size(), "check_lemma1");
  Certificate c;
  c.theorem = Theorem::Lemma1;
  c.N = S.size();
  c.sup_method = SupMethod::Pointwise;
  c.peak = detail::abs_at(f, a);
  c.bound = detail::bound_for(c.peak, c.N);
  c.M = min_pairwise_distance(S);
  if (c.N >= 2 && !(c.peak > 0.0))
    throw NumericalRefusal("check_lemma1: f vanishes at the anchor");
  bool ok = true;
  for (std::size_t i = 0; i < S.size(); ++i) {
    for (std::size_t j = 0; j < S.size(); ++j) {
      if (i == j) continue;
      detail::require_dim(f, S[i].size(), "check_lemma1");
      const double v = detail::abs_at(f, a + (S[i] - S[j]));
      const double margin = c.bound - v;
      c.margins.push_back(margin);
      ok = ok && margin > 0.0;
    }
  }
  c.verdict = ok ? Verdict::Certified : Verdict::NotCertified;
  if (c.N >= 2) c.note = detail::duplicate_note(S, "S");
  return c;
}

/// Time-separation criterion: certified iff min ||x_i - x_j|| > decay radius.
/// The anchor defaults to the envelope centre (or the origin).
inline Certificate check_theorem1(const FunctionEvaluator& f, const PointSet& lam,
                                  const CertifyOptions& opts = {},
                                  std::optional<Vec> anchor = std::nullopt) {
  detail::require_dim(f, lam.dim(), "check_theorem1");
  if (!f.singularities().empty())
    throw InvalidInput("check_theorem1: f has singularities; use check_theorem2");
  const Vec a = anchor ? *anchor
                       : (f.envelope() ? f.envelope()->center : detail::zeros(f.dim()));
  Certificate c;
  c.theorem = Theorem::Thm1;
  c.N = lam.size();
  c.peak = std::abs(f(a));
  c.bound = detail::bound_for(c.peak, c.N);
  const auto times = lam.times();
  c.M = min_pairwise_distance(times);
  if (c.N == 1) {
    c.verdict = Verdict::Certified;
    c.sup_method = f.envelope() ? SupMethod::Envelope : SupMethod::Pointwise;
    return c;
  }
  const auto est = decay_radius(f, c.N, a, opts);
  c.R = est.radius;
  c.sup_method = est.method;
  c.margins = detail::pair_margins(times, c.R);
  c.verdict = c.M > c.R ? Verdict::Certified : Verdict::NotCertified;
  c.note = detail::duplicate_note(times, "time");
  return c;
}

/// Scans candidate anchors (the origin first, then grid points where |f| is at
/// least half its sampled max) for the largest Lemma 1 min-margin.
inline std::optional<Vec> best_translate(const FunctionEvaluator& f, const std::vector<Vec>& S,
                                         const GridSpec& spec) {
  auto min_margin = [&](const Vec& a) -> std::optional<double> {
    try {
      const auto c = check_lemma1(f, S, a);
      double m = std::numeric_limits<double>::infinity();
      for (double x : c.margins) m = std::min(m, x);
      return m;
    } catch (const NumericalRefusal&) {
      return std::nullopt;
    }
  };
  const Vec origin = detail::zeros(f.dim());
  if (auto m = min_margin(origin); m && *m > 0.0) return origin;

  const TensorGrid grid(spec, f.dim());
  std::vector<Vec> pts;
  std::vector<double> vals;
  double vmax = 0.0;
  Vec t(f.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, t);
    if (near_singularity(t, f.singularities(), spec.exclusion_radius)) continue;
    const double v = std::abs(f(t));
    if (!std::isfinite(v)) continue;
    pts.push_back(t);
    vals.push_back(v);
    vmax = std::max(vmax, v);
  }
  std::optional<Vec> best;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (vals[i] < 0.5 * vmax || vals[i] == 0.0) continue;
    const auto m = min_margin(pts[i]);
    if (m && *m > best_margin) {
      best_margin = *m;
      best = pts[i];
    }
  }
  if (best && best_margin > 0.0) return best;
  return std::nullopt;
}

/// r^{-n/2} f(t/r), i.e. D_{1/r} f: the decay radius scales by r. This is the
/// scale parameter the dilation thresholds below are stated in.
inline FunctionEvaluator dilate_by_scale(const FunctionEvaluator& f, double r) {
  if (!(r > 0.0)) throw InvalidInput("dilate_by_scale: r must be positive");
  return dilate(f, 1.0 / r);
}

/// M/R: every scale r in (0, M/R) certifies dilate_by_scale(f, r) under
/// check_theorem1. Infinite when the decay radius is 0.
inline double dilation_threshold(const FunctionEvaluator& f, const PointSet& lam,
                                 const CertifyOptions& opts = {}) {
  if (!f.envelope() && opts.rigorous)
    throw NumericalRefusal("dilation_threshold: rigorous mode needs an envelope");
  if (lam.size() < 2) return std::numeric_limits<double>::infinity();
  const double M = min_pairwise_distance(lam.times());
  if (!(M > 0.0)) throw InvalidInput("dilation_threshold: minimum time separation M is 0");
  const Vec a = f.envelope() ? f.envelope()->center : detail::zeros(f.dim());
  const double R = decay_radius(f, lam.size(), a, opts).radius;
  if (R == 0.0) return std::numeric_limits<double>::infinity();
  return M / R;
}

/// Theorem 1 applied to dilate_by_scale(f, r); r defaults to half the threshold.
inline Certificate check_corollary1(const FunctionEvaluator& f, const PointSet& lam,
                                    std::optional<double> r = std::nullopt,
                                    const CertifyOptions& opts = {}) {
  const double thr = dilation_threshold(f, lam, opts);
  const double scale = r.value_or(std::isfinite(thr) ? 0.5 * thr : 1.0);
  Certificate c = check_theorem1(dilate_by_scale(f, scale), lam, opts);
  c.theorem = Theorem::Cor1;
  c.threshold_r = thr;
  std::ostringstream os;
  os << "scale r = " << scale;
  if (!c.note.empty()) os << "; " << c.note;
  c.note = os.str();
  return c;
}

/// Lambda' = {(omega_i, -x_i)}.
inline PointSet rotate_to_frequency(const PointSet& lam) {
  std::vector<TFPoint> out;
  for (const auto& p : lam) out.emplace_back(p.omega, -1.0 * p.x);
  return PointSet(std::move(out));
}

/// Frequency-separation criterion: Theorem 1 on fhat with the rotated set.
/// Without an analytic envelope for fhat the sup is DenseSample.
inline Certificate check_corollary2(const FunctionEvaluator& f, const PointSet& lam,
                                    const GridSpec& grid, const CertifyOptions& opts = {},
                                    std::optional<Envelope> fhat_envelope = std::nullopt) {
  FunctionEvaluator fh = fourier(f, grid);
  if (fhat_envelope) fh = fh.with_envelope(fhat_envelope->bound, fhat_envelope->center);
  Certificate c = check_theorem1(fh, rotate_to_frequency(lam), opts, detail::zeros(f.dim()));
  c.theorem = Theorem::Cor2;
  if (!c.note.empty()) c.note = "in rotated set: " + c.note;
  return c;
}

/// R_hat / M_omega: every scale r' above it certifies dilate_by_scale(f, r')
/// under check_corollary2.
inline double dilation_threshold_freq(const FunctionEvaluator& f, const PointSet& lam,
                                      const GridSpec& grid, const CertifyOptions& opts = {}) {
  if (lam.size() < 2) return 0.0;
  const double Mw = min_pairwise_distance(lam.frequencies());
  if (!(Mw > 0.0))
    throw InvalidInput("dilation_threshold_freq: minimum frequency separation is 0");
  const auto fh = fourier(f, grid);
  const double Rh = decay_radius(fh, lam.size(), detail::zeros(f.dim()), opts).radius;
  return Rh / Mw;
}

/// Corollary 2 applied to dilate_by_scale(f, r); r defaults to twice the threshold.
inline Certificate check_corollary3(const FunctionEvaluator& f, const PointSet& lam,
                                    const GridSpec& grid, std::optional<double> r = std::nullopt,
                                    const CertifyOptions& opts = {}) {
  const double thr = dilation_threshold_freq(f, lam, grid, opts);
  const double scale = r.value_or(thr > 0.0 ? 2.0 * thr : 1.0);
  Certificate c = check_corollary2(dilate_by_scale(f, scale), lam, grid, opts);
  c.theorem = Theorem::Cor3;
  c.threshold_r = thr;
  std::ostringstream os;
  os << "scale r = " << scale;
  if (!c.note.empty()) os << "; " << c.note;
  c.note = os.str();
  return c;
}

/// Singular functions: with R the minimal time separation and
/// A = sup_{||t - p|| >= R/2} |f|, find x with ||x - p|| < R/2 and
/// |f(x)| > A(N-1), then confirm with check_lemma1 anchored at x.
inline Certificate check_theorem2(const FunctionEvaluator& f, const PointSet& lam,
                                  const CertifyOptions& opts = {}) {
  detail::require_dim(f, lam.dim(), "check_theorem2");
  if (f.singularities().size() != 1)
    throw InvalidInput("check_theorem2: f must have exactly one singularity");
  const Vec p = f.singularities().front();
  const std::size_t n = f.dim();
  Certificate c;
  c.theorem = Theorem::Thm2;
  c.N = lam.size();
  const auto times = lam.times();

  if (c.N == 1) {
    Vec x = p;
    x[0] += 1e-3;
    c.translate_x = x;
    c.peak = detail::abs_at(f, x);
    c.bound = detail::bound_for(c.peak, 1);
    c.M = std::numeric_limits<double>::infinity();
    c.sup_method = SupMethod::Pointwise;
    c.verdict = Verdict::Certified;
    return c;
  }

  const double R = min_pairwise_distance(times);
  if (!(R > 0.0)) throw InvalidInput("check_theorem2: minimum time separation R is 0");
  c.R = R;
  c.M = R;

  double A = 0.0;
  if (const auto& env = f.envelope()) {
    A = env->around(p, 0.5 * R);
    c.sup_method = SupMethod::Envelope;
  } else {
    if (opts.rigorous) throw NumericalRefusal("check_theorem2: rigorous mode needs an envelope");
    const GridSpec spec = opts.grid_for(n);
    const TensorGrid grid(spec, n);
    Vec t(n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid.point(i, t);
      if (distance(t, p) < 0.5 * R) continue;
      const double v = std::abs(f(t));
      if (std::isfinite(v)) A = std::max(A, v);
    }
    c.sup_method = SupMethod::DenseSample;
  }
  if (!std::isfinite(A))
    throw NumericalRefusal("check_theorem2: f is unbounded away from its singularity");
  const double target = A * static_cast<double>(c.N - 1);

  auto value_at = [&](const Vec& x) {
    const double v = std::abs(f(x));
    return std::isfinite(v) ? v : 0.0;
  };
  std::optional<Vec> found;
  for (int k = 1; k <= 200 && !found; ++k) {
    const double rho = 0.5 * R * std::ldexp(1.0, -k);
    for (std::size_t d = 0; d < n && !found; ++d) {
      for (double sgn : {1.0, -1.0}) {
        Vec u(n, 0.0);
        u[d] = sgn;
        if (!(value_at(p + rho * u) > target)) continue;
        double lo = rho, hi = 2.0 * rho;
        while (hi - lo > opts.tolerance * rho) {
          const double mid = 0.5 * (lo + hi);
          if (value_at(p + mid * u) > target)
            lo = mid;
          else
            hi = mid;
        }
        found = p + lo * u;
        break;
      }
    }
  }
  if (!found) {
    c.verdict = Verdict::NotCertified;
    c.note = "no point within R/2 of the singularity exceeds A(N-1)";
    return c;
  }
  c.translate_x = *found;
  c.peak = detail::abs_at(f, *found);
  c.bound = detail::bound_for(c.peak, c.N);
  c.margins.push_back(c.bound - A);
  const auto lemma = check_lemma1(f, times, *found);
  c.margins.insert(c.margins.end(), lemma.margins.begin(), lemma.margins.end());
  const bool ok = c.bound > A && lemma.certified();
  c.verdict = ok ? Verdict::Certified : Verdict::NotCertified;
  if (!lemma.certified()) c.note = "re-anchored Lemma 1 check failed at the chosen translate";
  return c;
}

/// Lattice over R^{2n}: default half width 8, 128 points per axis.
inline GridSpec default_stft_lattice() { return {8.0, 128, 0.0}; }

/// Time-frequency separation criterion via the STFT. R comes from a
/// caller-supplied radial envelope of |V_g f| (rigorous) or a lattice scan
/// refined along rays (DenseSample).
inline Certificate check_theorem3(const FunctionEvaluator& f, const FunctionEvaluator& g,
                                  const PointSet& lam, const GridSpec& grid,
                                  const GridSpec& lattice = default_stft_lattice(),
                                  const CertifyOptions& opts = {},
                                  std::optional<std::function<double(double)>> stft_envelope =
                                      std::nullopt) {
  detail::require_dim(f, lam.dim(), "check_theorem3");
  detail::require_dim(g, lam.dim(), "check_theorem3");
  const std::size_t n = f.dim();
  const TFPoint origin(detail::zeros(n), detail::zeros(n));
  const Complex ip = stft(f, g, origin, grid);
  if (std::abs(ip) < 1e-12)
    throw NumericalRefusal("check_theorem3: <f, g> vanishes; certificate undefined");
  Certificate c;
  c.theorem = Theorem::Thm3;
  c.N = lam.size();
  c.peak = std::abs(ip);
  c.bound = detail::bound_for(c.peak, c.N);
  std::vector<Vec> joined;
  for (const auto& p : lam) joined.push_back(p.joined());
  c.M = min_pairwise_distance(joined);
  if (c.N == 1) {
    c.verdict = Verdict::Certified;
    c.sup_method = stft_envelope ? SupMethod::Envelope : SupMethod::DenseSample;
    return c;
  }

  if (stft_envelope) {
    c.R = detail::envelope_radius(*stft_envelope, c.bound, opts.horizon, opts.tolerance);
    c.sup_method = SupMethod::Envelope;
  } else {
    if (opts.rigorous)
      throw NumericalRefusal("check_theorem3: rigorous mode needs an STFT envelope");
    const TensorGrid axis(lattice, n);
    std::vector<Vec> xs(axis.size());
    for (std::size_t i = 0; i < axis.size(); ++i) {
      xs[i].resize(n);
      axis.point(i, xs[i]);
    }
    const auto V = stft_lattice(f, g, xs, xs, grid);
    std::vector<Vec> pts;
    std::vector<double> vals;
    pts.reserve(V.size());
    vals.reserve(V.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < xs.size(); ++j) {
        Vec lamv = xs[i];
        lamv.insert(lamv.end(), xs[j].begin(), xs[j].end());
        pts.push_back(std::move(lamv));
        vals.push_back(std::abs(V[i * xs.size() + j]));
      }
    const double diag = lattice.step() * std::sqrt(2.0 * static_cast<double>(n));
    auto probe = [&](const Vec& lv) {
      const TFPoint q(Vec(lv.begin(), lv.begin() + n), Vec(lv.begin() + n, lv.end()));
      return std::abs(stft(f, g, q, grid));
    };
    c.R = detail::sampled_radius(pts, vals, detail::zeros(2 * n), c.bound, diag, opts.tolerance,
                                 probe);
    c.sup_method = SupMethod::DenseSample;
  }
  c.margins = detail::pair_margins(joined, c.R);
  c.verdict = c.M > c.R ? Verdict::Certified : Verdict::NotCertified;
  c.note = detail::duplicate_note(joined, "time-frequency");
  return c;
}

}  // namespace tfcert
