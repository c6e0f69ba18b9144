#pragma once

// Built-in test functions with exact decay envelopes and singularity data.

#include <map>
#include <string>

#include "tfcert/tfops.hpp"

namespace tfcert {

/// Truncated 1/|t| family: C cos(omega t) on |t| < 1/C, cos(omega t)/|t| outside.
/// Continuous at |t| = 1/C; envelope min(C, 1/r).
inline FunctionEvaluator make_example1(double C, double omega) {
  if (!(C > 0.0)) throw InvalidInput("make_example1: C must be positive");
  const double cut = 1.0 / C;
  FunctionEvaluator f(
      1,
      [C, omega, cut](std::span<const double> t) -> Complex {
        const double a = std::abs(t[0]);
        const double c = std::cos(omega * t[0]);
        return a >= cut ? c / a : C * c;
      },
      true, "example1");
  return f.with_envelope([C](double r) { return r > 0.0 ? std::min(C, 1.0 / r) : C; });
}

/// cos(omega t)/|t|^{1/4} on |t| < 1, cos(omega t)/|t| outside. Square
/// integrable, singular at 0; envelope only meaningful for r > 0.
inline FunctionEvaluator make_example2(double omega) {
  FunctionEvaluator f(
      1,
      [omega](std::span<const double> t) -> Complex {
        const double a = std::abs(t[0]);
        const double c = std::cos(omega * t[0]);
        return a < 1.0 ? c / std::pow(a, 0.25) : c / a;
      },
      true, "example2");
  return f
      .with_envelope([](double r) {
        if (r <= 0.0) return std::numeric_limits<double>::infinity();
        return r < 1.0 ? std::pow(r, -0.25) : 1.0 / r;
      })
      .with_singularities({Vec{0.0}});
}

/// cos(omega t)/|t|: singular at 0 and not square integrable there.
inline FunctionEvaluator make_singular_cos(double omega) {
  FunctionEvaluator f(
      1,
      [omega](std::span<const double> t) -> Complex {
        return std::cos(omega * t[0]) / std::abs(t[0]);
      },
      false, "singular_cos");
  return f
      .with_envelope([](double r) {
        return r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
      })
      .with_singularities({Vec{0.0}});
}

/// 2^{n/4} e^{-pi |t|^2}, unit L2 norm, self-dual under the Fourier transform.
inline FunctionEvaluator make_gaussian(std::size_t n = 1) {
  if (n == 0) throw InvalidInput("make_gaussian: dimension must be positive");
  const double amp = std::pow(2.0, 0.25 * static_cast<double>(n));
  FunctionEvaluator f(
      n,
      [amp](std::span<const double> t) -> Complex { return amp * std::exp(-kPi * dot(t, t)); },
      true, "gaussian");
  return f.with_envelope([amp](double r) { return amp * std::exp(-kPi * r * r); });
}

/// Smooth bump exp(1 - 1/(1 - (t/a)^2)) supported in (-a, a), peak 1.
inline FunctionEvaluator make_bump(double radius = 0.4) {
  if (!(radius > 0.0)) throw InvalidInput("make_bump: radius must be positive");
  auto profile = [radius](double r) -> double {
    const double u = r / radius;
    return u < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u * u)) : 0.0;
  };
  FunctionEvaluator f(
      1, [profile](std::span<const double> t) -> Complex { return profile(std::abs(t[0])); }, true,
      "bump");
  return f.with_envelope(profile);
}

/// f(a, b) = int_{1/3}^{2/3} exp(i(a arccos t + b arccos(1 - t))) dt by
/// adaptive Gauss-Legendre to absolute tolerance quad_tol.
inline FunctionEvaluator make_edgar_rosenblatt(double quad_tol = 1e-9) {
  if (!(quad_tol > 0.0) || quad_tol > 1e-3)
    throw InvalidInput("make_edgar_rosenblatt: quad_tol must lie in (0, 1e-3]");
  return FunctionEvaluator(
      2,
      [quad_tol](std::span<const double> ab) -> Complex {
        const double a = ab[0], b = ab[1];
        auto integrand = [a, b](double t) -> Complex {
          return unit_phase(a * std::acos(t) + b * std::acos(1.0 - t));
        };
        return adaptive_gauss_legendre(integrand, 1.0 / 3.0, 2.0 / 3.0, quad_tol);
      },
      false, "edgar_rosenblatt");
}

enum class Family { Example1, Example2, SingularCos, Gaussian, EdgarRosenblatt, Bump };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::Example1: return "Example1";
    case Family::Example2: return "Example2";
    case Family::SingularCos: return "SingularCos";
    case Family::Gaussian: return "Gaussian";
    case Family::EdgarRosenblatt: return "EdgarRosenblatt";
    case Family::Bump: return "Bump";
  }
  return "?";
}

inline Family family_from_string(const std::string& s) {
  for (Family f : {Family::Example1, Family::Example2, Family::SingularCos, Family::Gaussian,
                   Family::EdgarRosenblatt, Family::Bump})
    if (s == to_string(f)) return f;
  throw InvalidInput("unknown function family '" + s + "'");
}

/// A named built-in family plus its parameters.
struct FamilySpec {
  Family family = Family::Gaussian;
  std::map<std::string, double> params;
  double quad_tol = 1e-9;

  double param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }

  void validate() const {
    if (!(quad_tol > 0.0) || quad_tol > 1e-3)
      throw InvalidInput("FamilySpec: quad_tol must lie in (0, 1e-3]");
    static const std::map<Family, std::vector<std::string>> allowed = {
        {Family::Example1, {"C", "omega"}},   {Family::Example2, {"omega"}},
        {Family::SingularCos, {"omega"}},     {Family::Gaussian, {"n"}},
        {Family::EdgarRosenblatt, {}},        {Family::Bump, {"radius"}}};
    const auto& keys = allowed.at(family);
    for (const auto& [k, v] : params) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end())
        throw InvalidInput(std::string("FamilySpec: unknown parameter '") + k + "' for " +
                           to_string(family));
    }
    if (family == Family::Example1 && !(param("C", 0.0) > 0.0))
      throw InvalidInput("FamilySpec: Example1 requires C > 0");
  }
};

inline FunctionEvaluator make_function(const FamilySpec& spec) {
  spec.validate();
  switch (spec.family) {
    case Family::Example1: return make_example1(spec.param("C", 0.0), spec.param("omega", 0.0));
    case Family::Example2: return make_example2(spec.param("omega", 0.0));
    case Family::SingularCos: return make_singular_cos(spec.param("omega", 1.0));
    case Family::Gaussian:
      return make_gaussian(static_cast<std::size_t>(spec.param("n", 1.0)));
    case Family::EdgarRosenblatt: return make_edgar_rosenblatt(spec.quad_tol);
    case Family::Bump: return make_bump(spec.param("radius", 0.4));
  }
  throw InvalidInput("make_function: unhandled family");
}

}  // namespace tfcert
