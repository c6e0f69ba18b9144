#pragma once

// JSON encoding of certificates and reports (schema 1), and decoding of the
// config objects the CLI consumes. Non-finite reals are written as null.

#include <set>

#include "json.hpp"
#include "tfcert/certify.hpp"
#include "tfcert/oracle.hpp"
#include "tfcert/windowsearch.hpp"

namespace tfcert {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {
inline Json real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
inline double real_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

inline void reject_unknown(const Json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + ": expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw InvalidInput(where + ": unknown key '" + k + "'");
}

template <class E>
E enum_from(const std::string& s, std::initializer_list<E> values, const char* what) {
  for (E v : values)
    if (s == to_string(v)) return v;
  throw InvalidInput(std::string("unknown ") + what + " '" + s + "'");
}
}  // namespace detail

inline Json to_json(const Certificate& c) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["theorem"] = to_string(c.theorem);
  j["verdict"] = to_string(c.verdict);
  j["N"] = c.N;
  j["R"] = detail::real(c.R);
  j["M"] = detail::real(c.M);
  j["peak"] = detail::real(c.peak);
  j["bound"] = detail::real(c.bound);
  Json margins = Json::array();
  for (double m : c.margins) margins.push_back(detail::real(m));
  j["margins"] = margins;
  if (c.translate_x) j["translate_x"] = *c.translate_x;
  if (c.threshold_r) j["threshold_r"] = detail::real(*c.threshold_r);
  j["sup_method"] = to_string(c.sup_method);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

/// Inverse of to_json; throws InvalidInput on any schema violation.
inline Certificate certificate_from_json(const Json& j) {
  detail::reject_unknown(j,
                         {"schema", "theorem", "verdict", "N", "R", "M", "peak", "bound", "margins",
                          "translate_x", "threshold_r", "sup_method", "note", "meta"},
                         "certificate");
  try {
    if (j.at("schema").get<int>() != kSchemaVersion) throw InvalidInput("certificate: bad schema");
    Certificate c;
    c.theorem = detail::enum_from<Theorem>(
        j.at("theorem").get<std::string>(),
        {Theorem::Lemma1, Theorem::Thm1, Theorem::Cor1, Theorem::Cor2, Theorem::Cor3,
         Theorem::Thm2, Theorem::Thm3},
        "theorem");
    c.verdict = detail::enum_from<Verdict>(j.at("verdict").get<std::string>(),
                                           {Verdict::Certified, Verdict::NotCertified}, "verdict");
    c.N = j.at("N").get<std::size_t>();
    c.R = detail::real_from(j.at("R"));
    c.M = detail::real_from(j.at("M"));
    c.peak = detail::real_from(j.at("peak"));
    c.bound = detail::real_from(j.at("bound"));
    for (const auto& m : j.at("margins")) c.margins.push_back(detail::real_from(m));
    if (j.contains("translate_x")) c.translate_x = j["translate_x"].get<Vec>();
    if (j.contains("threshold_r")) c.threshold_r = detail::real_from(j["threshold_r"]);
    c.sup_method = detail::enum_from<SupMethod>(
        j.at("sup_method").get<std::string>(),
        {SupMethod::Envelope, SupMethod::DenseSample, SupMethod::Pointwise}, "sup_method");
    if (j.contains("note")) c.note = j["note"].get<std::string>();
    return c;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("certificate: ") + e.what());
  }
}

inline Json to_json(const IndependenceReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["mode"] = to_string(r.mode);
  j["matrix_dim"] = {r.rows, r.cols};
  j["sigma_min"] = detail::real(r.sigma_min);
  j["sigma_max"] = detail::real(r.sigma_max);
  j["relative_gap"] = detail::real(r.relative_gap);
  j["verdict"] = to_string(r.verdict);
  j["quad_error_estimate"] = detail::real(r.quad_error_estimate);
  if (r.mode == OracleMode::Gram) j["min_eigenvalue"] = detail::real(r.min_eigenvalue);
  return j;
}

inline Json to_json(const ResidualReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["identity_name"] = r.identity_name;
  j["max_abs_residual"] = detail::real(r.max_abs_residual);
  j["phase_optimized"] = r.phase_optimized;
  j["best_phase"] = {r.best_phase.real(), r.best_phase.imag()};
  j["points"] = r.points;
  return j;
}

inline Json to_json(const WindowParams& p) {
  return Json{{"width", p.width}, {"hermite_coeffs", p.hermite_coeffs}};
}

inline Json to_json(const SearchResult& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["best_params"] = to_json(r.best_params);
  j["ratio"] = detail::real(r.ratio);
  j["target"] = r.target;
  j["achieved"] = r.achieved;
  j["evaluations"] = r.evaluations;
  Json trace = Json::array();
  for (const auto& e : r.trace)
    trace.push_back({{"params", to_json(e.params)},
                     {"ratio", detail::real(e.ratio)},
                     {"incumbent_ratio", detail::real(e.incumbent_ratio)}});
  j["trace"] = trace;
  return j;
}

/// Flat CSV of a search trace: one row per evaluation.
inline std::string trace_csv(const SearchResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "evaluation,width,ratio,incumbent_ratio";
  const std::size_t nc = r.best_params.hermite_coeffs.size();
  for (std::size_t k = 0; k < nc; ++k) os << ",c" << k;
  os << "\n";
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& e = r.trace[i];
    os << i << "," << e.params.width << "," << e.ratio << "," << e.incumbent_ratio;
    for (double c : e.params.hermite_coeffs) os << "," << c;
    os << "\n";
  }
  return os.str();
}

inline std::string matrix_csv(const Eigen::MatrixXcd& m) {
  std::ostringstream os;
  os.precision(17);
  os << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      os << i << "," << k << "," << m(i, k).real() << "," << m(i, k).imag() << "\n";
  return os.str();
}

inline FamilySpec family_spec_from_json(const Json& j) {
  detail::reject_unknown(j, {"family", "params", "quad_tol", "shift"}, "function");
  try {
    FamilySpec s;
    s.family = family_from_string(j.at("family").get<std::string>());
    if (j.contains("params")) {
      detail::reject_unknown(j["params"], {"C", "omega", "n", "radius"}, "function.params");
      for (const auto& [k, v] : j["params"].items()) s.params[k] = v.get<double>();
    }
    if (j.contains("quad_tol")) s.quad_tol = j["quad_tol"].get<double>();
    s.validate();
    return s;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("function: ") + e.what());
  }
}

inline Json to_json(const FamilySpec& s) {
  Json j;
  j["family"] = to_string(s.family);
  j["params"] = Json::object();
  for (const auto& [k, v] : s.params) j["params"][k] = v;
  j["quad_tol"] = s.quad_tol;
  return j;
}

/// Applies overrides from `j` on top of `base`.
inline GridSpec grid_from_json(const Json& j, GridSpec base) {
  detail::reject_unknown(j, {"half_width", "samples_per_axis", "exclusion_radius"}, "grid");
  try {
    if (j.contains("half_width")) base.half_width = j["half_width"].get<double>();
    if (j.contains("samples_per_axis")) base.samples_per_axis = j["samples_per_axis"].get<int>();
    if (j.contains("exclusion_radius")) base.exclusion_radius = j["exclusion_radius"].get<double>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("grid: ") + e.what());
  }
  base.validate();
  return base;
}

/// Rows [x_1..x_n, omega_1..omega_n].
inline PointSet point_set_from_json(const Json& j, std::size_t n) {
  if (!j.is_array()) throw InvalidInput("lambda: expected an array of rows");
  std::vector<TFPoint> pts;
  try {
    for (const auto& row : j) {
      const auto v = row.get<Vec>();
      if (v.size() != 2 * n)
        throw InvalidInput("lambda: each row needs " + std::to_string(2 * n) + " numbers");
      pts.emplace_back(Vec(v.begin(), v.begin() + n), Vec(v.begin() + n, v.end()));
    }
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("lambda: ") + e.what());
  }
  return PointSet(std::move(pts));
}

}  // namespace tfcert
