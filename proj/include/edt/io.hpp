// JSON schemas shared by the library and the CLI.  Matrices travel as
// {"dim": d, "re": [[..]], "im": [[..]]}; measurement objects reuse that
// schema.  Reading and writing files is the CLI's job, not this header's.
#pragma once

#include <json.hpp>

#include "edt/entropy.hpp"
#include "edt/measurement.hpp"
#include "edt/tradeoff.hpp"

namespace edt::io {

using Json = nlohmann::json;

// Infinite values (legitimate relative-entropy results) are tagged strings,
// since JSON numbers cannot carry them.
inline Json encode_number(double v) {
  if (std::isfinite(v)) return Json(v);
  return Json(v > 0 ? "infinity" : "-infinity");
}

inline double decode_number(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "infinity") return std::numeric_limits<double>::infinity();
    if (s == "-infinity") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("decode_number: unrecognized numeric tag '" + s + "'");
  }
  return j.get<double>();
}

inline std::string flavor_name(Flavor f) {
  return f == Flavor::relative_entropy ? "relative-entropy" : "conditional-entropy";
}

inline Flavor flavor_from_name(const std::string& s) {
  if (s == "relative-entropy") return Flavor::relative_entropy;
  if (s == "conditional-entropy") return Flavor::conditional_entropy;
  throw std::invalid_argument("unknown flavor '" + s + "'");
}

inline std::string base_name(LogBase b) { return b == LogBase::bits ? "bits" : "nats"; }

// ---------------------------------------------------------------------------
// Matrices.
// ---------------------------------------------------------------------------

inline Json matrix_to_json(const ComplexMatrix<double>& m) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json re_row = Json::array(), im_row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return Json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

/// Structural parse only; invariants are the value types' business.
inline ComplexMatrix<double> matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re"))
    throw std::invalid_argument("matrix: expected {\"dim\", \"re\"[, \"im\"]}");
  const auto d = j.at("dim").get<Eigen::Index>();
  if (d < 1) throw std::invalid_argument("matrix: dim must be >= 1");
  ComplexMatrix<double> m(d, d);
  const Json& re = j.at("re");
  const Json* im = j.contains("im") ? &j.at("im") : nullptr;
  if (!re.is_array() || static_cast<Eigen::Index>(re.size()) != d ||
      (im && static_cast<Eigen::Index>(im->size()) != d))
    throw std::invalid_argument("matrix: re/im must be dim x dim arrays");
  for (Eigen::Index i = 0; i < d; ++i) {
    const Json& re_row = re.at(i);
    if (!re_row.is_array() || static_cast<Eigen::Index>(re_row.size()) != d)
      throw std::invalid_argument("matrix: re/im must be dim x dim arrays");
    for (Eigen::Index jj = 0; jj < d; ++jj) {
      const double x = re_row.at(jj).get<double>();
      const double y = im ? im->at(i).at(jj).get<double>() : 0.0;
      m(i, jj) = std::complex<double>(x, y);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Measurement objects.
// ---------------------------------------------------------------------------

inline Json povm_to_json(const Povm<double>& p) {
  Json effects = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) effects.push_back(matrix_to_json(p.effect(i)));
  return Json{{"outcomes", p.outcomes()}, {"effects", std::move(effects)}};
}

inline Povm<double> povm_from_json(const Json& j) {
  auto outcomes = j.at("outcomes").get<std::vector<Label>>();
  std::vector<ComplexMatrix<double>> effects;
  for (const auto& e : j.at("effects")) effects.push_back(matrix_from_json(e));
  return Povm<double>(std::move(outcomes), std::move(effects));
}

inline Json sharp_to_json(const SharpObservable<double>& s) {
  Json projectors = Json::array();
  for (Eigen::Index i = 0; i < s.size(); ++i) projectors.push_back(matrix_to_json(s.projector(i)));
  std::vector<double> ev(s.eigenvalues().data(), s.eigenvalues().data() + s.eigenvalues().size());
  return Json{{"eigenvalues", std::move(ev)}, {"projectors", std::move(projectors)}};
}

inline SharpObservable<double> sharp_from_json(const Json& j) {
  if (j.contains("projectors")) {
    auto ev = j.at("eigenvalues").get<std::vector<double>>();
    RealVector<double> eigenvalues =
        Eigen::Map<const RealVector<double>>(ev.data(), static_cast<Eigen::Index>(ev.size()));
    std::vector<ComplexMatrix<double>> projectors;
    for (const auto& p : j.at("projectors")) projectors.push_back(matrix_from_json(p));
    return SharpObservable<double>(std::move(eigenvalues), std::move(projectors));
  }
  return SharpObservable<double>::from_matrix(matrix_from_json(j));
}

inline Json instrument_to_json(const Instrument<double>& inst) {
  Json kraus = Json::array();
  for (Eigen::Index x = 0; x < inst.n_outcomes(); ++x) {
    Json set = Json::array();
    for (const auto& k : inst.kraus_set(x)) set.push_back(matrix_to_json(k));
    kraus.push_back(std::move(set));
  }
  return Json{{"outcomes", inst.outcomes()}, {"kraus", std::move(kraus)}};
}

inline Instrument<double> instrument_from_json(const Json& j) {
  auto outcomes = j.at("outcomes").get<std::vector<Label>>();
  std::vector<std::vector<ComplexMatrix<double>>> kraus;
  for (const auto& set : j.at("kraus")) {
    std::vector<ComplexMatrix<double>> ops;
    for (const auto& k : set) ops.push_back(matrix_from_json(k));
    kraus.push_back(std::move(ops));
  }
  return Instrument<double>(std::move(outcomes), std::move(kraus));
}

inline Json biobservable_to_json(const BiObservable<double>& m) {
  Json effects = Json::array();
  for (Eigen::Index x = 0; x < m.nx(); ++x) {
    Json row = Json::array();
    for (Eigen::Index y = 0; y < m.ny(); ++y) row.push_back(matrix_to_json(m.effect(x, y)));
    effects.push_back(std::move(row));
  }
  return Json{{"x_outcomes", m.x_outcomes()},
              {"y_outcomes", m.y_outcomes()},
              {"effects", std::move(effects)}};
}

inline BiObservable<double> biobservable_from_json(const Json& j) {
  auto xl = j.at("x_outcomes").get<std::vector<Label>>();
  auto yl = j.at("y_outcomes").get<std::vector<Label>>();
  std::vector<std::vector<ComplexMatrix<double>>> effects;
  for (const auto& row : j.at("effects")) {
    std::vector<ComplexMatrix<double>> r;
    for (const auto& e : row) r.push_back(matrix_from_json(e));
    effects.push_back(std::move(r));
  }
  return BiObservable<double>(std::move(xl), std::move(yl), std::move(effects));
}

// ---------------------------------------------------------------------------
// Distributions.
// ---------------------------------------------------------------------------

inline Json distribution_to_json(const Distribution<double>& d) {
  std::vector<double> p(d.probabilities().data(), d.probabilities().data() + d.size());
  return Json{{"outcomes", d.outcomes()}, {"probabilities", std::move(p)}};
}

inline Distribution<double> distribution_from_json(const Json& j) {
  auto outcomes = j.at("outcomes").get<std::vector<Label>>();
  auto p = j.at("probabilities").get<std::vector<double>>();
  return Distribution<double>(std::move(outcomes),
                              Eigen::Map<const RealVector<double>>(
                                  p.data(), static_cast<Eigen::Index>(p.size())));
}

inline Json joint_to_json(const JointDistribution<double>& d) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < d.probabilities().rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j2 = 0; j2 < d.probabilities().cols(); ++j2)
      r.push_back(d.probabilities()(i, j2));
    rows.push_back(std::move(r));
  }
  return Json{{"row_outcomes", d.row_outcomes()},
              {"col_outcomes", d.col_outcomes()},
              {"probabilities", std::move(rows)}};
}

inline JointDistribution<double> joint_from_json(const Json& j) {
  auto rows = j.at("row_outcomes").get<std::vector<Label>>();
  auto cols = j.at("col_outcomes").get<std::vector<Label>>();
  const Json& p = j.at("probabilities");
  RealMatrix<double> m(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t jj = 0; jj < cols.size(); ++jj) m(i, jj) = p.at(i).at(jj).get<double>();
  return JointDistribution<double>(std::move(rows), std::move(cols), std::move(m));
}

// ---------------------------------------------------------------------------
// Optimizer config and results.
// ---------------------------------------------------------------------------

inline Json config_to_json(const MinimaxConfig& c) {
  return Json{{"n_state_restarts", c.n_state_restarts},
              {"n_povm_restarts", c.n_povm_restarts},
              {"inner_grid_resolution", c.inner_grid_resolution},
              {"convergence_tol", c.convergence_tol},
              {"max_iterations", c.max_iterations},
              {"seed", c.seed}};
}

inline MinimaxConfig config_from_json(const Json& j) {
  MinimaxConfig c;
  if (j.contains("n_state_restarts")) c.n_state_restarts = j.at("n_state_restarts").get<int>();
  if (j.contains("n_povm_restarts")) c.n_povm_restarts = j.at("n_povm_restarts").get<int>();
  if (j.contains("inner_grid_resolution"))
    c.inner_grid_resolution = j.at("inner_grid_resolution").get<int>();
  if (j.contains("convergence_tol")) c.convergence_tol = j.at("convergence_tol").get<double>();
  if (j.contains("max_iterations")) c.max_iterations = j.at("max_iterations").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  validate_config(c);
  return c;
}

inline Json tradeoff_value_to_json(const TradeoffValue<double>& v) {
  return Json{{"error_term", encode_number(v.error_term)},
              {"disturbance_term", encode_number(v.disturbance_term)},
              {"total", encode_number(v.total)},
              {"flavor", flavor_name(v.flavor)}};
}

inline Json minimax_result_to_json(const MinimaxResult<double>& r) {
  Json trace = Json::array();
  for (const auto& [it, v] : r.trace) trace.push_back(Json::array({it, v}));
  return Json{{"value", r.value},
              {"argmin_biobservable", biobservable_to_json(r.argmin_biobservable)},
              {"argmax_state", matrix_to_json(r.argmax_state.matrix())},
              {"trace", std::move(trace)},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"seed", r.seed}};
}

}  // namespace edt::io
