// Batch front end: problem specifications, validation reports, evaluation
// records, optimization runs and the bound-compliance fuzz suite.  All file
// I/O of the project lives here.
#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "edt/io.hpp"

namespace edt::cli {

using io::Json;

// Exit statuses: 0 success, 1 validation failure, 2 non-convergence,
// 3 I/O or parse error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitIoError = 3;

struct CliOptions {
  LogBase base = LogBase::bits;
  std::optional<std::uint64_t> seed;  // overrides the spec's config seed
  std::string out_dir;                // when nonempty, reports are also written here
  std::string csv_path;               // evaluate: append a CSV row
};

// ---------------------------------------------------------------------------
// Problem specifications.
// ---------------------------------------------------------------------------

struct ProblemSpec {
  std::string id;
  Eigen::Index dimension;
  SharpObservable<double> a;
  SharpObservable<double> b;
  std::optional<BiObservable<double>> biobservable;
  Flavor flavor;
  enum class StateKind { matrix, uniform_ensemble, maximize };
  StateKind state_kind;
  std::optional<DensityMatrix<double>> state;
  MinimaxConfig config;
};

namespace detail {

inline SharpObservable<double> observable_from_json(const Json& node, Eigen::Index dimension) {
  if (node.is_string()) {
    const auto name = node.get<std::string>();
    if (dimension != 2)
      throw std::invalid_argument("preset observable '" + name + "' requires dimension 2");
    if (name == "Z") return pauli_z<double>();
    if (name == "X") return pauli_x<double>();
    if (name == "Y") return pauli_y<double>();
    throw std::invalid_argument("unknown observable preset '" + name + "'");
  }
  auto obs = SharpObservable<double>::from_matrix(io::matrix_from_json(node));
  if (obs.dim() != dimension)
    throw std::invalid_argument("observable dimension does not match the problem dimension");
  return obs;
}

inline BiObservable<double> biobservable_from_spec(const Json& node,
                                                   const SharpObservable<double>& a,
                                                   const SharpObservable<double>& b) {
  const auto type = node.at("type").get<std::string>();
  if (type == "explicit") {
    Json j = node;
    if (!j.contains("x_outcomes")) j["x_outcomes"] = a.outcome_labels();
    if (!j.contains("y_outcomes")) j["y_outcomes"] = b.outcome_labels();
    return io::biobservable_from_json(j);
  }
  if (type == "sequential") {
    const Json& inst_node = node.at("instrument");
    Instrument<double> inst =
        inst_node.is_string() && inst_node.get<std::string>() == "luders-a"
            ? luders_instrument(sharp_to_povm(a))
            : io::instrument_from_json(inst_node);
    return sequential_biobservable(inst, sharp_to_povm(b));
  }
  if (type == "commuting") return commuting_biobservable(sharp_to_povm(a), sharp_to_povm(b));
  if (type == "qubit-orthogonal") return orthogonal_qubit_biobservable(a, b);
  throw std::invalid_argument("unknown biobservable type '" + type + "'");
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  return Json::parse(in);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace detail

inline ProblemSpec parse_problem(const Json& j, const CliOptions& opts) {
  const auto id = j.contains("id") ? j.at("id").get<std::string>() : std::string("problem");
  const auto dimension = j.at("dimension").get<Eigen::Index>();
  auto a = detail::observable_from_json(j.at("a"), dimension);
  auto b = detail::observable_from_json(j.at("b"), dimension);
  if (a.dim() != b.dim()) throw std::invalid_argument("observables have different dimensions");

  std::optional<BiObservable<double>> m;
  if (j.contains("biobservable")) {
    m = detail::biobservable_from_spec(j.at("biobservable"), a, b);
    if (m->dim() != dimension)
      throw std::invalid_argument("biobservable dimension does not match the problem dimension");
  }

  const Flavor flavor = io::flavor_from_name(j.at("flavor").get<std::string>());

  ProblemSpec::StateKind kind;
  std::optional<DensityMatrix<double>> state;
  const Json& state_node = j.at("state");
  if (state_node.is_string()) {
    const auto s = state_node.get<std::string>();
    if (s == "uniform-ensemble") kind = ProblemSpec::StateKind::uniform_ensemble;
    else if (s == "maximize") kind = ProblemSpec::StateKind::maximize;
    else throw std::invalid_argument("unknown state spec '" + s + "'");
  } else {
    kind = ProblemSpec::StateKind::matrix;
    state = DensityMatrix<double>(io::matrix_from_json(state_node));
    if (state->dim() != dimension)
      throw std::invalid_argument("state dimension does not match the problem dimension");
  }

  MinimaxConfig config =
      j.contains("config") ? io::config_from_json(j.at("config")) : MinimaxConfig{};
  if (opts.seed) config.seed = *opts.seed;

  return ProblemSpec{id, dimension, std::move(a), std::move(b), std::move(m),
                     flavor, kind, std::move(state), config};
}

// ---------------------------------------------------------------------------
// Evaluation records.
// ---------------------------------------------------------------------------

struct OptimizerMeta {
  int iterations;
  bool converged;
  std::uint64_t seed;
};

struct ReportRecord {
  std::string problem_id;
  Flavor flavor;
  LogBase base;
  double error_term;
  double disturbance_term;
  double total;
  double bound;  // -log c for the problem's target pair
  double slack;  // total - bound
  bool bound_is_binding;  // the bound constrains calibration totals only
  std::optional<OptimizerMeta> optimizer;
};

inline Json record_to_json(const ReportRecord& r) {
  Json j{{"problem_id", r.problem_id},
         {"flavor", io::flavor_name(r.flavor)},
         {"unit", io::base_name(r.base)},
         {"error_term", io::encode_number(r.error_term)},
         {"disturbance_term", io::encode_number(r.disturbance_term)},
         {"total", io::encode_number(r.total)},
         {"bound", io::encode_number(r.bound)},
         {"slack", io::encode_number(r.slack)},
         {"bound_is_binding", r.bound_is_binding}};
  if (r.optimizer)
    j["optimizer"] = Json{{"iterations", r.optimizer->iterations},
                          {"converged", r.optimizer->converged},
                          {"seed", r.optimizer->seed}};
  return j;
}

inline std::string record_csv_header() {
  return "problem_id,flavor,unit,error_term,disturbance_term,total,bound,slack,bound_is_binding\n";
}

inline std::string record_csv_row(const ReportRecord& r) {
  std::ostringstream os;
  os << std::setprecision(17) << r.problem_id << ',' << io::flavor_name(r.flavor) << ','
     << io::base_name(r.base) << ',' << r.error_term << ',' << r.disturbance_term << ','
     << r.total << ',' << r.bound << ',' << r.slack << ',' << (r.bound_is_binding ? 1 : 0)
     << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// validate: run every invariant and list each check.
// ---------------------------------------------------------------------------

namespace detail {

inline void append(std::vector<Check>& out, std::vector<Check> more) {
  out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

inline void observable_checks(const Json& node, Eigen::Index dimension, const std::string& name,
                              std::vector<Check>& out) {
  if (node.is_string()) {
    const auto preset = node.get<std::string>();
    const bool known = preset == "Z" || preset == "X" || preset == "Y";
    out.push_back(make_check(name, "known preset", known ? 0.0 : 1.0, 0.0));
    out.push_back(make_check(name, "preset dimension", (known && dimension == 2) ? 0.0 : 1.0, 0.0));
    return;
  }
  ComplexMatrix<double> m;
  try {
    m = io::matrix_from_json(node);
  } catch (const std::exception&) {
    out.push_back(make_check(name, "parseable matrix", 1.0, 0.0));
    return;
  }
  out.push_back(make_check(name, "parseable matrix", 0.0, 0.0));
  out.push_back(make_check(name, "dimension consistency", m.rows() == dimension ? 0.0 : 1.0, 0.0));
  auto herm = checks::hermitian(m, name);
  const bool hermitian_ok = std::all_of(herm.begin(), herm.end(), [](const Check& c) { return c.pass; });
  append(out, std::move(herm));
  if (!hermitian_ok) return;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<double>> es(m);
  std::vector<ComplexMatrix<double>> projectors;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ComplexVector<double> v = es.eigenvectors().col(i);
    projectors.push_back(v * v.adjoint());
  }
  append(out, checks::sharp_observable<double>(es.eigenvalues(), projectors, name));
}

}  // namespace detail

inline std::vector<Check> validate_problem_json(const Json& j) {
  std::vector<Check> out;
  for (const char* field : {"dimension", "a", "b", "flavor", "state"})
    out.push_back(make_check("spec", std::string("field '") + field + "' present",
                             j.contains(field) ? 0.0 : 1.0, 0.0));
  if (!std::all_of(out.begin(), out.end(), [](const Check& c) { return c.pass; })) return out;

  const auto dimension = j.at("dimension").get<Eigen::Index>();
  out.push_back(make_check("spec", "dimension >= 1", dimension >= 1 ? 0.0 : 1.0, 0.0));
  detail::observable_checks(j.at("a"), dimension, "observable a", out);
  detail::observable_checks(j.at("b"), dimension, "observable b", out);

  try {
    io::flavor_from_name(j.at("flavor").get<std::string>());
    out.push_back(make_check("spec", "known flavor", 0.0, 0.0));
  } catch (const std::exception&) {
    out.push_back(make_check("spec", "known flavor", 1.0, 0.0));
  }

  const Json& state_node = j.at("state");
  if (state_node.is_string()) {
    const auto s = state_node.get<std::string>();
    out.push_back(make_check("state", "known state spec",
                             (s == "uniform-ensemble" || s == "maximize") ? 0.0 : 1.0, 0.0));
  } else {
    try {
      auto m = io::matrix_from_json(state_node);
      out.push_back(make_check("state", "parseable matrix", 0.0, 0.0));
      out.push_back(make_check("state", "dimension consistency",
                               m.rows() == dimension ? 0.0 : 1.0, 0.0));
      detail::append(out, checks::density_matrix(m, "state"));
    } catch (const std::exception&) {
      out.push_back(make_check("state", "parseable matrix", 1.0, 0.0));
    }
  }

  if (j.contains("biobservable")) {
    const Json& node = j.at("biobservable");
    const std::string type = node.contains("type") ? node.at("type").get<std::string>() : "";
    if (type == "explicit") {
      try {
        std::vector<std::vector<ComplexMatrix<double>>> effects;
        for (const auto& row : node.at("effects")) {
          effects.emplace_back();
          for (const auto& e : row) effects.back().push_back(io::matrix_from_json(e));
        }
        out.push_back(make_check("biobservable", "parseable effect grid", 0.0, 0.0));
        std::vector<Label> xl(effects.size());
        std::iota(xl.begin(), xl.end(), Label(0));
        std::vector<Label> yl(effects.empty() ? 0 : effects.front().size());
        std::iota(yl.begin(), yl.end(), Label(0));
        detail::append(out, checks::biobservable(xl, yl, effects, "biobservable"));
      } catch (const std::exception&) {
        out.push_back(make_check("biobservable", "parseable effect grid", 1.0, 0.0));
      }
    } else {
      try {
        CliOptions defaults;
        auto spec = parse_problem(j, defaults);
        out.push_back(make_check("biobservable", "constructible (" + type + ")", 0.0, 0.0));
        detail::append(out, checks::biobservable(spec.biobservable->x_outcomes(),
                                                 spec.biobservable->y_outcomes(),
                                                 spec.biobservable->effects(), "biobservable"));
      } catch (const std::exception&) {
        out.push_back(make_check("biobservable", "constructible (" + type + ")", 1.0, 0.0));
      }
    }
  }

  if (j.contains("config")) {
    try {
      io::config_from_json(j.at("config"));
      out.push_back(make_check("config", "valid optimizer config", 0.0, 0.0));
    } catch (const std::exception&) {
      out.push_back(make_check("config", "valid optimizer config", 1.0, 0.0));
    }
  }
  return out;
}

inline int cmd_validate(const std::string& path, const CliOptions&, std::ostream& out,
                        std::ostream& err) {
  Json j;
  try {
    j = detail::load_json_file(path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  const auto checks = validate_problem_json(j);
  bool all_ok = true;
  for (const auto& c : checks) {
    all_ok = all_ok && c.pass;
    out << (c.pass ? "[PASS] " : "[FAIL] ") << c.subject << ": " << c.name;
    if (c.tolerance > 0 || c.residual != 0.0)
      out << " (residual " << std::setprecision(3) << std::scientific << c.residual
          << ", tolerance " << c.tolerance << ")" << std::defaultfloat;
    out << "\n";
  }
  out << (all_ok ? "all checks passed" : "validation failed") << " (" << checks.size()
      << " checks)\n";
  return all_ok ? kExitOk : kExitInvalid;
}

// ---------------------------------------------------------------------------
// evaluate: deterministic record for a concrete bi-observable and state.
// ---------------------------------------------------------------------------

inline ReportRecord evaluate_problem(const ProblemSpec& spec, LogBase base) {
  if (!spec.biobservable)
    throw std::invalid_argument("evaluate requires a concrete biobservable");
  if (spec.state_kind == ProblemSpec::StateKind::maximize)
    throw std::invalid_argument("evaluate requires a concrete state; use the optimize command");

  TradeoffValue<double> value{0, 0, 0, spec.flavor};
  bool binding = false;
  if (spec.state_kind == ProblemSpec::StateKind::uniform_ensemble) {
    if (spec.flavor == Flavor::conditional_entropy) {
      value = calibration_tradeoff(spec.a, spec.b, *spec.biobservable, base);
      binding = true;
    } else {
      // Relative-entropy flavor on the ensemble average (maximally mixed).
      DensityMatrix<double> mixed(ComplexMatrix<double>::Identity(spec.dimension, spec.dimension) /
                                  double(spec.dimension));
      value = divergence_pair(mixed, spec.a, spec.b, *spec.biobservable, base);
    }
  } else {
    value = spec.flavor == Flavor::relative_entropy
                ? divergence_pair(*spec.state, spec.a, spec.b, *spec.biobservable, base)
                : conditional_pair(*spec.state, spec.a, spec.b, *spec.biobservable, base);
  }
  const auto bounds = overlap_and_bounds(spec.a, spec.b, base);
  return ReportRecord{spec.id,          spec.flavor,            base,
                      value.error_term, value.disturbance_term, value.total,
                      bounds.mu_bound,  value.total - bounds.mu_bound, binding,
                      std::nullopt};
}

inline int cmd_evaluate(const std::string& path, const CliOptions& opts, std::ostream& out,
                        std::ostream& err) {
  try {
    const auto spec = parse_problem(detail::load_json_file(path), opts);
    const auto record = evaluate_problem(spec, opts.base);
    const std::string text = record_to_json(record).dump(2) + "\n";
    out << text;
    if (!opts.out_dir.empty())
      detail::write_text_file(std::filesystem::path(opts.out_dir) / (spec.id + "_record.json"),
                              text);
    if (!opts.csv_path.empty()) {
      const bool fresh = !std::filesystem::exists(opts.csv_path);
      std::ofstream csv(opts.csv_path, std::ios::app);
      if (!csv) throw std::ios_base::failure("cannot write '" + opts.csv_path + "'");
      if (fresh) csv << record_csv_header();
      csv << record_csv_row(record);
    }
    return kExitOk;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

// ---------------------------------------------------------------------------
// optimize: the mini-max run.
// ---------------------------------------------------------------------------

inline int cmd_optimize(const std::string& path, const CliOptions& opts, std::ostream& out,
                        std::ostream& err) {
  try {
    const auto spec = parse_problem(detail::load_json_file(path), opts);
    if (spec.state_kind != ProblemSpec::StateKind::maximize)
      throw std::invalid_argument("optimize requires state = \"maximize\"");
    const auto result = min_over_biobservables(spec.a, spec.b, spec.flavor, spec.config, opts.base);
    const auto bounds = overlap_and_bounds(spec.a, spec.b, opts.base);

    Json summary = io::minimax_result_to_json(result);
    summary["problem_id"] = spec.id;
    summary["flavor"] = io::flavor_name(spec.flavor);
    summary["unit"] = io::base_name(opts.base);
    summary["bound"] = bounds.mu_bound;
    summary["slack"] = result.value - bounds.mu_bound;

    std::ostringstream csv;
    csv << "iteration,value\n" << std::setprecision(17);
    for (const auto& [it, v] : result.trace) csv << it << ',' << v << '\n';

    const std::filesystem::path dir = opts.out_dir.empty() ? "." : opts.out_dir;
    detail::write_text_file(dir / (spec.id + "_result.json"), summary.dump(2) + "\n");
    detail::write_text_file(dir / (spec.id + "_trace.csv"), csv.str());

    Json brief{{"problem_id", spec.id},     {"value", result.value},
               {"converged", result.converged}, {"iterations", result.iterations},
               {"seed", result.seed},       {"bound", bounds.mu_bound},
               {"slack", result.value - bounds.mu_bound}};
    out << brief.dump(2) << "\n";
    return result.converged ? kExitOk : kExitNotConverged;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

// ---------------------------------------------------------------------------
// fuzz: bound compliance over random instances.
// ---------------------------------------------------------------------------

inline int cmd_fuzz(Eigen::Index dim, int n_trials, std::uint64_t seed, const CliOptions& opts,
                    std::ostream& out, std::ostream& err) {
  if (dim < 2 || dim > 4 || n_trials < 1) {
    err << "error: fuzz requires dimension in {2,3,4} and n_trials >= 1\n";
    return kExitIoError;
  }
  double min_cal_slack = std::numeric_limits<double>::infinity();
  double min_excl_slack = std::numeric_limits<double>::infinity();
  Json violations = Json::array();
  for (int t = 0; t < n_trials; ++t) {
    const auto a = random_sharp_observable<double>(
        dim, edt::detail::mix_seed(seed, 2 * static_cast<std::uint64_t>(t)));
    const auto b = random_sharp_observable<double>(
        dim, edt::detail::mix_seed(seed, 2 * static_cast<std::uint64_t>(t) + 1));
    const auto m = random_biobservable(a, b, edt::detail::mix_seed(seed, 50000 + static_cast<std::uint64_t>(t)));
    const auto bounds = overlap_and_bounds(a, b, opts.base);
    const auto cal = calibration_tradeoff(a, b, m, opts.base);
    const double cal_slack = cal.total - bounds.mu_bound;

    auto [m1, m2] = marginals(m);
    const double i1 = mutual_information(
        master_joint(Distribution<double>::uniform(a.outcome_labels()), a, m1), opts.base);
    const double i2 = mutual_information(
        master_joint(Distribution<double>::uniform(b.outcome_labels()), b, m2), opts.base);
    const double excl_slack = bounds.exclusion_bound - (i1 + i2);

    min_cal_slack = std::min(min_cal_slack, cal_slack);
    min_excl_slack = std::min(min_excl_slack, excl_slack);
    if (cal_slack < -1e-9 || excl_slack < -1e-9) {
      violations.push_back(Json{{"trial", t},
                                {"a", io::sharp_to_json(a)},
                                {"b", io::sharp_to_json(b)},
                                {"biobservable", io::biobservable_to_json(m)},
                                {"calibration_slack", cal_slack},
                                {"exclusion_slack", excl_slack}});
    }
  }
  Json summary{{"dimension", dim},
               {"n_trials", n_trials},
               {"seed", seed},
               {"unit", io::base_name(opts.base)},
               {"min_calibration_slack", min_cal_slack},
               {"min_exclusion_slack", min_excl_slack},
               {"n_violations", violations.size()},
               {"violations", std::move(violations)}};
  const std::string text = summary.dump(2) + "\n";
  out << text;
  if (!opts.out_dir.empty()) {
    try {
      detail::write_text_file(std::filesystem::path(opts.out_dir) / "fuzz_summary.json", text);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitIoError;
    }
  }
  return kExitOk;
}

}  // namespace edt::cli
