// Shared aliases, tolerance policy and validation plumbing for the edt library.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace edt {

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Outcome labels are ordered tokens; no arithmetic is ever performed on them.
using Label = double;

/// Logarithm base used by every entropy-like quantity.
enum class LogBase { bits, nats };

template <typename Scalar>
Scalar log_base(Scalar x, LogBase base) {
  return base == LogBase::bits ? std::log2(x) : std::log(x);
}

/// Global numeric-tolerance policy.  `construction` guards type invariants,
/// `derived` guards identities computed from already-validated values.
struct Tolerances {
  double construction = 1e-10;
  double derived = 1e-9;
};

inline Tolerances& tolerances() {
  static Tolerances t;
  return t;
}

/// Single knob: construction tolerance t, derived identities at 10*t.
inline void set_tolerance(double construction) {
  if (!(construction > 0)) throw std::invalid_argument("set_tolerance: tolerance must be positive");
  tolerances().construction = construction;
  tolerances().derived = 10.0 * construction;
}

/// Probabilities inside this band below zero are eigen-solver noise and are
/// clamped; anything below it signals an invalid measurement or state.
inline constexpr double kProbabilityBand = 1e-12;

/// Probabilities at or below this threshold are treated as exact zeros inside
/// logarithms.
inline constexpr double kLogZeroCutoff = 1e-15;

/// One named invariant check with its measured residual.
struct Check {
  std::string subject;
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

inline Check make_check(std::string subject, std::string name, double residual, double tolerance) {
  return Check{std::move(subject), std::move(name), residual, tolerance, residual <= tolerance};
}

/// Throws std::invalid_argument describing the first failing check.
inline void require_all(const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    if (!c.pass) {
      std::ostringstream msg;
      msg << c.subject << ": " << c.name << " violated (residual " << c.residual
          << " > tolerance " << c.tolerance << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : static_cast<double>(m.cwiseAbs().maxCoeff());
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

namespace detail {

/// splitmix64 step; used to derive independent sub-seeds deterministically.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

}  // namespace edt
