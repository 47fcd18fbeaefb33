// Quantum states, sharp observables, POVMs and classical distributions,
// together with validation and seeded random generation.  Dense storage only;
// the dimensions of interest are 2-4.
#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <utility>

#include "edt/types.hpp"

namespace edt {

// ---------------------------------------------------------------------------
// Invariant checks.  Constructors run these and throw on the first failure;
// the CLI lists them verbatim, so every check carries a stable name.
// ---------------------------------------------------------------------------

namespace checks {

template <typename Scalar>
std::vector<Check> complex_matrix(const ComplexMatrix<Scalar>& m, const std::string& subject) {
  std::vector<Check> out;
  out.push_back(make_check(subject, "square dimension >= 1",
                           (m.rows() == m.cols() && m.rows() >= 1) ? 0.0 : 1.0, 0.0));
  out.push_back(make_check(subject, "finite entries", all_finite(m) ? 0.0 : 1.0, 0.0));
  return out;
}

template <typename Scalar>
std::vector<Check> hermitian(const ComplexMatrix<Scalar>& m, const std::string& subject) {
  auto out = complex_matrix(m, subject);
  if (out[0].pass && out[1].pass) {
    out.push_back(make_check(subject, "hermiticity", max_abs(m - m.adjoint()),
                             tolerances().construction));
  }
  return out;
}

template <typename Scalar>
double min_eigenvalue(const ComplexMatrix<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(m, Eigen::EigenvaluesOnly);
  return static_cast<double>(es.eigenvalues().minCoeff());
}

template <typename Scalar>
std::vector<Check> density_matrix(const ComplexMatrix<Scalar>& m, const std::string& subject) {
  auto out = hermitian(m, subject);
  if (out.back().pass) {
    const double tol = tolerances().construction;
    out.push_back(make_check(subject, "positive semidefiniteness",
                             std::max(0.0, -min_eigenvalue(m)), tol));
    out.push_back(make_check(subject, "unit trace", std::abs(m.trace().real() - 1.0) +
                             std::abs(m.trace().imag()), tol));
  }
  return out;
}

template <typename Scalar>
std::vector<Check> sharp_observable(const RealVector<Scalar>& eigenvalues,
                                    const std::vector<ComplexMatrix<Scalar>>& projectors,
                                    const std::string& subject) {
  std::vector<Check> out;
  const double tol = tolerances().construction;
  const auto d = static_cast<Eigen::Index>(projectors.size());
  out.push_back(make_check(subject, "one projector per eigenvalue",
                           (d >= 1 && eigenvalues.size() == d) ? 0.0 : 1.0, 0.0));
  if (!out.back().pass) return out;
  const Eigen::Index n = projectors.front().rows();
  out.push_back(make_check(subject, "projector count matches dimension", d == n ? 0.0 : 1.0, 0.0));
  for (const auto& p : projectors) {
    auto h = hermitian(p, subject + " projector");
    out.insert(out.end(), h.begin(), h.end());
    if (p.rows() != n || p.cols() != n) {
      out.push_back(make_check(subject, "uniform projector dimension", 1.0, 0.0));
      return out;
    }
  }
  double rank1 = 0.0, orth = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    rank1 = std::max(rank1, max_abs(projectors[i] * projectors[i] - projectors[i]));
    rank1 = std::max(rank1, std::abs(projectors[i].trace().real() - 1.0));
    for (Eigen::Index j = i + 1; j < d; ++j)
      orth = std::max(orth, max_abs(projectors[i] * projectors[j]));
  }
  out.push_back(make_check(subject, "rank-1 idempotent projectors", rank1, 10 * tol));
  out.push_back(make_check(subject, "mutual orthogonality", orth, tol));
  ComplexMatrix<Scalar> sum = ComplexMatrix<Scalar>::Zero(n, n);
  for (const auto& p : projectors) sum += p;
  out.push_back(make_check(subject, "completeness",
                           max_abs(sum - ComplexMatrix<Scalar>::Identity(n, n)), tol));
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j)
      gap = std::min(gap, static_cast<double>(std::abs(eigenvalues[i] - eigenvalues[j])));
  out.push_back(make_check(subject, "nondegeneracy to tolerance", gap > tol ? 0.0 : 1.0, 0.0));
  return out;
}

template <typename Scalar>
std::vector<Check> povm(const std::vector<Label>& outcomes,
                        const std::vector<ComplexMatrix<Scalar>>& effects,
                        const std::string& subject) {
  std::vector<Check> out;
  const double tol = tolerances().construction;
  out.push_back(make_check(subject, "one effect per outcome",
                           (!effects.empty() && outcomes.size() == effects.size()) ? 0.0 : 1.0,
                           0.0));
  if (!out.back().pass) return out;
  const Eigen::Index n = effects.front().rows();
  double psd = 0.0;
  for (const auto& e : effects) {
    auto h = hermitian(e, subject + " effect");
    out.insert(out.end(), h.begin(), h.end());
    if (e.rows() != n || e.cols() != n) {
      out.push_back(make_check(subject, "uniform effect dimension", 1.0, 0.0));
      return out;
    }
    psd = std::max(psd, std::max(0.0, -min_eigenvalue(e)));
  }
  out.push_back(make_check(subject, "effect positive semidefiniteness", psd, tol));
  ComplexMatrix<Scalar> sum = ComplexMatrix<Scalar>::Zero(n, n);
  for (const auto& e : effects) sum += e;
  out.push_back(make_check(subject, "completeness",
                           max_abs(sum - ComplexMatrix<Scalar>::Identity(n, n)), tol));
  return out;
}

template <typename Scalar>
std::vector<Check> distribution(const std::vector<Label>& outcomes, const RealVector<Scalar>& p,
                                const std::string& subject) {
  std::vector<Check> out;
  out.push_back(make_check(subject, "one probability per outcome",
                           (p.size() >= 1 && static_cast<Eigen::Index>(outcomes.size()) == p.size())
                               ? 0.0 : 1.0, 0.0));
  if (!out.back().pass) return out;
  double band = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double v = static_cast<double>(p[i]);
    if (!std::isfinite(v)) { band = std::numeric_limits<double>::infinity(); break; }
    band = std::max(band, std::max(-v, v - 1.0));
  }
  out.push_back(make_check(subject, "probabilities within tolerance band", std::max(0.0, band),
                           kProbabilityBand));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) sum += std::clamp(static_cast<double>(p[i]), 0.0, 1.0);
  out.push_back(make_check(subject, "normalization", std::abs(sum - 1.0),
                           tolerances().construction));
  return out;
}

}  // namespace checks

// ---------------------------------------------------------------------------
// Value types.  All immutable after construction; operations are pure.
// ---------------------------------------------------------------------------

/// A matrix with ||M - M^dagger||_max within construction tolerance.
template <typename Scalar = double>
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix<Scalar> m) : mat_(std::move(m)) {
    require_all(checks::hermitian(mat_, "HermitianOperator"));
  }

  const ComplexMatrix<Scalar>& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  ComplexMatrix<Scalar> mat_;
};

/// Input quantum state rho: Hermitian, PSD to tolerance, unit trace.
template <typename Scalar = double>
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix<Scalar> m) : mat_(std::move(m)) {
    require_all(checks::density_matrix(mat_, "DensityMatrix"));
  }

  const ComplexMatrix<Scalar>& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  ComplexMatrix<Scalar> mat_;
};

/// Nondegenerate target observable: distinct real eigenvalues with rank-1
/// orthonormal eigenprojectors.  Degenerate inputs are rejected.
template <typename Scalar = double>
class SharpObservable {
 public:
  SharpObservable(RealVector<Scalar> eigenvalues, std::vector<ComplexMatrix<Scalar>> projectors)
      : eigenvalues_(std::move(eigenvalues)), projectors_(std::move(projectors)) {
    require_all(checks::sharp_observable(eigenvalues_, projectors_, "SharpObservable"));
  }

  /// Spectral decomposition of a Hermitian matrix; eigenvalues become the
  /// outcome labels (ascending order).
  static SharpObservable from_matrix(const ComplexMatrix<Scalar>& m) {
    require_all(checks::hermitian(m, "SharpObservable"));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(m);
    std::vector<ComplexMatrix<Scalar>> projectors;
    projectors.reserve(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      ComplexVector<Scalar> v = es.eigenvectors().col(i);
      projectors.push_back(v * v.adjoint());
    }
    return SharpObservable(es.eigenvalues(), std::move(projectors));
  }

  const RealVector<Scalar>& eigenvalues() const { return eigenvalues_; }
  const ComplexMatrix<Scalar>& projector(Eigen::Index i) const { return projectors_.at(i); }
  Eigen::Index size() const { return static_cast<Eigen::Index>(projectors_.size()); }
  Eigen::Index dim() const { return projectors_.front().rows(); }

  std::vector<Label> outcome_labels() const {
    return std::vector<Label>(eigenvalues_.data(), eigenvalues_.data() + eigenvalues_.size());
  }

  /// Reconstructs sum_i lambda_i P_i.
  ComplexMatrix<Scalar> matrix() const {
    ComplexMatrix<Scalar> m = ComplexMatrix<Scalar>::Zero(dim(), dim());
    for (Eigen::Index i = 0; i < size(); ++i) m += std::complex<Scalar>(eigenvalues_[i]) * projectors_[i];
    return m;
  }

 private:
  RealVector<Scalar> eigenvalues_;
  std::vector<ComplexMatrix<Scalar>> projectors_;
};

/// Finite family of PSD effects summing to the identity.
template <typename Scalar = double>
class Povm {
 public:
  Povm(std::vector<Label> outcomes, std::vector<ComplexMatrix<Scalar>> effects)
      : outcomes_(std::move(outcomes)), effects_(std::move(effects)) {
    require_all(checks::povm(outcomes_, effects_, "Povm"));
  }

  const std::vector<Label>& outcomes() const { return outcomes_; }
  const ComplexMatrix<Scalar>& effect(Eigen::Index i) const { return effects_.at(i); }
  const std::vector<ComplexMatrix<Scalar>>& effects() const { return effects_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(effects_.size()); }
  Eigen::Index dim() const { return effects_.front().rows(); }

 private:
  std::vector<Label> outcomes_;
  std::vector<ComplexMatrix<Scalar>> effects_;
};

/// Classical outcome distribution.  Probabilities are clamped to [0,1] on
/// construction and renormalized, provided they started inside the tolerance
/// band and summed to 1 within construction tolerance.
template <typename Scalar = double>
class Distribution {
 public:
  Distribution(std::vector<Label> outcomes, RealVector<Scalar> probabilities)
      : outcomes_(std::move(outcomes)), p_(std::move(probabilities)) {
    require_all(checks::distribution(outcomes_, p_, "Distribution"));
    for (Eigen::Index i = 0; i < p_.size(); ++i)
      p_[i] = std::clamp(p_[i], Scalar(0), Scalar(1));
    p_ /= p_.sum();
  }

  static Distribution uniform(std::vector<Label> outcomes) {
    RealVector<Scalar> p = RealVector<Scalar>::Constant(
        static_cast<Eigen::Index>(outcomes.size()), Scalar(1) / Scalar(outcomes.size()));
    return Distribution(std::move(outcomes), std::move(p));
  }

  const std::vector<Label>& outcomes() const { return outcomes_; }
  const RealVector<Scalar>& probabilities() const { return p_; }
  Scalar operator[](Eigen::Index i) const { return p_[i]; }
  Eigen::Index size() const { return p_.size(); }

 private:
  std::vector<Label> outcomes_;
  RealVector<Scalar> p_;
};

inline bool same_outcomes(const std::vector<Label>& a, const std::vector<Label>& b) {
  return a == b;
}

// ---------------------------------------------------------------------------
// Spectral helpers.
// ---------------------------------------------------------------------------

/// PSD square root via eigendecomposition; eigenvalues in [-tol, 0) are
/// clamped to zero, anything lower is rejected.
template <typename Scalar>
ComplexMatrix<Scalar> psd_sqrt(const ComplexMatrix<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(m);
  RealVector<Scalar> lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -static_cast<Scalar>(tolerances().construction))
      throw std::invalid_argument("psd_sqrt: matrix is not positive semidefinite");
    lam[i] = std::sqrt(std::max(lam[i], Scalar(0)));
  }
  return es.eigenvectors() * lam.template cast<std::complex<Scalar>>().asDiagonal() *
         es.eigenvectors().adjoint();
}

/// Inverse square root of a positive definite matrix.  Throws when the
/// spectrum is numerically singular.
template <typename Scalar>
ComplexMatrix<Scalar> psd_inv_sqrt(const ComplexMatrix<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(m);
  RealVector<Scalar> lam = es.eigenvalues();
  const Scalar cutoff = std::max(lam.maxCoeff(), Scalar(1)) * Scalar(1e-12);
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < cutoff) throw std::invalid_argument("psd_inv_sqrt: singular normalizer");
    lam[i] = Scalar(1) / std::sqrt(lam[i]);
  }
  return es.eigenvectors() * lam.template cast<std::complex<Scalar>>().asDiagonal() *
         es.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------
// Operations.
// ---------------------------------------------------------------------------

/// p(x) = Tr{rho A(x)}.
template <typename Scalar>
Distribution<Scalar> born_rule(const DensityMatrix<Scalar>& rho, const Povm<Scalar>& povm) {
  if (rho.dim() != povm.dim())
    throw std::invalid_argument("born_rule: state and POVM dimensions differ");
  RealVector<Scalar> p(povm.size());
  for (Eigen::Index i = 0; i < povm.size(); ++i)
    p[i] = (rho.matrix() * povm.effect(i)).trace().real();
  return Distribution<Scalar>(povm.outcomes(), std::move(p));
}

/// A sharp observable is a rank-1 projective POVM labelled by eigenvalues.
template <typename Scalar>
Povm<Scalar> sharp_to_povm(const SharpObservable<Scalar>& obs) {
  std::vector<ComplexMatrix<Scalar>> effects;
  effects.reserve(obs.size());
  for (Eigen::Index i = 0; i < obs.size(); ++i) effects.push_back(obs.projector(i));
  return Povm<Scalar>(obs.outcome_labels(), std::move(effects));
}

// ---------------------------------------------------------------------------
// Seeded random generation (deterministic per seed).
// ---------------------------------------------------------------------------

namespace detail {

template <typename Scalar>
ComplexMatrix<Scalar> gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  ComplexMatrix<Scalar> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Scalar re = normal(rng);
      const Scalar im = normal(rng);
      m(i, j) = std::complex<Scalar>(re, im);
    }
  return m;
}

template <typename Scalar>
ComplexVector<Scalar> haar_unit_vector(Eigen::Index dim, std::mt19937_64& rng) {
  ComplexVector<Scalar> v = gaussian_matrix<Scalar>(dim, 1, rng);
  return v / v.norm();
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phase fix.
template <typename Scalar>
ComplexMatrix<Scalar> haar_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  ComplexMatrix<Scalar> g = gaussian_matrix<Scalar>(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix<Scalar>> qr(g);
  ComplexMatrix<Scalar> q = qr.householderQ();
  ComplexMatrix<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const std::complex<Scalar> rii = r(i, i);
    q.col(i) *= rii / std::abs(rii);
  }
  return q;
}

}  // namespace detail

/// Haar-uniform pure state |psi><psi|.
template <typename Scalar = double>
DensityMatrix<Scalar> random_pure_state(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_pure_state: dimension must be >= 1");
  std::mt19937_64 rng(seed);
  ComplexVector<Scalar> v = detail::haar_unit_vector<Scalar>(dim, rng);
  return DensityMatrix<Scalar>(v * v.adjoint());
}

/// Full-rank random state W W^dagger / Tr, W a Ginibre matrix.
template <typename Scalar = double>
DensityMatrix<Scalar> random_density_matrix(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_density_matrix: dimension must be >= 1");
  std::mt19937_64 rng(seed);
  ComplexMatrix<Scalar> w = detail::gaussian_matrix<Scalar>(dim, dim, rng);
  ComplexMatrix<Scalar> rho = w * w.adjoint();
  return DensityMatrix<Scalar>(rho / rho.trace().real());
}

template <typename Scalar = double>
HermitianOperator<Scalar> random_hermitian(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ComplexMatrix<Scalar> g = detail::gaussian_matrix<Scalar>(dim, dim, rng);
  return HermitianOperator<Scalar>(((g + g.adjoint()) / Scalar(2)).eval());
}

/// Haar-random eigenbasis with outcome labels 0..d-1.
template <typename Scalar = double>
SharpObservable<Scalar> random_sharp_observable(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ComplexMatrix<Scalar> u = detail::haar_unitary<Scalar>(dim, rng);
  RealVector<Scalar> eigenvalues(dim);
  std::vector<ComplexMatrix<Scalar>> projectors;
  projectors.reserve(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    eigenvalues[i] = Scalar(i);
    ComplexVector<Scalar> v = u.col(i);
    projectors.push_back(v * v.adjoint());
  }
  return SharpObservable<Scalar>(std::move(eigenvalues), std::move(projectors));
}

/// Random POVM: PSD blocks G_k = W_k W_k^dagger normalized by the inverse
/// square root of their sum.  Retries on a singular normalizer, then fails.
template <typename Scalar = double>
Povm<Scalar> random_povm(Eigen::Index dim, Eigen::Index n_outcomes, std::uint64_t seed) {
  if (dim < 1 || n_outcomes < 1)
    throw std::invalid_argument("random_povm: dimension and outcome count must be >= 1");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<ComplexMatrix<Scalar>> blocks;
    blocks.reserve(n_outcomes);
    ComplexMatrix<Scalar> total = ComplexMatrix<Scalar>::Zero(dim, dim);
    for (Eigen::Index k = 0; k < n_outcomes; ++k) {
      ComplexMatrix<Scalar> w = detail::gaussian_matrix<Scalar>(dim, dim, rng);
      blocks.push_back(w * w.adjoint());
      total += blocks.back();
    }
    ComplexMatrix<Scalar> norm;
    try {
      norm = psd_inv_sqrt<Scalar>(total);
    } catch (const std::invalid_argument&) {
      continue;
    }
    std::vector<ComplexMatrix<Scalar>> effects;
    effects.reserve(n_outcomes);
    for (auto& g : blocks) {
      ComplexMatrix<Scalar> e = norm * g * norm;
      effects.push_back(((e + e.adjoint()) / Scalar(2)).eval());
    }
    std::vector<Label> outcomes(n_outcomes);
    std::iota(outcomes.begin(), outcomes.end(), Label(0));
    return Povm<Scalar>(std::move(outcomes), std::move(effects));
  }
  throw std::runtime_error("random_povm: singular normalizer after 10 retries");
}

// ---------------------------------------------------------------------------
// Qubit presets (Pauli eigenbases, outcome labels +1/-1).
// ---------------------------------------------------------------------------

template <typename Scalar = double>
SharpObservable<Scalar> pauli_z() {
  ComplexMatrix<Scalar> m(2, 2);
  m << std::complex<Scalar>(1), std::complex<Scalar>(0), std::complex<Scalar>(0),
      std::complex<Scalar>(-1);
  RealVector<Scalar> ev(2);
  ev << Scalar(1), Scalar(-1);
  std::vector<ComplexMatrix<Scalar>> proj{(ComplexMatrix<Scalar>::Identity(2, 2) + m) / Scalar(2),
                                          (ComplexMatrix<Scalar>::Identity(2, 2) - m) / Scalar(2)};
  return SharpObservable<Scalar>(std::move(ev), std::move(proj));
}

template <typename Scalar = double>
SharpObservable<Scalar> pauli_x() {
  ComplexMatrix<Scalar> m(2, 2);
  m << std::complex<Scalar>(0), std::complex<Scalar>(1), std::complex<Scalar>(1),
      std::complex<Scalar>(0);
  RealVector<Scalar> ev(2);
  ev << Scalar(1), Scalar(-1);
  std::vector<ComplexMatrix<Scalar>> proj{(ComplexMatrix<Scalar>::Identity(2, 2) + m) / Scalar(2),
                                          (ComplexMatrix<Scalar>::Identity(2, 2) - m) / Scalar(2)};
  return SharpObservable<Scalar>(std::move(ev), std::move(proj));
}

template <typename Scalar = double>
SharpObservable<Scalar> pauli_y() {
  ComplexMatrix<Scalar> m(2, 2);
  m << std::complex<Scalar>(0), std::complex<Scalar>(0, -1), std::complex<Scalar>(0, 1),
      std::complex<Scalar>(0);
  RealVector<Scalar> ev(2);
  ev << Scalar(1), Scalar(-1);
  std::vector<ComplexMatrix<Scalar>> proj{(ComplexMatrix<Scalar>::Identity(2, 2) + m) / Scalar(2),
                                          (ComplexMatrix<Scalar>::Identity(2, 2) - m) / Scalar(2)};
  return SharpObservable<Scalar>(std::move(ev), std::move(proj));
}

}  // namespace edt
