// Instruments in Kraus form, adjoint (Heisenberg-picture) maps, sequential
// composition and bi-observables with their marginals.
#pragma once

#include "edt/core.hpp"

namespace edt {

namespace checks {

template <typename Scalar>
std::vector<Check> instrument(const std::vector<Label>& outcomes,
                              const std::vector<std::vector<ComplexMatrix<Scalar>>>& kraus_sets,
                              const std::string& subject) {
  std::vector<Check> out;
  const double tol = tolerances().construction;
  out.push_back(make_check(subject, "one nonempty Kraus set per outcome",
                           (!kraus_sets.empty() && outcomes.size() == kraus_sets.size() &&
                            std::all_of(kraus_sets.begin(), kraus_sets.end(),
                                        [](const auto& s) { return !s.empty(); }))
                               ? 0.0 : 1.0, 0.0));
  if (!out.back().pass) return out;
  const Eigen::Index n = kraus_sets.front().front().rows();
  ComplexMatrix<Scalar> total = ComplexMatrix<Scalar>::Zero(n, n);
  for (const auto& set : kraus_sets)
    for (const auto& k : set) {
      auto cm = complex_matrix(k, subject + " Kraus operator");
      out.insert(out.end(), cm.begin(), cm.end());
      if (k.rows() != n || k.cols() != n) {
        out.push_back(make_check(subject, "uniform Kraus dimension", 1.0, 0.0));
        return out;
      }
      total += k.adjoint() * k;
    }
  out.push_back(make_check(subject, "trace preservation",
                           max_abs(total - ComplexMatrix<Scalar>::Identity(n, n)), tol));
  return out;
}

template <typename Scalar>
std::vector<Check> biobservable(const std::vector<Label>& x_outcomes,
                                const std::vector<Label>& y_outcomes,
                                const std::vector<std::vector<ComplexMatrix<Scalar>>>& effects,
                                const std::string& subject) {
  std::vector<Check> out;
  const double tol = tolerances().construction;
  const bool shape_ok = !effects.empty() && x_outcomes.size() == effects.size() &&
                        !y_outcomes.empty() &&
                        std::all_of(effects.begin(), effects.end(), [&](const auto& row) {
                          return row.size() == y_outcomes.size();
                        });
  out.push_back(make_check(subject, "rectangular outcome grid", shape_ok ? 0.0 : 1.0, 0.0));
  if (!shape_ok) return out;
  const Eigen::Index n = effects.front().front().rows();
  double psd = 0.0;
  ComplexMatrix<Scalar> total = ComplexMatrix<Scalar>::Zero(n, n);
  for (const auto& row : effects)
    for (const auto& e : row) {
      auto h = hermitian(e, subject + " effect");
      out.insert(out.end(), h.begin(), h.end());
      if (e.rows() != n || e.cols() != n) {
        out.push_back(make_check(subject, "uniform effect dimension", 1.0, 0.0));
        return out;
      }
      psd = std::max(psd, std::max(0.0, -min_eigenvalue(e)));
      total += e;
    }
  out.push_back(make_check(subject, "effect positive semidefiniteness", psd, tol));
  out.push_back(make_check(subject, "completeness",
                           max_abs(total - ComplexMatrix<Scalar>::Identity(n, n)), tol));
  return out;
}

}  // namespace checks

/// Outcome-indexed completely positive maps I_x[rho] = sum_k K rho K^dagger
/// with the total map trace preserving.  The adjoint is computed structurally
/// from the Kraus operators, never by solving the trace duality numerically.
template <typename Scalar = double>
class Instrument {
 public:
  Instrument(std::vector<Label> outcomes, std::vector<std::vector<ComplexMatrix<Scalar>>> kraus_sets)
      : outcomes_(std::move(outcomes)), kraus_(std::move(kraus_sets)) {
    require_all(checks::instrument(outcomes_, kraus_, "Instrument"));
    // The induced POVM I_x*[1] must itself be valid.
    induced_povm();
  }

  const std::vector<Label>& outcomes() const { return outcomes_; }
  const std::vector<ComplexMatrix<Scalar>>& kraus_set(Eigen::Index x) const { return kraus_.at(x); }
  Eigen::Index n_outcomes() const { return static_cast<Eigen::Index>(kraus_.size()); }
  Eigen::Index dim() const { return kraus_.front().front().rows(); }

  Eigen::Index outcome_index(Label x) const {
    for (std::size_t i = 0; i < outcomes_.size(); ++i)
      if (outcomes_[i] == x) return static_cast<Eigen::Index>(i);
    throw std::invalid_argument("Instrument: unknown outcome label");
  }

  /// A(x) = I_x*[1] = sum_k K^dagger K.
  Povm<Scalar> induced_povm() const {
    std::vector<ComplexMatrix<Scalar>> effects;
    effects.reserve(kraus_.size());
    for (const auto& set : kraus_) {
      ComplexMatrix<Scalar> e = ComplexMatrix<Scalar>::Zero(dim(), dim());
      for (const auto& k : set) e += k.adjoint() * k;
      effects.push_back(((e + e.adjoint()) / Scalar(2)).eval());
    }
    return Povm<Scalar>(outcomes_, std::move(effects));
  }

 private:
  std::vector<Label> outcomes_;
  std::vector<std::vector<ComplexMatrix<Scalar>>> kraus_;
};

/// Effects M(x,y) on a product outcome grid; the joint-measurement object.
template <typename Scalar = double>
class BiObservable {
 public:
  BiObservable(std::vector<Label> x_outcomes, std::vector<Label> y_outcomes,
               std::vector<std::vector<ComplexMatrix<Scalar>>> effects)
      : x_outcomes_(std::move(x_outcomes)), y_outcomes_(std::move(y_outcomes)),
        effects_(std::move(effects)) {
    require_all(checks::biobservable(x_outcomes_, y_outcomes_, effects_, "BiObservable"));
  }

  const std::vector<Label>& x_outcomes() const { return x_outcomes_; }
  const std::vector<Label>& y_outcomes() const { return y_outcomes_; }
  const ComplexMatrix<Scalar>& effect(Eigen::Index x, Eigen::Index y) const {
    return effects_.at(x).at(y);
  }
  const std::vector<std::vector<ComplexMatrix<Scalar>>>& effects() const { return effects_; }
  Eigen::Index nx() const { return static_cast<Eigen::Index>(x_outcomes_.size()); }
  Eigen::Index ny() const { return static_cast<Eigen::Index>(y_outcomes_.size()); }
  Eigen::Index dim() const { return effects_.front().front().rows(); }

 private:
  std::vector<Label> x_outcomes_;
  std::vector<Label> y_outcomes_;
  std::vector<std::vector<ComplexMatrix<Scalar>>> effects_;
};

// ---------------------------------------------------------------------------
// Operations.
// ---------------------------------------------------------------------------

/// Lueders instrument of a POVM: one Kraus operator sqrt(A(x)) per outcome.
template <typename Scalar>
Instrument<Scalar> luders_instrument(const Povm<Scalar>& povm) {
  std::vector<std::vector<ComplexMatrix<Scalar>>> kraus;
  kraus.reserve(povm.size());
  for (Eigen::Index i = 0; i < povm.size(); ++i)
    kraus.push_back({psd_sqrt(povm.effect(i))});
  Instrument<Scalar> inst(povm.outcomes(), std::move(kraus));
  // Induced POVM must reproduce the input.
  Povm<Scalar> induced = inst.induced_povm();
  double residual = 0.0;
  for (Eigen::Index i = 0; i < povm.size(); ++i)
    residual = std::max(residual, max_abs(induced.effect(i) - povm.effect(i)));
  if (residual > tolerances().derived)
    throw std::runtime_error("luders_instrument: induced POVM deviates from input");
  return inst;
}

template <typename Scalar>
struct InstrumentOutput {
  std::vector<ComplexMatrix<Scalar>> branches;  // unnormalized I_x[rho]
  DensityMatrix<Scalar> total;                  // I[rho] = sum_x I_x[rho]
  Distribution<Scalar> outcome_distribution;    // p(x) = Tr I_x[rho]
};

template <typename Scalar>
InstrumentOutput<Scalar> apply_instrument(const Instrument<Scalar>& inst,
                                          const DensityMatrix<Scalar>& rho) {
  if (inst.dim() != rho.dim())
    throw std::invalid_argument("apply_instrument: dimensions differ");
  std::vector<ComplexMatrix<Scalar>> branches;
  branches.reserve(inst.n_outcomes());
  ComplexMatrix<Scalar> total = ComplexMatrix<Scalar>::Zero(rho.dim(), rho.dim());
  RealVector<Scalar> p(inst.n_outcomes());
  for (Eigen::Index x = 0; x < inst.n_outcomes(); ++x) {
    ComplexMatrix<Scalar> branch = ComplexMatrix<Scalar>::Zero(rho.dim(), rho.dim());
    for (const auto& k : inst.kraus_set(x)) branch += k * rho.matrix() * k.adjoint();
    p[x] = branch.trace().real();
    total += branch;
    branches.push_back(std::move(branch));
  }
  return InstrumentOutput<Scalar>{std::move(branches), DensityMatrix<Scalar>(std::move(total)),
                                  Distribution<Scalar>(inst.outcomes(), std::move(p))};
}

namespace detail {

/// I_x*[G] = sum_k K^dagger G K for the outcome at index x.
template <typename Scalar>
ComplexMatrix<Scalar> adjoint_apply_at(const Instrument<Scalar>& inst, Eigen::Index x,
                                       const ComplexMatrix<Scalar>& g) {
  ComplexMatrix<Scalar> out = ComplexMatrix<Scalar>::Zero(inst.dim(), inst.dim());
  for (const auto& k : inst.kraus_set(x)) out += k.adjoint() * g * k;
  return ((out + out.adjoint()) / Scalar(2)).eval();
}

}  // namespace detail

/// Adjoint map defined by Tr{I_x[F] G} = Tr{F I_x*[G]}.
template <typename Scalar>
HermitianOperator<Scalar> adjoint_apply(const Instrument<Scalar>& inst, Label x,
                                        const HermitianOperator<Scalar>& g) {
  if (inst.dim() != g.dim())
    throw std::invalid_argument("adjoint_apply: dimensions differ");
  return HermitianOperator<Scalar>(detail::adjoint_apply_at(inst, inst.outcome_index(x), g.matrix()));
}

/// Sequential measurement as an equal-input bi-observable:
/// M(x,y) = I_x*[B(y)].
template <typename Scalar>
BiObservable<Scalar> sequential_biobservable(const Instrument<Scalar>& first,
                                             const Povm<Scalar>& second) {
  if (first.dim() != second.dim())
    throw std::invalid_argument("sequential_biobservable: dimensions differ");
  std::vector<std::vector<ComplexMatrix<Scalar>>> effects(first.n_outcomes());
  for (Eigen::Index x = 0; x < first.n_outcomes(); ++x) {
    effects[x].reserve(second.size());
    for (Eigen::Index y = 0; y < second.size(); ++y)
      effects[x].push_back(detail::adjoint_apply_at(first, x, second.effect(y)));
  }
  return BiObservable<Scalar>(first.outcomes(), second.outcomes(), std::move(effects));
}

/// p~(y) = Tr{I[rho] B(y)}.
template <typename Scalar>
Distribution<Scalar> sequential_output_distribution(const Instrument<Scalar>& first,
                                                    const Povm<Scalar>& second,
                                                    const DensityMatrix<Scalar>& rho) {
  return born_rule(apply_instrument(first, rho).total, second);
}

/// M1(x) = sum_y M(x,y) and M2(y) = sum_x M(x,y).
template <typename Scalar>
std::pair<Povm<Scalar>, Povm<Scalar>> marginals(const BiObservable<Scalar>& m) {
  std::vector<ComplexMatrix<Scalar>> first, second;
  first.reserve(m.nx());
  second.reserve(m.ny());
  for (Eigen::Index x = 0; x < m.nx(); ++x) {
    ComplexMatrix<Scalar> e = ComplexMatrix<Scalar>::Zero(m.dim(), m.dim());
    for (Eigen::Index y = 0; y < m.ny(); ++y) e += m.effect(x, y);
    first.push_back(std::move(e));
  }
  for (Eigen::Index y = 0; y < m.ny(); ++y) {
    ComplexMatrix<Scalar> e = ComplexMatrix<Scalar>::Zero(m.dim(), m.dim());
    for (Eigen::Index x = 0; x < m.nx(); ++x) e += m.effect(x, y);
    second.push_back(std::move(e));
  }
  return {Povm<Scalar>(m.x_outcomes(), std::move(first)),
          Povm<Scalar>(m.y_outcomes(), std::move(second))};
}

/// Trivial joint measurement of commuting POVMs, M(x,y) = A(x)B(y).  The
/// product is symmetrized so that the marginals reproduce (a, b) exactly.
template <typename Scalar>
BiObservable<Scalar> commuting_biobservable(const Povm<Scalar>& a, const Povm<Scalar>& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("commuting_biobservable: dimensions differ");
  double commutator = 0.0;
  for (Eigen::Index x = 0; x < a.size(); ++x)
    for (Eigen::Index y = 0; y < b.size(); ++y)
      commutator = std::max(commutator,
                            max_abs(a.effect(x) * b.effect(y) - b.effect(y) * a.effect(x)));
  if (commutator > tolerances().derived) {
    std::ostringstream msg;
    msg << "commuting_biobservable: effects do not commute (residual " << commutator << ")";
    throw std::invalid_argument(msg.str());
  }
  std::vector<std::vector<ComplexMatrix<Scalar>>> effects(a.size());
  for (Eigen::Index x = 0; x < a.size(); ++x) {
    effects[x].reserve(b.size());
    for (Eigen::Index y = 0; y < b.size(); ++y)
      effects[x].push_back(
          ((a.effect(x) * b.effect(y) + b.effect(y) * a.effect(x)) / Scalar(2)).eval());
  }
  return BiObservable<Scalar>(a.outcomes(), b.outcomes(), std::move(effects));
}

// ---------------------------------------------------------------------------
// Random generation.
// ---------------------------------------------------------------------------

/// Random instrument: Ginibre Kraus candidates normalized to trace
/// preservation by the inverse square root of their gram sum.
template <typename Scalar = double>
Instrument<Scalar> random_instrument(Eigen::Index dim, Eigen::Index n_outcomes,
                                     Eigen::Index kraus_per_outcome, std::uint64_t seed) {
  if (dim < 1 || n_outcomes < 1 || kraus_per_outcome < 1)
    throw std::invalid_argument("random_instrument: all counts must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<ComplexMatrix<Scalar>>> raw(n_outcomes);
  ComplexMatrix<Scalar> total = ComplexMatrix<Scalar>::Zero(dim, dim);
  for (auto& set : raw)
    for (Eigen::Index k = 0; k < kraus_per_outcome; ++k) {
      set.push_back(detail::gaussian_matrix<Scalar>(dim, dim, rng));
      total += set.back().adjoint() * set.back();
    }
  ComplexMatrix<Scalar> norm = psd_inv_sqrt<Scalar>(total);
  for (auto& set : raw)
    for (auto& k : set) k = (k * norm).eval();
  std::vector<Label> outcomes(n_outcomes);
  std::iota(outcomes.begin(), outcomes.end(), Label(0));
  return Instrument<Scalar>(std::move(outcomes), std::move(raw));
}

/// Random bi-observable over an nx-by-ny grid (a random POVM reshaped).
template <typename Scalar = double>
BiObservable<Scalar> random_biobservable(Eigen::Index dim, std::vector<Label> x_outcomes,
                                         std::vector<Label> y_outcomes, std::uint64_t seed) {
  const auto nx = static_cast<Eigen::Index>(x_outcomes.size());
  const auto ny = static_cast<Eigen::Index>(y_outcomes.size());
  Povm<Scalar> flat = random_povm<Scalar>(dim, nx * ny, seed);
  std::vector<std::vector<ComplexMatrix<Scalar>>> effects(nx);
  for (Eigen::Index x = 0; x < nx; ++x)
    for (Eigen::Index y = 0; y < ny; ++y) effects[x].push_back(flat.effect(x * ny + y));
  return BiObservable<Scalar>(std::move(x_outcomes), std::move(y_outcomes), std::move(effects));
}

/// Random bi-observable labelled by a target pair of sharp observables.
template <typename Scalar>
BiObservable<Scalar> random_biobservable(const SharpObservable<Scalar>& a,
                                         const SharpObservable<Scalar>& b, std::uint64_t seed) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("random_biobservable: dimensions differ");
  return random_biobservable<Scalar>(a.dim(), a.outcome_labels(), b.outcome_labels(), seed);
}

}  // namespace edt
