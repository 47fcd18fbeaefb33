// Error-plus-disturbance functionals in their relative-entropy and
// conditional-entropy flavors, the explicit orthogonal-qubit bi-observable,
// and the mini-max estimation over bi-observables and input states.
#pragma once

#include "edt/detail/nelder_mead.hpp"
#include "edt/entropy.hpp"
#include "edt/measurement.hpp"

namespace edt {

enum class Flavor { relative_entropy, conditional_entropy };

template <typename Scalar = double>
struct TradeoffValue {
  Scalar error_term;
  Scalar disturbance_term;
  Scalar total;  // error_term + disturbance_term
  Flavor flavor;
};

template <typename Scalar>
TradeoffValue<Scalar> make_tradeoff_value(Scalar error, Scalar disturbance, Flavor flavor) {
  return TradeoffValue<Scalar>{error, disturbance, error + disturbance, flavor};
}

/// Knobs of the mini-max search.  `n_povm_restarts` counts outer simplex
/// restarts: restart 0 always starts from the sequential Lueders candidate,
/// the rest from seeded random parameter draws.  `max_iterations` is the
/// simplex iteration budget per restart.
struct MinimaxConfig {
  int n_state_restarts = 8;
  int n_povm_restarts = 4;
  int inner_grid_resolution = 24;
  double convergence_tol = 1e-9;
  int max_iterations = 2000;
  std::uint64_t seed = 1;
};

inline void validate_config(const MinimaxConfig& cfg) {
  if (cfg.n_state_restarts < 1 || cfg.n_povm_restarts < 1 || cfg.inner_grid_resolution < 1 ||
      cfg.max_iterations < 1)
    throw std::invalid_argument("MinimaxConfig: all counts must be >= 1");
  if (!(cfg.convergence_tol > 0))
    throw std::invalid_argument("MinimaxConfig: convergence tolerance must be positive");
}

template <typename Scalar = double>
struct MinimaxResult {
  Scalar value;
  BiObservable<Scalar> argmin_biobservable;
  DensityMatrix<Scalar> argmax_state;
  std::vector<std::pair<int, Scalar>> trace;  // (iteration, best value so far)
  bool converged;
  int iterations;
  std::uint64_t seed;
};

// ---------------------------------------------------------------------------
// Pair evaluation engine.
// ---------------------------------------------------------------------------

namespace detail {

/// Evaluates the error-plus-disturbance pair for a fixed (A, B, M, flavor)
/// against varying input states.  Marginals and the master-relation kernels
/// Tr{M_i(x') |x><x|} are precomputed once; per-state evaluation is a handful
/// of traces plus entropy sums, matching the compositional operations to
/// floating-point dust.
template <typename Scalar>
class PairEvaluator {
 public:
  PairEvaluator(const SharpObservable<Scalar>& a, const SharpObservable<Scalar>& b,
                const BiObservable<Scalar>& m, Flavor flavor, LogBase base)
      : flavor_(flavor), base_(base) {
    if (a.dim() != b.dim() || a.dim() != m.dim())
      throw std::invalid_argument("tradeoff pair: dimensions differ");
    if (m.nx() != a.size() || m.ny() != b.size())
      throw std::invalid_argument("tradeoff pair: outcome grid does not match target outcomes");
    auto [m1, m2] = marginals(m);
    if (flavor == Flavor::relative_entropy &&
        (!same_outcomes(m1.outcomes(), a.outcome_labels()) ||
         !same_outcomes(m2.outcomes(), b.outcome_labels())))
      throw std::invalid_argument("tradeoff pair: outcome sets differ from targets");
    for (Eigen::Index i = 0; i < a.size(); ++i) a_eff_.push_back(a.projector(i));
    for (Eigen::Index i = 0; i < b.size(); ++i) b_eff_.push_back(b.projector(i));
    m1_eff_ = m1.effects();
    m2_eff_ = m2.effects();
    kernel1_ = kernel(a_eff_, m1_eff_);
    kernel2_ = kernel(b_eff_, m2_eff_);
  }

  TradeoffValue<Scalar> operator()(const DensityMatrix<Scalar>& rho) const {
    if (flavor_ == Flavor::relative_entropy) {
      const Scalar err = kl(born(a_eff_, rho), born(m1_eff_, rho));
      const Scalar dist = kl(born(b_eff_, rho), born(m2_eff_, rho));
      return make_tradeoff_value(err, dist, flavor_);
    }
    const Scalar err = conditional(born(a_eff_, rho), kernel1_);
    const Scalar dist = conditional(born(b_eff_, rho), kernel2_);
    return make_tradeoff_value(err, dist, flavor_);
  }

  Scalar total(const DensityMatrix<Scalar>& rho) const { return (*this)(rho).total; }

 private:
  static RealMatrix<Scalar> kernel(const std::vector<ComplexMatrix<Scalar>>& projectors,
                                   const std::vector<ComplexMatrix<Scalar>>& effects) {
    RealMatrix<Scalar> k(projectors.size(), effects.size());
    for (std::size_t i = 0; i < projectors.size(); ++i)
      for (std::size_t j = 0; j < effects.size(); ++j)
        k(i, j) = std::max((effects[j] * projectors[i]).trace().real(), Scalar(0));
    return k;
  }

  static RealVector<Scalar> born(const std::vector<ComplexMatrix<Scalar>>& effects,
                                 const DensityMatrix<Scalar>& rho) {
    RealVector<Scalar> p(effects.size());
    for (std::size_t i = 0; i < effects.size(); ++i) {
      const Scalar v = (rho.matrix() * effects[i]).trace().real();
      if (v < -Scalar(kProbabilityBand) || v > Scalar(1) + Scalar(kProbabilityBand))
        throw std::invalid_argument("tradeoff pair: probability outside tolerance band");
      p(static_cast<Eigen::Index>(i)) = std::clamp(v, Scalar(0), Scalar(1));
    }
    return p;
  }

  Scalar kl(const RealVector<Scalar>& p, const RealVector<Scalar>& q) const {
    Scalar s = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p[i] <= Scalar(kLogZeroCutoff)) continue;
      if (q[i] <= Scalar(kLogZeroCutoff)) return std::numeric_limits<Scalar>::infinity();
      s += p[i] * (log_base(p[i], base_) - log_base(q[i], base_));
    }
    return s > Scalar(-1e-12) && s < Scalar(0) ? Scalar(0) : s;
  }

  Scalar conditional(const RealVector<Scalar>& input, const RealMatrix<Scalar>& kern) const {
    Scalar h = 0;
    for (Eigen::Index m = 0; m < kern.cols(); ++m) {
      Scalar pm = 0;
      for (Eigen::Index x = 0; x < kern.rows(); ++x) pm += input[x] * kern(x, m);
      if (pm <= Scalar(kLogZeroCutoff)) continue;
      for (Eigen::Index x = 0; x < kern.rows(); ++x) {
        const Scalar joint = input[x] * kern(x, m);
        if (joint <= Scalar(kLogZeroCutoff)) continue;
        h -= joint * log_base(std::min(joint / pm, Scalar(1)), base_);
      }
    }
    return h;
  }

  Flavor flavor_;
  LogBase base_;
  std::vector<ComplexMatrix<Scalar>> a_eff_, b_eff_, m1_eff_, m2_eff_;
  RealMatrix<Scalar> kernel1_, kernel2_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// The two flavors and the calibration form.
// ---------------------------------------------------------------------------

/// S(A^rho || M1^rho) + S(B^rho || M2^rho); support violations yield
/// +infinity terms, not errors.
template <typename Scalar>
TradeoffValue<Scalar> divergence_pair(const DensityMatrix<Scalar>& rho,
                                      const SharpObservable<Scalar>& a,
                                      const SharpObservable<Scalar>& b,
                                      const BiObservable<Scalar>& m,
                                      LogBase base = LogBase::bits) {
  if (rho.dim() != a.dim()) throw std::invalid_argument("divergence_pair: dimensions differ");
  return detail::PairEvaluator<Scalar>(a, b, m, Flavor::relative_entropy, base)(rho);
}

/// H(A^rho | M1^rho) + H(B^rho | M2^rho) via the master relation
/// p(x,x') = A^rho(x) Tr{M1(x') |x><x|}.
template <typename Scalar>
TradeoffValue<Scalar> conditional_pair(const DensityMatrix<Scalar>& rho,
                                       const SharpObservable<Scalar>& a,
                                       const SharpObservable<Scalar>& b,
                                       const BiObservable<Scalar>& m,
                                       LogBase base = LogBase::bits) {
  if (rho.dim() != a.dim()) throw std::invalid_argument("conditional_pair: dimensions differ");
  return detail::PairEvaluator<Scalar>(a, b, m, Flavor::conditional_entropy, base)(rho);
}

/// Calibration form: conditional entropies on the uniform eigenbasis
/// ensembles, N = H(X|M1) and D = H(Y|M2).
template <typename Scalar>
TradeoffValue<Scalar> calibration_tradeoff(const SharpObservable<Scalar>& a,
                                           const SharpObservable<Scalar>& b,
                                           const BiObservable<Scalar>& m,
                                           LogBase base = LogBase::bits) {
  if (a.dim() != b.dim() || a.dim() != m.dim())
    throw std::invalid_argument("calibration_tradeoff: dimensions differ");
  auto [m1, m2] = marginals(m);
  const Scalar n = conditional_entropy(
      master_joint(Distribution<Scalar>::uniform(a.outcome_labels()), a, m1), base);
  const Scalar d = conditional_entropy(
      master_joint(Distribution<Scalar>::uniform(b.outcome_labels()), b, m2), base);
  return make_tradeoff_value(n, d, Flavor::conditional_entropy);
}

// ---------------------------------------------------------------------------
// The explicit orthogonal-qubit construction.
// ---------------------------------------------------------------------------

/// Joint approximate measurement of two Bloch-orthogonal sharp qubit
/// observables: M(x,y) = (1/4)[1 + (x/sqrt2) A + (y/sqrt2) B] with signs
/// x,y in {+1,-1} indexed by the targets' outcome order.
template <typename Scalar>
BiObservable<Scalar> orthogonal_qubit_biobservable(const SharpObservable<Scalar>& a,
                                                   const SharpObservable<Scalar>& b) {
  if (a.dim() != 2 || b.dim() != 2)
    throw std::invalid_argument("orthogonal_qubit_biobservable: qubit observables required");
  const ComplexMatrix<Scalar> sa = a.projector(0) - a.projector(1);
  const ComplexMatrix<Scalar> sb = b.projector(0) - b.projector(1);
  if (std::abs((sa * sb).trace().real()) / 2.0 > tolerances().derived)
    throw std::invalid_argument("orthogonal_qubit_biobservable: observables are not Bloch-orthogonal");
  const Scalar w = Scalar(1) / std::sqrt(Scalar(2));
  const ComplexMatrix<Scalar> id = ComplexMatrix<Scalar>::Identity(2, 2);
  std::vector<std::vector<ComplexMatrix<Scalar>>> effects(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Scalar x = i == 0 ? Scalar(1) : Scalar(-1);
      const Scalar y = j == 0 ? Scalar(1) : Scalar(-1);
      effects[i].push_back(((id + x * w * sa + y * w * sb) / Scalar(4)).eval());
    }
  return BiObservable<Scalar>(a.outcome_labels(), b.outcome_labels(), std::move(effects));
}

/// The fixed mutually-orthogonal construction on the Pauli (X, Y) pair.
template <typename Scalar = double>
BiObservable<Scalar> explicit_qubit_biobservable() {
  return orthogonal_qubit_biobservable(pauli_x<Scalar>(), pauli_y<Scalar>());
}

// ---------------------------------------------------------------------------
// Inner maximization over input states.
// ---------------------------------------------------------------------------

namespace detail {

template <typename Scalar>
DensityMatrix<Scalar> bloch_state(Scalar theta, Scalar phi) {
  ComplexVector<Scalar> psi(2);
  psi << std::complex<Scalar>(std::cos(theta / 2)),
      std::polar(std::sin(theta / 2), phi);
  return DensityMatrix<Scalar>(psi * psi.adjoint());
}

template <typename Scalar>
DensityMatrix<Scalar> state_from_components(const RealVector<Scalar>& v) {
  const Eigen::Index d = v.size() / 2;
  ComplexVector<Scalar> psi(d);
  for (Eigen::Index i = 0; i < d; ++i) psi[i] = std::complex<Scalar>(v[i], v[d + i]);
  const Scalar norm = psi.norm();
  if (!(norm > Scalar(0))) throw std::invalid_argument("state_from_components: zero vector");
  psi /= norm;
  return DensityMatrix<Scalar>(psi * psi.adjoint());
}

}  // namespace detail

/// Maximizes a state functional over the pure states of the given dimension.
/// Pure states suffice: both Born distributions are affine in rho and the
/// functionals are convex in the distribution pair, so the maximum over the
/// convex state set sits at an extreme point.  For qubits the search is a
/// Bloch-sphere grid followed by local simplex refinement; in higher
/// dimensions, seeded random pure restarts with local ascent.  The first
/// probe achieving the maximum within 1e-12 wins, so the argmax is
/// deterministic for a fixed config.
template <typename Scalar, typename F>
std::pair<DensityMatrix<Scalar>, Scalar> max_over_states(F&& functional, Eigen::Index dim,
                                                         const MinimaxConfig& cfg) {
  validate_config(cfg);
  if (dim < 1) throw std::invalid_argument("max_over_states: dimension must be >= 1");
  auto value_of = [&functional](const DensityMatrix<Scalar>& rho) {
    const Scalar v = functional(rho);
    return std::isnan(v) ? -std::numeric_limits<Scalar>::infinity() : v;
  };

  DensityMatrix<Scalar> best_state(ComplexMatrix<Scalar>::Identity(dim, dim) / Scalar(dim));
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  bool have_state = false;

  if (dim == 1) {
    DensityMatrix<Scalar> only(ComplexMatrix<Scalar>::Identity(1, 1));
    return {only, value_of(only)};
  }

  const detail::NmOptions refine{300, 1e-13, 0.0};  // init_step set per use below

  if (dim == 2) {
    const int res = std::max(cfg.inner_grid_resolution, 2);
    const Scalar pi = std::acos(Scalar(-1));
    Scalar best_theta = 0, best_phi = 0;
    for (int i = 0; i < res; ++i) {
      const Scalar theta = pi * Scalar(i) / Scalar(res - 1);
      for (int j = 0; j < 2 * res; ++j) {
        const Scalar phi = 2 * pi * Scalar(j) / Scalar(2 * res);
        DensityMatrix<Scalar> rho = detail::bloch_state(theta, phi);
        const Scalar v = value_of(rho);
        if (v > best + Scalar(1e-12)) {
          best = v;
          best_state = rho;
          best_theta = theta;
          best_phi = phi;
          have_state = true;
        }
      }
    }
    if (have_state && std::isfinite(best)) {
      detail::NmOptions opts = refine;
      opts.init_step = static_cast<double>(pi / Scalar(2 * res));
      RealVector<Scalar> x0(2);
      x0 << best_theta, best_phi;
      auto nm = detail::nelder_mead_minimize<Scalar>(
          [&](const RealVector<Scalar>& x) {
            return -value_of(detail::bloch_state(x[0], x[1]));
          },
          x0, opts);
      if (-nm.f > best) {
        best = -nm.f;
        best_state = detail::bloch_state(nm.x[0], nm.x[1]);
      }
    }
  } else {
    for (int k = 0; k < cfg.n_state_restarts; ++k) {
      std::mt19937_64 rng(detail::mix_seed(cfg.seed, 9000 + static_cast<std::uint64_t>(k)));
      ComplexVector<Scalar> psi = detail::haar_unit_vector<Scalar>(dim, rng);
      RealVector<Scalar> v0(2 * dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        v0[i] = psi[i].real();
        v0[dim + i] = psi[i].imag();
      }
      DensityMatrix<Scalar> start = detail::state_from_components(v0);
      const Scalar f0 = value_of(start);
      if (f0 > best + Scalar(1e-12)) {
        best = f0;
        best_state = start;
        have_state = true;
      }
      if (!std::isfinite(f0) && f0 > 0) continue;  // +inf start: nothing to refine
      detail::NmOptions opts = refine;
      opts.max_iterations = 400;
      opts.init_step = 0.25;
      auto nm = detail::nelder_mead_minimize<Scalar>(
          [&](const RealVector<Scalar>& x) {
            // The functional is scale invariant; the norm penalty pins the
            // simplex to the unit sphere.
            const Scalar norm = x.norm();
            if (!(norm > Scalar(1e-8))) return std::numeric_limits<Scalar>::infinity();
            const Scalar penalty = (norm - Scalar(1)) * (norm - Scalar(1));
            return -value_of(detail::state_from_components(x)) + penalty;
          },
          v0, opts);
      const RealVector<Scalar> xr = nm.x;
      if (xr.norm() > Scalar(1e-8)) {
        DensityMatrix<Scalar> refined = detail::state_from_components(xr);
        const Scalar fr = value_of(refined);
        if (fr > best + Scalar(1e-12)) {
          best = fr;
          best_state = refined;
          have_state = true;
        }
      }
    }
  }
  if (!have_state && !std::isfinite(best))
    throw std::runtime_error("max_over_states: functional is not finite at any probed state");
  return {best_state, best};
}

// ---------------------------------------------------------------------------
// Outer minimization over bi-observables.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr double kOuterPenalty = 1e6;

/// The search runs over lower-triangular complex factors L(x,y); the effects
/// T^{-1/2} L L^dagger T^{-1/2} with T = sum L L^dagger form a valid
/// bi-observable for every parameter vector, so the outer search is
/// unconstrained.  Packing order per factor: column-major, diagonal entries
/// real, strict lower triangle as (re, im) pairs.
template <typename Scalar>
Eigen::Index triangular_param_count(Eigen::Index dim) {
  return dim * dim;
}

template <typename Scalar>
ComplexMatrix<Scalar> unpack_triangular(const RealVector<Scalar>& params, Eigen::Index offset,
                                        Eigen::Index dim) {
  ComplexMatrix<Scalar> l = ComplexMatrix<Scalar>::Zero(dim, dim);
  Eigen::Index at = offset;
  for (Eigen::Index j = 0; j < dim; ++j) {
    l(j, j) = std::complex<Scalar>(params[at++], 0);
    for (Eigen::Index i = j + 1; i < dim; ++i) {
      const Scalar re = params[at++];
      const Scalar im = params[at++];
      l(i, j) = std::complex<Scalar>(re, im);
    }
  }
  return l;
}

template <typename Scalar>
void pack_triangular(const ComplexMatrix<Scalar>& l, RealVector<Scalar>& params,
                     Eigen::Index offset) {
  Eigen::Index at = offset;
  for (Eigen::Index j = 0; j < l.rows(); ++j) {
    params[at++] = l(j, j).real();
    for (Eigen::Index i = j + 1; i < l.rows(); ++i) {
      params[at++] = l(i, j).real();
      params[at++] = l(i, j).imag();
    }
  }
}

template <typename Scalar>
BiObservable<Scalar> biobservable_from_params(const RealVector<Scalar>& params,
                                              const std::vector<Label>& x_outcomes,
                                              const std::vector<Label>& y_outcomes,
                                              Eigen::Index dim) {
  const auto nx = static_cast<Eigen::Index>(x_outcomes.size());
  const auto ny = static_cast<Eigen::Index>(y_outcomes.size());
  const Eigen::Index per = triangular_param_count<Scalar>(dim);
  std::vector<std::vector<ComplexMatrix<Scalar>>> gram(nx);
  ComplexMatrix<Scalar> total = ComplexMatrix<Scalar>::Zero(dim, dim);
  for (Eigen::Index x = 0; x < nx; ++x)
    for (Eigen::Index y = 0; y < ny; ++y) {
      ComplexMatrix<Scalar> l = unpack_triangular(params, (x * ny + y) * per, dim);
      gram[x].push_back((l * l.adjoint()).eval());
      total += gram[x].back();
    }
  const ComplexMatrix<Scalar> norm = psd_inv_sqrt<Scalar>(total);
  std::vector<std::vector<ComplexMatrix<Scalar>>> effects(nx);
  for (Eigen::Index x = 0; x < nx; ++x)
    for (Eigen::Index y = 0; y < ny; ++y) {
      ComplexMatrix<Scalar> e = norm * gram[x][y] * norm;
      effects[x].push_back(((e + e.adjoint()) / Scalar(2)).eval());
    }
  return BiObservable<Scalar>(x_outcomes, y_outcomes, std::move(effects));
}

/// Inverse map used for warm starts.  Valid effects already sum to the
/// identity, so their own triangular factors reproduce them; a vanishing
/// diagonal shift keeps the factorization defined on singular effects.
template <typename Scalar>
RealVector<Scalar> params_from_biobservable(const BiObservable<Scalar>& m) {
  const Eigen::Index per = triangular_param_count<Scalar>(m.dim());
  RealVector<Scalar> params(m.nx() * m.ny() * per);
  for (Eigen::Index x = 0; x < m.nx(); ++x)
    for (Eigen::Index y = 0; y < m.ny(); ++y) {
      const ComplexMatrix<Scalar>& e = m.effect(x, y);
      Scalar shift = Scalar(1e-12) * (Scalar(1) + static_cast<Scalar>(max_abs(e)));
      ComplexMatrix<Scalar> l;
      for (;; shift *= Scalar(100)) {
        Eigen::LLT<ComplexMatrix<Scalar>> llt(
            e + shift * ComplexMatrix<Scalar>::Identity(m.dim(), m.dim()));
        if (llt.info() == Eigen::Success) {
          l = llt.matrixL();
          break;
        }
        if (shift > Scalar(1)) throw std::runtime_error("params_from_biobservable: factorization failed");
      }
      pack_triangular(l, params, (x * m.ny() + y) * per);
    }
  return params;
}

}  // namespace detail

/// min over bi-observables of the max over states of the chosen flavor.
/// Derivative-free simplex descent with seeded restarts; +infinity inner
/// values enter the outer comparison as the finite penalty 1e6 and never
/// survive as a reported minimum.  The estimate is computed as min-then-max
/// exactly as written; no saddle-point interchange is assumed.
template <typename Scalar>
MinimaxResult<Scalar> min_over_biobservables(const SharpObservable<Scalar>& a,
                                             const SharpObservable<Scalar>& b, Flavor flavor,
                                             const MinimaxConfig& cfg,
                                             LogBase base = LogBase::bits) {
  validate_config(cfg);
  if (a.dim() != b.dim())
    throw std::invalid_argument("min_over_biobservables: dimensions differ");
  const Eigen::Index dim = a.dim();
  const std::vector<Label> xl = a.outcome_labels();
  const std::vector<Label> yl = b.outcome_labels();

  auto objective = [&](const RealVector<Scalar>& params) -> Scalar {
    try {
      BiObservable<Scalar> m = detail::biobservable_from_params(params, xl, yl, dim);
      detail::PairEvaluator<Scalar> eval(a, b, m, flavor, base);
      const Scalar v = max_over_states<Scalar>(
          [&eval](const DensityMatrix<Scalar>& rho) { return eval.total(rho); }, dim, cfg).second;
      return std::isfinite(v) ? v : Scalar(detail::kOuterPenalty);
    } catch (const std::invalid_argument&) {
      return Scalar(detail::kOuterPenalty);
    }
  };

  const Eigen::Index n_params =
      static_cast<Eigen::Index>(xl.size() * yl.size()) * detail::triangular_param_count<Scalar>(dim);

  // Restart 0: the sequential Lueders candidate M(x,y) = I_x*[B(y)].
  std::vector<RealVector<Scalar>> starts;
  starts.push_back(detail::params_from_biobservable(
      sequential_biobservable(luders_instrument(sharp_to_povm(a)), sharp_to_povm(b))));
  for (int r = 1; r < cfg.n_povm_restarts; ++r) {
    std::mt19937_64 rng(detail::mix_seed(cfg.seed, 100 + static_cast<std::uint64_t>(r)));
    std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
    RealVector<Scalar> p(n_params);
    for (Eigen::Index i = 0; i < n_params; ++i) p[i] = normal(rng);
    starts.push_back(std::move(p));
  }

  Scalar best = std::numeric_limits<Scalar>::infinity();
  RealVector<Scalar> best_params;
  bool best_converged = false;
  int total_iterations = 0;
  std::vector<std::pair<int, Scalar>> trace;

  const double round_step[3] = {0.6, 0.2, 0.07};
  const double round_share[3] = {0.45, 0.35, 0.20};

  bool done = false;
  for (const auto& start : starts) {
    if (done) break;
    RealVector<Scalar> x = start;
    for (int round = 0; round < 3 && !done; ++round) {
      detail::NmOptions opts;
      opts.max_iterations = std::max(1, static_cast<int>(cfg.max_iterations * round_share[round]));
      opts.f_tol = cfg.convergence_tol;
      opts.init_step = round_step[round];
      auto nm = detail::nelder_mead_minimize<Scalar>(
          objective, x, opts, [&](int, Scalar f_best) {
            ++total_iterations;
            trace.emplace_back(total_iterations, std::min(best, f_best));
          });
      x = nm.x;
      if (nm.f < best) {
        best = nm.f;
        best_params = x;
        best_converged = nm.converged;
      } else if (nm.f == best && nm.converged) {
        best_converged = true;
      }
      // The objective is a sum of entropies, hence nonnegative: reaching the
      // tolerance floor ends the search.
      if (best <= Scalar(cfg.convergence_tol)) {
        best_converged = true;
        done = true;
      }
    }
  }

  BiObservable<Scalar> argmin = detail::biobservable_from_params(best_params, xl, yl, dim);
  detail::PairEvaluator<Scalar> eval(a, b, argmin, flavor, base);
  auto [argmax, value] = max_over_states<Scalar>(
      [&eval](const DensityMatrix<Scalar>& rho) { return eval.total(rho); }, dim, cfg);
  trace.emplace_back(total_iterations, std::min(best, value));
  return MinimaxResult<Scalar>{value,      std::move(argmin),   argmax, std::move(trace),
                               best_converged, total_iterations, cfg.seed};
}

}  // namespace edt
