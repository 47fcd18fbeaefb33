// Classical information measures over distributions and joint distributions,
// the eigenbasis overlap constant and the two entropic bounds.
#pragma once

#include "edt/core.hpp"

namespace edt {

namespace checks {

template <typename Scalar>
std::vector<Check> joint_distribution(const std::vector<Label>& row_outcomes,
                                      const std::vector<Label>& col_outcomes,
                                      const RealMatrix<Scalar>& p, const std::string& subject) {
  std::vector<Check> out;
  out.push_back(make_check(subject, "grid matches outcome labels",
                           (p.rows() >= 1 && p.cols() >= 1 &&
                            static_cast<Eigen::Index>(row_outcomes.size()) == p.rows() &&
                            static_cast<Eigen::Index>(col_outcomes.size()) == p.cols())
                               ? 0.0 : 1.0, 0.0));
  if (!out.back().pass) return out;
  double band = all_finite(p) ? std::max(0.0, -static_cast<double>(p.minCoeff())) :
                                std::numeric_limits<double>::infinity();
  out.push_back(make_check(subject, "entries nonnegative", band, kProbabilityBand));
  out.push_back(make_check(subject, "normalization",
                           std::abs(static_cast<double>(p.sum()) - 1.0),
                           tolerances().construction));
  return out;
}

}  // namespace checks

/// Joint distribution p(a, m) with row label a (target outcome) and column
/// label m (measurement outcome).
template <typename Scalar = double>
class JointDistribution {
 public:
  JointDistribution(std::vector<Label> row_outcomes, std::vector<Label> col_outcomes,
                    RealMatrix<Scalar> probabilities)
      : rows_(std::move(row_outcomes)), cols_(std::move(col_outcomes)),
        p_(std::move(probabilities)) {
    require_all(checks::joint_distribution(rows_, cols_, p_, "JointDistribution"));
    p_ = p_.cwiseMax(Scalar(0));
    p_ /= p_.sum();
  }

  const std::vector<Label>& row_outcomes() const { return rows_; }
  const std::vector<Label>& col_outcomes() const { return cols_; }
  const RealMatrix<Scalar>& probabilities() const { return p_; }

  Distribution<Scalar> row_marginal() const {
    return Distribution<Scalar>(rows_, p_.rowwise().sum());
  }
  Distribution<Scalar> col_marginal() const {
    return Distribution<Scalar>(cols_, p_.colwise().sum().transpose());
  }

 private:
  std::vector<Label> rows_;
  std::vector<Label> cols_;
  RealMatrix<Scalar> p_;
};

/// Overlap constant c = max |<x|y>|^2 and the two bounds built from it.
template <typename Scalar = double>
struct TradeoffBounds {
  Scalar c;                // in (0, 1]
  Scalar mu_bound;         // -log c
  Scalar exclusion_bound;  // log(d^2 c)
  Eigen::Index dim;
};

// ---------------------------------------------------------------------------
// Entropies.  Probabilities at or below kLogZeroCutoff are exact zeros.
// ---------------------------------------------------------------------------

/// H(p) = -sum p log p, with 0 log 0 = 0.
template <typename Scalar>
Scalar shannon(const Distribution<Scalar>& p, LogBase base = LogBase::bits) {
  Scalar h = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] > Scalar(kLogZeroCutoff)) h -= p[i] * log_base(p[i], base);
  return h;
}

/// S(p||q) = sum p (log p - log q); +infinity on support violation.
template <typename Scalar>
Scalar relative_entropy(const Distribution<Scalar>& p, const Distribution<Scalar>& q,
                        LogBase base = LogBase::bits) {
  if (!same_outcomes(p.outcomes(), q.outcomes()))
    throw std::invalid_argument("relative_entropy: outcome sets differ");
  Scalar s = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= Scalar(kLogZeroCutoff)) continue;
    if (q[i] <= Scalar(kLogZeroCutoff)) return std::numeric_limits<Scalar>::infinity();
    s += p[i] * (log_base(p[i], base) - log_base(q[i], base));
  }
  // Gibbs: the exact value is nonnegative; only rounding can push it below.
  if (s < Scalar(0) && s > Scalar(-1e-12)) s = Scalar(0);
  return s;
}

/// H(A|M) = -sum_{m,a} p(a,m) log p(a|m); terms with p(m) = 0 contribute 0.
template <typename Scalar>
Scalar conditional_entropy(const JointDistribution<Scalar>& joint, LogBase base = LogBase::bits) {
  const auto& p = joint.probabilities();
  Scalar h = 0;
  for (Eigen::Index m = 0; m < p.cols(); ++m) {
    const Scalar pm = p.col(m).sum();
    if (pm <= Scalar(kLogZeroCutoff)) continue;
    for (Eigen::Index a = 0; a < p.rows(); ++a) {
      if (p(a, m) <= Scalar(kLogZeroCutoff)) continue;
      const Scalar cond = std::min(p(a, m) / pm, Scalar(1));
      h -= p(a, m) * log_base(cond, base);
    }
  }
  return h;
}

/// I(A:M) = H(A) - H(A|M).
template <typename Scalar>
Scalar mutual_information(const JointDistribution<Scalar>& joint, LogBase base = LogBase::bits) {
  return shannon(joint.row_marginal(), base) - conditional_entropy(joint, base);
}

/// c = max_{x,y} |<x|y>|^2 by exhaustive search over the d^2 overlaps,
/// together with the Maassen-Uffink bound -log c and the information
/// exclusion bound log(d^2 c).
template <typename Scalar>
TradeoffBounds<Scalar> overlap_and_bounds(const SharpObservable<Scalar>& a,
                                          const SharpObservable<Scalar>& b,
                                          LogBase base = LogBase::bits) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("overlap_and_bounds: dimensions differ");
  Scalar c = 0;
  for (Eigen::Index x = 0; x < a.size(); ++x)
    for (Eigen::Index y = 0; y < b.size(); ++y)
      c = std::max(c, (a.projector(x) * b.projector(y)).trace().real());
  c = std::min(c, Scalar(1));
  const auto d = a.dim();
  return TradeoffBounds<Scalar>{c, -log_base(c, base),
                                log_base(Scalar(d) * Scalar(d) * c, base), d};
}

/// Master relation p(a,m) = p(a) Tr{M_m |a><a|}: the joint distribution of a
/// target eigenbasis ensemble against a measurement.
template <typename Scalar>
JointDistribution<Scalar> master_joint(const Distribution<Scalar>& input,
                                       const SharpObservable<Scalar>& basis,
                                       const Povm<Scalar>& measurement) {
  if (basis.dim() != measurement.dim())
    throw std::invalid_argument("master_joint: basis and measurement dimensions differ");
  if (!same_outcomes(input.outcomes(), basis.outcome_labels()))
    throw std::invalid_argument("master_joint: input outcomes do not match basis outcomes");
  RealMatrix<Scalar> p(basis.size(), measurement.size());
  for (Eigen::Index a = 0; a < basis.size(); ++a)
    for (Eigen::Index m = 0; m < measurement.size(); ++m)
      p(a, m) = input[a] * (measurement.effect(m) * basis.projector(a)).trace().real();
  return JointDistribution<Scalar>(input.outcomes(), measurement.outcomes(), std::move(p));
}

}  // namespace edt
