// Derivative-free simplex minimizer with the adaptive coefficients of
// Gao & Han, suitable for the moderately high-dimensional searches here.
#pragma once

#include <functional>

#include "edt/types.hpp"

namespace edt::detail {

struct NmOptions {
  int max_iterations = 1000;
  double f_tol = 1e-10;    // absolute spread of simplex values
  double init_step = 0.5;  // initial simplex edge length
};

template <typename Scalar>
struct NmOutcome {
  RealVector<Scalar> x;
  Scalar f = std::numeric_limits<Scalar>::infinity();
  int iterations = 0;
  bool converged = false;
};

/// Minimizes f over R^n starting from x0.  NaN objective values are treated
/// as +infinity.  on_iterate(iteration, best) fires once per main-loop pass.
template <typename Scalar, typename F>
NmOutcome<Scalar> nelder_mead_minimize(
    F&& f, const RealVector<Scalar>& x0, const NmOptions& opts,
    const std::function<void(int, Scalar)>& on_iterate = {}) {
  const Eigen::Index n = x0.size();
  auto safe = [&f](const RealVector<Scalar>& x) {
    const Scalar v = f(x);
    return std::isnan(v) ? std::numeric_limits<Scalar>::infinity() : v;
  };

  // Adaptive coefficients.
  const Scalar alpha = 1;
  const Scalar beta = 1 + Scalar(2) / Scalar(n);
  const Scalar gamma = Scalar(0.75) - Scalar(1) / (2 * Scalar(n));
  const Scalar delta = 1 - Scalar(1) / Scalar(n);

  std::vector<std::pair<Scalar, RealVector<Scalar>>> simplex;
  simplex.reserve(n + 1);
  simplex.emplace_back(safe(x0), x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    RealVector<Scalar> xi = x0;
    xi[i] += Scalar(opts.init_step);
    simplex.emplace_back(safe(xi), std::move(xi));
  }
  auto by_value = [](const auto& l, const auto& r) { return l.first < r.first; };
  std::sort(simplex.begin(), simplex.end(), by_value);

  NmOutcome<Scalar> out;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (on_iterate) on_iterate(it, simplex.front().first);
    if (simplex.back().first - simplex.front().first <= Scalar(opts.f_tol)) {
      out.converged = true;
      break;
    }
    RealVector<Scalar> centroid = RealVector<Scalar>::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += simplex[i].second;
    centroid /= Scalar(n);

    const RealVector<Scalar>& worst = simplex.back().second;
    RealVector<Scalar> xr = centroid + alpha * (centroid - worst);
    const Scalar fr = safe(xr);

    bool shrink = false;
    if (fr < simplex.front().first) {
      RealVector<Scalar> xe = centroid + beta * (xr - centroid);
      const Scalar fe = safe(xe);
      simplex.back() = fe < fr ? std::make_pair(fe, std::move(xe)) : std::make_pair(fr, std::move(xr));
    } else if (fr < simplex[n - 1].first) {
      simplex.back() = {fr, std::move(xr)};
    } else if (fr < simplex.back().first) {
      RealVector<Scalar> xc = centroid + gamma * (xr - centroid);
      const Scalar fc = safe(xc);
      if (fc <= fr) simplex.back() = {fc, std::move(xc)};
      else shrink = true;
    } else {
      RealVector<Scalar> xc = centroid - gamma * (centroid - worst);
      const Scalar fc = safe(xc);
      if (fc < simplex.back().first) simplex.back() = {fc, std::move(xc)};
      else shrink = true;
    }
    if (shrink) {
      for (Eigen::Index i = 1; i <= n; ++i) {
        simplex[i].second = simplex.front().second + delta * (simplex[i].second - simplex.front().second);
        simplex[i].first = safe(simplex[i].second);
      }
    }
    std::sort(simplex.begin(), simplex.end(), by_value);
  }
  out.x = simplex.front().second;
  out.f = simplex.front().first;
  out.iterations = it;
  return out;
}

}  // namespace edt::detail
