#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "edt/core.hpp"

using namespace edt;

namespace {

using CMat = ComplexMatrix<double>;
using CVec = ComplexVector<double>;

DensityMatrix<double> ket_state(std::initializer_list<std::complex<double>> amplitudes) {
  CVec v(static_cast<Eigen::Index>(amplitudes.size()));
  Eigen::Index i = 0;
  for (auto a : amplitudes) v[i++] = a;
  v /= v.norm();
  return DensityMatrix<double>(v * v.adjoint());
}

}  // namespace

TEST_CASE("born rule on qubit references") {
  const auto z = sharp_to_povm(pauli_z<double>());

  SUBCASE("maximally mixed state") {
    DensityMatrix<double> mixed(CMat::Identity(2, 2) / 2.0);
    const auto p = born_rule(mixed, z);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("eigenstate") {
    const auto p = born_rule(ket_state({1.0, 0.0}), z);
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("mutually unbiased state") {
    const auto p = born_rule(ket_state({1.0, 1.0}), z);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("dimension mismatch is an error") {
    DensityMatrix<double> qutrit(CMat::Identity(3, 3) / 3.0);
    CHECK_THROWS_AS(born_rule(qutrit, z), std::invalid_argument);
  }
}

TEST_CASE("sharp observables expose their projective POVM") {
  SUBCASE("Z") {
    const auto p = sharp_to_povm(pauli_z<double>());
    CHECK(p.outcomes() == std::vector<Label>{1.0, -1.0});
    CHECK(max_abs(p.effect(0) - (CMat(2, 2) << 1, 0, 0, 0).finished()) < 1e-14);
    CHECK(max_abs(p.effect(1) - (CMat(2, 2) << 0, 0, 0, 1).finished()) < 1e-14);
  }
  SUBCASE("X projectors are the Hadamard pair") {
    const auto p = sharp_to_povm(pauli_x<double>());
    CMat plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    CHECK(max_abs(p.effect(0) - plus) < 1e-14);
  }
  SUBCASE("diagonal d=3 observable") {
    CMat m = CMat::Zero(3, 3);
    m(0, 0) = 0.5;
    m(1, 1) = 1.5;
    m(2, 2) = -2.0;
    const auto obs = SharpObservable<double>::from_matrix(m);
    const auto p = sharp_to_povm(obs);
    REQUIRE(p.size() == 3);
    for (Eigen::Index i = 0; i < 3; ++i) {
      CHECK(std::abs(p.effect(i).trace().real() - 1.0) < 1e-12);
      CHECK(max_abs(p.effect(i) * p.effect(i) - p.effect(i)) < 1e-12);
    }
  }
}

TEST_CASE("sharp effects are idempotent and reconstruct the source matrix") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto obs = random_sharp_observable<double>(3, seed);
    const auto povm = sharp_to_povm(obs);
    for (Eigen::Index i = 0; i < povm.size(); ++i) {
      const CMat& e = povm.effect(i);
      CHECK(max_abs(e * e - e) <= 1e-9);
    }
    // Round trip through the spectral form.
    const auto back = SharpObservable<double>::from_matrix(obs.matrix());
    CHECK(max_abs(back.matrix() - obs.matrix()) <= 1e-9);
  }
}

TEST_CASE("random pure states") {
  SUBCASE("deterministic per seed") {
    const auto a = random_pure_state<double>(2, 42);
    const auto b = random_pure_state<double>(2, 42);
    CHECK(max_abs(a.matrix() - b.matrix()) == 0.0);
    const auto c = random_pure_state<double>(2, 43);
    CHECK(max_abs(a.matrix() - c.matrix()) > 0.0);
  }
  SUBCASE("unit trace and purity") {
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
      const auto rho = random_pure_state<double>(4, seed);
      CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-10);
      CHECK(std::abs((rho.matrix() * rho.matrix()).trace().real() - 1.0) < 1e-10);
    }
  }
  SUBCASE("Haar mean approaches the maximally mixed state") {
    CMat mean = CMat::Zero(2, 2);
    const int n = 10000;
    for (int i = 0; i < n; ++i)
      mean += random_pure_state<double>(2, 1000 + static_cast<std::uint64_t>(i)).matrix();
    mean /= double(n);
    CHECK(max_abs(mean - CMat::Identity(2, 2) / 2.0) < 0.02);
  }
}

TEST_CASE("random POVMs") {
  SUBCASE("single outcome forces the identity") {
    const auto p = random_povm<double>(3, 1, 7);
    CHECK(max_abs(p.effect(0) - CMat::Identity(3, 3)) < 1e-10);
  }
  SUBCASE("construction satisfies the invariants explicitly") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto p = random_povm<double>(2, 4, seed);
      CMat sum = CMat::Zero(2, 2);
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        sum += p.effect(i);
        CHECK(checks::min_eigenvalue(p.effect(i)) > -1e-10);
      }
      CHECK(max_abs(sum - CMat::Identity(2, 2)) < 1e-10);
    }
  }
  SUBCASE("bit-identical for a fixed seed") {
    const auto a = random_povm<double>(3, 5, 99);
    const auto b = random_povm<double>(3, 5, 99);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      CHECK(max_abs(a.effect(i) - b.effect(i)) == 0.0);
  }
}

TEST_CASE("born rule output is normalized for generated inputs") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto rho = random_density_matrix<double>(3, seed);
    const auto povm = random_povm<double>(3, 5, seed + 1000);
    const auto p = born_rule(rho, povm);
    CHECK(std::abs(p.probabilities().sum() - 1.0) <= 1e-10);
    CHECK(p.probabilities().minCoeff() >= 0.0);
  }
}

TEST_CASE("validation rejects malformed inputs") {
  SUBCASE("non-hermitian matrix") {
    CMat m(2, 2);
    m << 1.0, std::complex<double>(0, 1), std::complex<double>(0, 1), 0.0;
    CHECK_THROWS_AS((HermitianOperator<double>(m)), std::invalid_argument);
  }
  SUBCASE("non-finite entries") {
    CMat m = CMat::Identity(2, 2);
    m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((HermitianOperator<double>(m)), std::invalid_argument);
  }
  SUBCASE("trace away from one") {
    CHECK_THROWS_AS(DensityMatrix<double>(CMat::Identity(2, 2)), std::invalid_argument);
  }
  SUBCASE("negative eigenvalue beyond tolerance") {
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = 1.0 + 1e-6;
    m(1, 1) = -1e-6;
    CHECK_THROWS_AS((DensityMatrix<double>(m)), std::invalid_argument);
  }
  SUBCASE("tiny negative eigenvalue within tolerance is accepted") {
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = 1.0 + 5e-11;
    m(1, 1) = -5e-11;
    CHECK_NOTHROW(DensityMatrix<double>(m));
  }
  SUBCASE("degenerate observable is rejected") {
    CHECK_THROWS_AS(SharpObservable<double>::from_matrix(CMat::Identity(2, 2)),
                    std::invalid_argument);
  }
  SUBCASE("incomplete POVM") {
    std::vector<CMat> effects{CMat::Identity(2, 2) * 0.45, CMat::Identity(2, 2) * 0.45};
    CHECK_THROWS_AS(Povm<double>({0.0, 1.0}, effects), std::invalid_argument);
  }
  SUBCASE("probability outside the tolerance band") {
    RealVector<double> p(2);
    p << 1.01, -0.01;
    CHECK_THROWS_AS(Distribution<double>({0.0, 1.0}, p), std::invalid_argument);
  }
  SUBCASE("eigen-solver noise is clamped to zero") {
    RealVector<double> p(2);
    p << 1.0 + 5e-13, -5e-13;
    const Distribution<double> d({0.0, 1.0}, p);
    CHECK(d[1] == 0.0);
    CHECK(d[0] == 1.0);
  }
}

TEST_CASE("global tolerance knob") {
  set_tolerance(1e-6);
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = 1.0 + 1e-8;
  m(1, 1) = -1e-8;
  CHECK_NOTHROW(DensityMatrix<double>(m));
  set_tolerance(1e-10);
  CHECK_THROWS_AS((DensityMatrix<double>(m)), std::invalid_argument);
  CHECK(tolerances().derived == doctest::Approx(1e-9));
}
