#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "thermoform/ldp.hpp"

using namespace thermoform;

namespace {

const Grid kGrid(64);

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(a + (b - a) * i / (count - 1));
  }
  return out;
}

FreeEnergyBackend quadratic_backend(double t_max = 5.0) {
  return {[](double t) { return 0.5 * t * t; }, [](double t) { return t; },
          -t_max, t_max};
}

FreeEnergyCurve curve_from_backend(const FreeEnergyBackend& be,
                                   const std::vector<double>& t_grid) {
  FreeEnergyCurve curve;
  curve.t_grid = t_grid;
  for (double t : t_grid) {
    curve.energy.push_back(be.energy(t));
    curve.energy_prime.push_back(be.energy_prime(t));
  }
  return curve;
}

}  // namespace

TEST_CASE("free energy of cosine under the doubling map") {
  const CircleMap doubling(2);
  const auto t_grid = linspace(-2.0, 2.0, 17);
  const auto curve = free_energy(doubling, Potential(TrigPoly()),
                                 TrigPoly::harmonic_cos(1), t_grid, kGrid);
  const auto at = [&](double t) {
    for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
      if (std::abs(curve.t_grid[i] - t) < 1e-12) return curve.energy[i];
    }
    FAIL("t not on grid");
    return 0.0;
  };
  CHECK(std::abs(at(0.0)) <= 1e-12);
  CHECK(curve.second_at_zero == Catch::Approx(0.5).margin(1e-6));
  for (std::size_t i = 1; i + 1 < curve.energy.size(); ++i) {
    CHECK(curve.energy[i + 1] - 2 * curve.energy[i] + curve.energy[i - 1] >=
          -1e-9);
    CHECK(curve.energy_prime[i + 1] >= curve.energy_prime[i] - 1e-9);
  }
  // E'(0) = m = 0.
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    if (std::abs(curve.t_grid[i]) < 1e-12) {
      CHECK(std::abs(curve.energy_prime[i]) <= 1e-9);
    }
  }
  // E is genuinely asymmetric (the third cumulant of cos under doubling is
  // nonzero: e.g. int cos^2(2pi x) cos(4pi x) dx = 1/4). Pin the odd part
  // against the independent periodic-orbit pressure oracle.
  const double odd = at(2.0) - at(-2.0);
  CHECK(odd > 0.5);
  const double orbit_odd =
      periodic_orbit_pressure(doubling, TrigPoly::harmonic_cos(1, 2.0), 16) -
      periodic_orbit_pressure(doubling, TrigPoly::harmonic_cos(1, -2.0), 16);
  CHECK(odd == Catch::Approx(orbit_odd).margin(2e-3));
}

TEST_CASE("free energy of a constant observable is affine") {
  const auto curve =
      free_energy(CircleMap(2), Potential(TrigPoly::harmonic_cos(1)),
                  TrigPoly(0.7), linspace(-1.0, 1.0, 9), kGrid);
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    CHECK(curve.energy[i] ==
          Catch::Approx(0.7 * curve.t_grid[i]).margin(1e-11));
  }
  CHECK(std::abs(curve.second_at_zero) <= 1e-6);
}

TEST_CASE("Legendre transform of the synthetic quadratic") {
  const auto be = quadratic_backend();
  const auto curve = curve_from_backend(be, linspace(-2.0, 2.0, 33));
  const auto rf = legendre(be, curve, linspace(-1.0, 1.0, 21));
  CHECK(rf.mean == Catch::Approx(0.0).margin(1e-14));
  for (std::size_t i = 0; i < rf.s_grid.size(); ++i) {
    const double s = rf.s_grid[i];
    CHECK(rf.t_of_s[i] == Catch::Approx(s).margin(1e-10));
    CHECK(rf.rate[i] == Catch::Approx(0.5 * s * s).margin(1e-10));
  }
}

TEST_CASE("Legendre error paths") {
  SECTION("affine energy is rejected") {
    const FreeEnergyBackend be{[](double t) { return t; },
                               [](double) { return 1.0; }, -5.0, 5.0};
    const auto curve = curve_from_backend(be, linspace(-1.0, 1.0, 9));
    CHECK_THROWS_AS(legendre(be, curve, {0.5}), NotStrictlyConvex);
  }
  SECTION("s outside the range of E'") {
    const auto be = quadratic_backend(1.0);
    const auto curve = curve_from_backend(be, linspace(-1.0, 1.0, 9));
    CHECK_THROWS_AS(legendre(be, curve, {1.5}), SOutOfRange);
    CHECK_THROWS_AS(legendre(be, curve, {1.0}), SOutOfRange);  // closed end
  }
}

TEST_CASE("dynamical rate function: variational property and zero at m") {
  const CircleMap doubling(2);
  const auto be = dynamical_backend(doubling, Potential(TrigPoly()),
                                    TrigPoly::harmonic_cos(1), kGrid);
  const auto curve = free_energy(doubling, Potential(TrigPoly()),
                                 TrigPoly::harmonic_cos(1),
                                 linspace(-2.0, 2.0, 17), kGrid);
  // The reachable s-range is asymmetric: inf E' is ~ -0.5 (the minimizing
  // period-2 orbit of cos) while sup E' approaches 1 at the fixed point.
  CHECK(be.energy_prime(be.t_lo) <= -0.45);
  CHECK(be.energy_prime(be.t_hi) >= 0.95);
  const auto rf = legendre(be, curve, linspace(-0.4, 0.6, 11));
  // I >= 0, zero exactly at the mean, convex.
  for (std::size_t i = 0; i < rf.rate.size(); ++i) {
    CHECK(rf.rate[i] >= -1e-10);
  }
  for (std::size_t i = 1; i + 1 < rf.rate.size(); ++i) {
    CHECK(rf.rate[i + 1] - 2 * rf.rate[i] + rf.rate[i - 1] >= -1e-9);
  }
  CHECK(std::abs(rate_at(be, rf.mean)) <= 1e-10);
  // Variational identity I(E'(t)) = t E'(t) - E(t) at off-grid t values.
  for (double t : {-1.5, -0.7, 0.3, 1.1}) {
    const double s = be.energy_prime(t);
    const double lhs = rate_at(be, s, t > 0 ? 0.5 : -0.5);
    CHECK(std::abs(lhs - (t * s - be.energy(t))) <= 1e-9);
  }
}

TEST_CASE("deterministic LDP convergence of a_n") {
  const CircleMap doubling(2);
  SECTION("t = 0 gives a_n = 0") {
    const auto fit = ldp_deterministic_check(
        doubling, Potential(TrigPoly()), TrigPoly::harmonic_cos(1), 0.0, 10,
        kGrid);
    for (double a : fit.a_n) CHECK(std::abs(a) <= 1e-12);
  }
  SECTION("constant observable is exact at every n") {
    const auto fit = ldp_deterministic_check(
        doubling, Potential(TrigPoly()), TrigPoly(0.4), 2.0, 10, kGrid);
    for (double a : fit.a_n) CHECK(a == Catch::Approx(0.8).margin(1e-11));
  }
  SECTION("cosine at t = 1: C/n fit") {
    const auto fit = ldp_deterministic_check(
        doubling, Potential(TrigPoly()), TrigPoly::harmonic_cos(1), 1.0, 30,
        kGrid, 5);
    CHECK(fit.r_squared >= 0.99);
    CHECK(fit.residual_at_n_max <= 0.05);
  }
}

TEST_CASE("equilibrium sampler statistics") {
  const CircleMap doubling(2);
  SECTION("branch probabilities sum to one") {
    const auto sampler = EquilibriumSampler::make(
        doubling, Potential(TrigPoly::harmonic_cos(1)), kGrid);
    for (double x : {0.0, 0.137, 0.5, 0.93}) {
      const auto p = sampler.branch_probabilities(x);
      double total = 0.0;
      for (double q : p) {
        CHECK(q > 0.0);
        total += q;
      }
      CHECK(total == Catch::Approx(1.0).margin(1e-12));
    }
  }
  SECTION("Lebesgue case mean of cosine") {
    const auto xs =
        sample_equilibrium(doubling, Potential(TrigPoly()), kGrid, 100000, 3);
    double mean = 0.0;
    for (double x : xs) mean += std::cos(kTwoPi * x);
    mean /= xs.size();
    CHECK(std::abs(mean) <= 0.01);
  }
  SECTION("three-sigma agreement with spectral integrals") {
    const Potential phi{TrigPoly::harmonic_cos(1)};
    const auto mu = equilibrium_measure(solve_triple(doubling, phi, kGrid));
    const auto xs = sample_equilibrium(doubling, phi, kGrid, 50000, 17);
    const auto check_avg = [&](auto g) {
      double avg = 0.0, avg2 = 0.0;
      for (double x : xs) {
        const double v = g(x);
        avg += v;
        avg2 += v * v;
      }
      avg /= xs.size();
      avg2 /= xs.size();
      const double sd = std::sqrt(std::max(avg2 - avg * avg, 0.0));
      const double expect = mu.integrate_fn(kGrid, g);
      CHECK(std::abs(avg - expect) <= 3.0 * sd / std::sqrt(1.0 * xs.size()));
    };
    check_avg([](double x) { return std::cos(kTwoPi * x); });
    check_avg([](double x) { return std::sin(kTwoPi * x); });
    check_avg([](double x) { return std::cos(2 * kTwoPi * x); });
  }
}

TEST_CASE("Monte Carlo LDP") {
  const CircleMap doubling(2);
  SECTION("interval containing the mean is trivial") {
    const auto out =
        ldp_monte_carlo(doubling, Potential(TrigPoly()),
                        TrigPoly::harmonic_cos(1), -0.2, 0.2, 30, 20000, 5,
                        kGrid);
    CHECK(out.predicted_rate == 0.0);
    CHECK(out.hits > out.samples / 2);
    CHECK(out.empirical_rate >= -0.02);
  }
  SECTION("deviation interval decays at roughly the predicted rate") {
    const auto out =
        ldp_monte_carlo(doubling, Potential(TrigPoly()),
                        TrigPoly::harmonic_cos(1), 0.3, 0.5, 30, 200000, 11,
                        kGrid);
    REQUIRE_FALSE(out.no_hits);
    CHECK(out.predicted_rate < 0.0);
    // At n = 30 the subexponential prefactor still bites (~log(n)/n); the
    // acceptance suite pushes n to 70 where the gap tightens.
    CHECK(out.empirical_rate < -0.5 * std::abs(out.predicted_rate));
    CHECK(std::abs(out.empirical_rate - out.predicted_rate) <= 0.1);
  }
}

TEST_CASE("multifractal pressure spectrum") {
  const CircleMap doubling(2);
  const Potential phi{TrigPoly()};
  const TrigPoly psi = TrigPoly::harmonic_cos(1);
  SECTION("coboundaries rejected") {
    CHECK_THROWS_AS(
        multifractal_spectrum(doubling, phi,
                              TrigPoly::harmonic_cos(2) +
                                  TrigPoly::harmonic_cos(1, -1.0),
                              {0.0, 0.1}, kGrid),
        CoboundaryObservable);
  }
  SECTION("closed-form relations on the admissible grid") {
    const auto spec =
        multifractal_spectrum(doubling, phi, psi, linspace(0.0, 1.2, 25),
                              kGrid);
    REQUIRE_FALSE(spec.c_grid.empty());
    CHECK(spec.c_max > 0.3);
    CHECK(spec.pressure_of_level_set[0] ==
          Catch::Approx(std::log(2.0)).margin(1e-10));
    for (std::size_t i = 1; i < spec.c_grid.size(); ++i) {
      CHECK(spec.pressure_of_level_set[i] <=
            spec.pressure_of_level_set[i - 1] + 1e-12);
      CHECK(spec.c_grid[i] < spec.c_max);
    }
    // Direct re-evaluation of P_top - min(I(m-c), I(m+c)) at one grid point.
    const auto be = dynamical_backend(doubling, phi, psi, kGrid);
    const double c = spec.c_grid[spec.c_grid.size() / 2];
    const double inf_rate =
        std::min(rate_at(be, spec.mean - c, -0.5), rate_at(be, spec.mean + c, 0.5));
    CHECK(spec.pressure_of_level_set[spec.c_grid.size() / 2] ==
          Catch::Approx(std::log(2.0) - inf_rate).margin(1e-9));
  }
}
