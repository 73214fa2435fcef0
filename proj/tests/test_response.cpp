#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "thermoform/response.hpp"

using namespace thermoform;

namespace {

const Grid kGrid(96);

CircleMap perturbed() { return CircleMap(2, TrigPoly::harmonic_sin(1, 0.08)); }

}  // namespace

TEST_CASE("potential response: closed forms and FD oracle") {
  const CircleMap doubling(2);
  SECTION("Lebesgue mean of cosine is zero") {
    const auto r = pressure_derivative_potential(
        doubling, Potential(TrigPoly()), TrigPoly::harmonic_cos(1), kGrid);
    CHECK(std::abs(r.formula_value) <= 1e-12);
    CHECK(std::abs(r.fd_value) <= 1e-8);
  }
  SECTION("constant direction gives exactly 1") {
    const auto r = pressure_derivative_potential(
        perturbed(), Potential(TrigPoly::harmonic_cos(1)), TrigPoly(1.0),
        kGrid);
    CHECK(r.formula_value == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.discrepancy <= 1e-8);
  }
  SECTION("generic case against FD") {
    const auto r = pressure_derivative_potential(
        doubling, Potential(TrigPoly::harmonic_cos(1)),
        TrigPoly::harmonic_sin(1), kGrid);
    CHECK(r.discrepancy <= 1e-6);
  }
}

TEST_CASE("map response vanishes identically for phi = 0") {
  for (const TrigPoly& h1 :
       {TrigPoly::harmonic_sin(1), TrigPoly::harmonic_cos(2, 0.5)}) {
    const auto r = pressure_derivative_map(CircleMap(2), Potential(TrigPoly()),
                                           h1, kGrid);
    CHECK(std::abs(r.formula_value) <= 1e-8);
    CHECK(std::abs(r.fd_value) <= 1e-8);
  }
}

TEST_CASE("map response matches FD across the corpus") {
  const CircleMap maps[] = {CircleMap(2), perturbed()};
  for (const auto& map : maps) {
    const Potential phis[] = {Potential(TrigPoly()),
                              Potential(TrigPoly::harmonic_cos(1)),
                              Potential::neg_log_deriv(map)};
    for (const auto& phi : phis) {
      for (const TrigPoly& h1 :
           {TrigPoly::harmonic_sin(1), TrigPoly::harmonic_cos(1)}) {
        const auto r = pressure_derivative_map(map, phi, h1, kGrid);
        INFO("phi=" << phi.label());
        CHECK(r.discrepancy <= 1e-5);
      }
    }
  }
}

TEST_CASE("second-term placement: the base-point form is the correct one") {
  // Theorem-level ambiguity in the argument of the branch-derivative factor;
  // the FD oracle selects the base-point placement. Pin that choice.
  const CircleMap map = perturbed();
  const Potential phi{TrigPoly::harmonic_cos(1)};
  const TrigPoly h1 = TrigPoly::harmonic_sin(1);
  const auto r = pressure_derivative_map(map, phi, h1, kGrid);
  const double nested = detail::map_response_formula(
      map, phi, h1, kGrid, detail::SecondTermPlacement::kNested);
  CHECK(r.discrepancy <= 1e-5);
  CHECK(std::abs(nested - r.fd_value) > 1e-3);
}

TEST_CASE("chain-rule zero: total derivative of the ACIP pressure") {
  // P(f_eps, -log f'_eps) = 0 for all eps, so the map partial plus the
  // potential partial in the direction H2 = -d/deps log f'_eps must cancel.
  const CircleMap map = perturbed();
  const TrigPoly h1 = TrigPoly::harmonic_sin(1, 0.5);
  const Potential phi = Potential::neg_log_deriv(map);
  const TrigPoly dh1 = h1.derivative();
  const Potential h2(
      [&, dh1](double x) { return -dh1(x) / map.deriv(x); },
      [](double) { return 0.0; }, "chain");
  const double map_part =
      pressure_derivative_map(map, phi, h1, kGrid).formula_value;
  const auto mu = equilibrium_measure(solve_triple(map, phi, kGrid));
  const double pot_part =
      mu.integrate_fn(kGrid, [&](double x) { return h2(x); });
  CHECK(std::abs(map_part + pot_part) <= 1e-6);
}

TEST_CASE("response is linear in the direction") {
  const CircleMap map = perturbed();
  const Potential phi{TrigPoly::harmonic_cos(1, 0.5)};
  SECTION("potential directions") {
    const TrigPoly a = TrigPoly::harmonic_sin(1);
    const TrigPoly b = TrigPoly::harmonic_cos(2, 0.3);
    const double va =
        pressure_derivative_potential(map, phi, a, kGrid).formula_value;
    const double vb =
        pressure_derivative_potential(map, phi, b, kGrid).formula_value;
    const double vab =
        pressure_derivative_potential(map, phi, 2.5 * Potential(a) + b, kGrid)
            .formula_value;
    CHECK(vab == Catch::Approx(2.5 * va + vb).margin(1e-9));
  }
  SECTION("map directions") {
    const TrigPoly a = TrigPoly::harmonic_sin(1, 0.4);
    const TrigPoly b = TrigPoly::harmonic_cos(1, 0.4);
    const double va = detail::map_response_formula(
        map, phi, a, kGrid, detail::SecondTermPlacement::kBase);
    const double vb = detail::map_response_formula(
        map, phi, b, kGrid, detail::SecondTermPlacement::kBase);
    const double vab = detail::map_response_formula(
        map, phi, 2.0 * a + b, kGrid, detail::SecondTermPlacement::kBase);
    CHECK(vab == Catch::Approx(2.0 * va + vb).margin(1e-9));
  }
}

TEST_CASE("derivative of equilibrium averages") {
  const CircleMap doubling(2);
  SECTION("psi = 1 is stationary") {
    const auto r = equilibrium_average_derivative(
        doubling, Potential(TrigPoly()), Potential(TrigPoly(1.0)),
        TrigPoly::harmonic_sin(1), TrigPoly::harmonic_cos(1), kGrid);
    CHECK(std::abs(r.formula_value) <= 1e-9);
    CHECK(std::abs(r.fd_value) <= 1e-7);
  }
  SECTION("potential direction only") {
    const auto r = equilibrium_average_derivative(
        doubling, Potential(TrigPoly()), Potential(TrigPoly::harmonic_cos(1)),
        TrigPoly(), TrigPoly::harmonic_cos(1), kGrid);
    CHECK(r.formula_value > 0.0);  // variance-type term
    CHECK(r.discrepancy <= 1e-5);
  }
  SECTION("map direction only") {
    const auto r = equilibrium_average_derivative(
        doubling, Potential(TrigPoly()), Potential(TrigPoly::harmonic_cos(1)),
        TrigPoly::harmonic_sin(1), TrigPoly(), kGrid);
    CHECK(r.discrepancy <= 1e-4);
  }
}
