#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "thermoform/circle_map.hpp"
#include "thermoform/errors.hpp"
#include "thermoform/grid.hpp"
#include "thermoform/periodic_orbits.hpp"
#include "thermoform/potential.hpp"
#include "thermoform/spectral.hpp"
#include "thermoform/transfer.hpp"

namespace thermoform {

// Equilibrium state mu = h nu on the grid, as a probability vector.
struct EquilibriumMeasure {
  SpectralTriple triple;
  Eigen::VectorXd weights;

  double integrate(const GridFunction& g) const {
    if (g.size() != weights.size()) throw DimensionMismatch("grid mismatch");
    return weights.dot(g.values());
  }
  template <typename Fn>
  double integrate_fn(const Grid& grid, const Fn& g) const {
    double s = 0.0;
    for (int k = 0; k < grid.size(); ++k) s += weights[k] * g(grid.node(k));
    return s;
  }
};

inline EquilibriumMeasure equilibrium_measure(SpectralTriple triple) {
  Eigen::VectorXd w = triple.nu.cwiseProduct(triple.h.values());
  w /= w.sum();
  return {std::move(triple), std::move(w)};
}

inline SpectralTriple solve_triple(const CircleMap& map, const Potential& phi,
                                   const Grid& grid) {
  return dominant_triple(assemble_transfer(map, phi, grid));
}

inline double pressure(const CircleMap& map, const Potential& phi,
                       const Grid& grid) {
  return solve_triple(map, phi, grid).pressure;
}

inline double integrate(const EquilibriumMeasure& mu, const GridFunction& g) {
  return mu.integrate(g);
}

// Metric entropy of the equilibrium state via the variational principle:
// h = P - int phi dmu (an equality at the equilibrium state).
inline double entropy(const CircleMap& map, const Potential& phi,
                      const Grid& grid) {
  const auto triple = solve_triple(map, phi, grid);
  const auto mu = equilibrium_measure(triple);
  return triple.pressure -
         mu.integrate_fn(grid, [&](double x) { return phi(x); });
}

// int log f' dmu_{f,phi}. On the circle this is also log |det Df| and
// log ||Df^{-1}||^{-1} integrated.
inline double lyapunov_exponent(const CircleMap& map, const Potential& phi,
                                const Grid& grid) {
  const auto mu = equilibrium_measure(solve_triple(map, phi, grid));
  return mu.integrate_fn(grid,
                         [&](double x) { return std::log(map.deriv(x)); });
}

// Independent pressure oracle: (1/n) log sum over f^n p = p of e^{S_n phi(p)}.
inline double periodic_orbit_pressure(const CircleMap& map,
                                      const Potential& phi, int n) {
  const auto orbits = periodic_points(map, n);
  // log-sum-exp over the orbit Birkhoff sums.
  double max_s = -1e300;
  std::vector<double> sums;
  sums.reserve(orbits.points.size());
  for (double p : orbits.points) {
    const double s = map.birkhoff_sum(phi, p, n);
    sums.push_back(s);
    max_s = std::max(max_s, s);
  }
  double acc = 0.0;
  for (double s : sums) acc += std::exp(s - max_s);
  return (max_s + std::log(acc)) / n;
}

}  // namespace thermoform
