#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "thermoform/errors.hpp"
#include "thermoform/sampler.hpp"
#include "thermoform/stats.hpp"
#include "thermoform/thermo.hpp"

namespace thermoform {

struct FreeEnergyCurve {
  std::vector<double> t_grid;
  std::vector<double> energy;        // E(t) = P(phi + t psi) - P(phi)
  std::vector<double> energy_prime;  // E'(t) = int psi dmu_{phi + t psi}
  double second_at_zero = 0.0;       // E''(0), 5-point stencil
};

// E(t) and E'(t) from fresh spectral solves at each t; also usable with a
// synthetic closed form for unit tests of the Legendre machinery.
struct FreeEnergyBackend {
  std::function<double(double)> energy;
  std::function<double(double)> energy_prime;
  double t_lo = -40.0;
  double t_hi = 40.0;
};

inline FreeEnergyBackend dynamical_backend(const CircleMap& map,
                                           const Potential& phi,
                                           const Potential& psi,
                                           const Grid& grid, double t_max = 40.0) {
  const double p0 = pressure(map, phi, grid);
  auto energy = [map, phi, psi, grid, p0](double t) {
    return pressure(map, phi + t * psi, grid) - p0;
  };
  auto energy_prime = [map, phi, psi, grid](double t) {
    const auto mu = equilibrium_measure(solve_triple(map, phi + t * psi, grid));
    return mu.integrate_fn(grid, [&](double x) { return psi(x); });
  };
  // Strong twists can close the discretized spectral gap (the equilibrium
  // state degenerates onto a minimizing orbit and the power iteration stops
  // converging). Back the endpoints off deterministically until the solve
  // succeeds; the truncated domain is reported through t_lo / t_hi.
  auto usable = [&](double t) {
    try {
      energy(t);
      return true;
    } catch (const NoConvergence&) {
      return false;
    }
  };
  double t_hi = t_max, t_lo = -t_max;
  for (int i = 0; i < 12 && !usable(t_hi); ++i) t_hi *= 0.5;
  for (int i = 0; i < 12 && !usable(t_lo); ++i) t_lo *= 0.5;
  return {energy, energy_prime, t_lo, t_hi};
}

inline FreeEnergyCurve free_energy(const CircleMap& map, const Potential& phi,
                                   const Potential& psi,
                                   const std::vector<double>& t_grid,
                                   const Grid& grid) {
  double t_span = 1.0;
  for (double t : t_grid) t_span = std::max(t_span, std::abs(t));
  const FreeEnergyBackend be = dynamical_backend(map, phi, psi, grid, t_span);
  FreeEnergyCurve curve;
  curve.t_grid = t_grid;
  curve.energy.reserve(t_grid.size());
  curve.energy_prime.reserve(t_grid.size());
  for (double t : t_grid) {
    curve.energy.push_back(be.energy(t));
    curve.energy_prime.push_back(be.energy_prime(t));
  }
  const double h = 1e-3;
  curve.second_at_zero =
      (-be.energy(2 * h) + 16 * be.energy(h) - 30 * be.energy(0.0) +
       16 * be.energy(-h) - be.energy(-2 * h)) /
      (12 * h * h);
  return curve;
}

struct RateFunction {
  std::vector<double> s_grid;
  std::vector<double> t_of_s;  // Newton solutions of E'(t) = s
  std::vector<double> rate;    // I(s) = s t(s) - E(t(s))
  double mean = 0.0;           // m = E'(0), the unique zero of I
};

namespace detail {

// Solve E'(t) = s on [t_lo, t_hi] by secant-Newton with a bisection
// fallback, to |E'(t) - s| <= 1e-12.
inline double invert_energy_prime(const FreeEnergyBackend& be, double s,
                                  double t_seed) {
  double lo = be.t_lo, hi = be.t_hi;
  double t0 = t_seed;
  double g0 = be.energy_prime(t0) - s;
  if (std::abs(g0) <= 1e-12) return t0;
  double t1 = t0 + (g0 > 0 ? -0.25 : 0.25);
  t1 = std::clamp(t1, lo, hi);
  double g1 = be.energy_prime(t1) - s;
  for (int iter = 0; iter < 80; ++iter) {
    if (std::abs(g1) <= 1e-12) return t1;
    if (g1 > 0) hi = std::min(hi, t1);
    else lo = std::max(lo, t1);
    double next;
    if (g1 != g0 && std::isfinite(g0)) {
      next = t1 - g1 * (t1 - t0) / (g1 - g0);
    } else {
      next = 0.5 * (lo + hi);
    }
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    t0 = t1;
    g0 = g1;
    t1 = next;
    g1 = be.energy_prime(t1) - s;
  }
  if (std::abs(g1) <= 1e-10) return t1;  // stalled at roundoff, still fine
  throw NoConvergence("Legendre inversion of E' did not converge");
}

}  // namespace detail

// Legendre transform of a strictly convex free energy through the
// variational identity I(E'(t)) = t E'(t) - E(t).
inline RateFunction legendre(const FreeEnergyBackend& be,
                             const FreeEnergyCurve& curve,
                             const std::vector<double>& s_grid) {
  // Strict convexity gate on the sampled curve.
  double min_second = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < curve.energy.size(); ++i) {
    min_second = std::min(min_second, curve.energy[i + 1] -
                                          2 * curve.energy[i] +
                                          curve.energy[i - 1]);
  }
  if (!(min_second > 1e-8)) {
    throw NotStrictlyConvex("free energy is not strictly convex on the grid");
  }
  const double s_min = be.energy_prime(be.t_lo);
  const double s_max = be.energy_prime(be.t_hi);

  RateFunction rf;
  rf.mean = be.energy_prime(0.0);
  rf.s_grid = s_grid;
  double t_seed = 0.0;
  for (double s : s_grid) {
    if (!(s > s_min) || !(s < s_max)) {
      throw SOutOfRange("s outside the open range of E'");
    }
    const double t = detail::invert_energy_prime(be, s, t_seed);
    t_seed = t;
    rf.t_of_s.push_back(t);
    rf.rate.push_back(s * t - be.energy(t));
  }
  return rf;
}

inline double rate_at(const FreeEnergyBackend& be, double s,
                      double t_seed = 0.0) {
  const double t = detail::invert_energy_prime(be, s, t_seed);
  return s * t - be.energy(t);
}

struct DeterministicLdpFit {
  std::vector<int> n_values;
  std::vector<double> a_n;     // (1/n) log int e^{t S_n psi} dmu
  std::vector<double> gap;     // a_n - E(t), fitted against C/n
  double c_fit = 0.0;
  double r_squared = 0.0;
  double residual_at_n_max = 0.0;
};

// Finite-n free energy a_n = (1/n) log int e^{t S_n psi} dmu computed
// exactly through the twisted-operator identity
//   int e^{t S_n psi} dmu = nu_phi(L_{phi+t psi}^n h_phi) / lambda_phi^n,
// then fitted as E(t) + C/n.
inline DeterministicLdpFit ldp_deterministic_check(const CircleMap& map,
                                                   const Potential& phi,
                                                   const Potential& psi,
                                                   double t, int n_max,
                                                   const Grid& grid,
                                                   int n_min = 1) {
  const TransferMatrix tm0 = assemble_transfer(map, phi, grid);
  const SpectralTriple base = dominant_triple(tm0);
  const TransferMatrix tm_t = assemble_transfer(map, phi + t * psi, grid);
  const double e_t = std::log(dominant_triple(tm_t).lambda) -
                     std::log(base.lambda);

  DeterministicLdpFit fit;
  Eigen::VectorXd v = base.h.values();
  double log_scale = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    v = tm_t.matrix() * v;
    const double norm = v.cwiseAbs().maxCoeff();
    v /= norm;
    log_scale += std::log(norm);
    if (n < n_min) continue;
    const double log_int = log_scale + std::log(base.nu.dot(v)) -
                           n * std::log(base.lambda);
    fit.n_values.push_back(n);
    fit.a_n.push_back(log_int / n);
    fit.gap.push_back(log_int / n - e_t);
  }

  // Least squares of gap_n against 1/n.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double cnt = static_cast<double>(fit.n_values.size());
  for (std::size_t i = 0; i < fit.n_values.size(); ++i) {
    const double x = 1.0 / fit.n_values[i];
    const double y = fit.gap[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  fit.c_fit = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  const double denom = (cnt * sxx - sx * sx) * (cnt * syy - sy * sy);
  fit.r_squared = denom > 0 ? (cnt * sxy - sx * sy) * (cnt * sxy - sx * sy) / denom
                            : 1.0;
  fit.residual_at_n_max = std::abs(fit.gap.back());
  return fit;
}

struct MonteCarloLdp {
  double empirical_rate = 0.0;
  double predicted_rate = 0.0;
  long hits = 0;
  long samples = 0;
  bool no_hits = false;
};

// Theorem-C style check: empirical decay rate of mu(S_n psi / n in [a,b])
// against -inf_{[a,b]} I. By convexity the infimum sits at the endpoint
// nearest the mean (or is 0 if the mean lies inside).
inline MonteCarloLdp ldp_monte_carlo(const CircleMap& map,
                                     const Potential& phi,
                                     const Potential& psi, double a, double b,
                                     int n, int samples, std::uint64_t seed,
                                     const Grid& grid) {
  const FreeEnergyBackend be = dynamical_backend(map, phi, psi, grid);
  const double mean = be.energy_prime(0.0);
  MonteCarloLdp out;
  out.samples = samples;
  if (mean >= a && mean <= b) {
    out.predicted_rate = 0.0;
  } else {
    const double s_edge = mean < a ? a : b;
    out.predicted_rate = -rate_at(be, s_edge);
  }

  const EquilibriumSampler sampler = EquilibriumSampler::make(map, phi, grid);
  const auto sums = sampler.birkhoff_samples(
      [&](double x) { return psi(x); }, n, samples, seed);
  for (double s : sums) {
    const double avg = s / n;
    if (avg >= a && avg <= b) ++out.hits;
  }
  if (out.hits == 0) {
    out.no_hits = true;
    out.empirical_rate = -std::numeric_limits<double>::infinity();
  } else {
    out.empirical_rate =
        std::log(static_cast<double>(out.hits) / samples) / n;
  }
  return out;
}

struct MultifractalSpectrum {
  std::vector<double> c_grid;    // only the admissible part c < c_max
  std::vector<double> pressure_of_level_set;
  double c_max = 0.0;
  double p_top = 0.0;
  double mean = 0.0;
};

// Pressure of the level set of points whose Birkhoff average deviates from
// the mean by at least c: P_top - min(I(m-c), I(m+c)), for c below the
// boundary of the admissible set.
inline MultifractalSpectrum multifractal_spectrum(
    const CircleMap& map, const Potential& phi, const Potential& psi,
    const std::vector<double>& c_grid, const Grid& grid, double t_max = 40.0) {
  const VarianceReport var = clt_variance(map, phi, psi, grid);
  if (var.is_coboundary) {
    throw CoboundaryObservable("observable is cohomologous to a constant");
  }
  const FreeEnergyBackend be = dynamical_backend(map, phi, psi, grid, t_max);
  MultifractalSpectrum spec;
  spec.p_top = pressure(map, phi, grid);
  spec.mean = be.energy_prime(0.0);
  const double s_min = be.energy_prime(be.t_lo);
  const double s_max = be.energy_prime(be.t_hi);
  spec.c_max = std::min(spec.mean - s_min, s_max - spec.mean);
  double t_lo_seed = 0.0, t_hi_seed = 0.0;
  for (double c : c_grid) {
    if (c < 0.0 || c >= spec.c_max) continue;
    double inf_rate;
    if (c == 0.0) {
      inf_rate = 0.0;
    } else {
      const double t_minus =
          detail::invert_energy_prime(be, spec.mean - c, t_lo_seed);
      const double t_plus =
          detail::invert_energy_prime(be, spec.mean + c, t_hi_seed);
      t_lo_seed = t_minus;
      t_hi_seed = t_plus;
      const double i_minus = (spec.mean - c) * t_minus - be.energy(t_minus);
      const double i_plus = (spec.mean + c) * t_plus - be.energy(t_plus);
      inf_rate = std::min(i_minus, i_plus);
    }
    spec.c_grid.push_back(c);
    spec.pressure_of_level_set.push_back(spec.p_top - inf_rate);
  }
  return spec;
}

}  // namespace thermoform
