#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "thermoform/errors.hpp"
#include "thermoform/periodic_orbits.hpp"
#include "thermoform/sampler.hpp"
#include "thermoform/thermo.hpp"

namespace thermoform {

struct VarianceReport {
  double mean = 0.0;
  double sigma2_series = 0.0;
  double sigma2_resolvent = 0.0;
  int series_terms = 0;
  bool is_coboundary = false;  // sigma^2 <= 1e-8
};

// CLT variance of psi under the equilibrium state of (f, phi), by two
// routes:
//  - the correlation series  sigma^2 = int ps~^2 dmu + 2 sum_n nu(ps~ L~^n(ps~ h)),
//  - the resolvent form with w solving (I - L~) w = L~(ps~ h) on nu(w) = 0.
inline VarianceReport clt_variance(const CircleMap& map, const Potential& phi,
                                   const Potential& psi, const Grid& grid) {
  const TransferMatrix tm = assemble_transfer(map, phi, grid);
  const SpectralTriple triple = dominant_triple(tm);
  const EquilibriumMeasure mu = equilibrium_measure(triple);

  const int n = grid.size();
  Eigen::VectorXd psi_vals(n);
  for (int k = 0; k < n; ++k) psi_vals[k] = psi(grid.node(k));
  const double mean = mu.weights.dot(psi_vals);
  const Eigen::VectorXd centered = psi_vals.array() - mean;

  const Eigen::MatrixXd l_norm = tm.matrix() / triple.lambda;

  double sigma2 = centered.cwiseProduct(centered).dot(mu.weights);
  const double var0 = sigma2;
  Eigen::VectorXd v = centered.cwiseProduct(triple.h.values());
  int terms = 0;
  for (int i = 1; i <= 500; ++i) {
    v = l_norm * v;
    const double corr =
        triple.nu.dot(centered.cwiseProduct(v));
    sigma2 += 2.0 * corr;
    terms = i;
    if (i >= 10 && std::abs(corr) < 1e-14) break;
  }

  // Resolvent route. nu(ps~ h) = 0, so the Neumann series stays in the
  // nu-mean-zero subspace and converges at the gap ratio; a dense solve of
  // the rank-one-corrected system takes over when the gap is thin.
  Eigen::VectorXd rhs = l_norm * (centered.cwiseProduct(triple.h.values()));
  Eigen::VectorXd w;
  if (triple.gap_ratio <= 0.9) {
    w = rhs;
    Eigen::VectorXd term = rhs;
    for (int i = 0; i < 5000; ++i) {
      term = l_norm * term;
      w += term;
      if (term.cwiseAbs().maxCoeff() < 1e-16) break;
    }
  } else {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - l_norm +
                        triple.h.values() * triple.nu.transpose();
    w = a.partialPivLu().solve(rhs);
  }
  const double sigma2_res =
      var0 + 2.0 * triple.nu.dot(centered.cwiseProduct(w));

  VarianceReport rep;
  rep.mean = mean;
  rep.sigma2_series = sigma2;
  rep.sigma2_resolvent = sigma2_res;
  rep.series_terms = terms;
  rep.is_coboundary = sigma2 <= 1e-8;
  return rep;
}

struct LivsicReport {
  bool is_coboundary_candidate = false;
  double max_periodic_defect = 0.0;
};

// Periodic-orbit cohomology test: psi is cohomologous to the constant m iff
// the centered Birkhoff sums vanish on every periodic orbit.
inline LivsicReport livsic_check(const CircleMap& map, const Potential& psi,
                                 double mean, int n_max) {
  double defect = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const auto orbits = periodic_points(map, n);
    for (double p : orbits.points) {
      const double s = map.birkhoff_sum(psi, p, n);
      defect = std::max(defect, std::abs(s - n * mean) / n);
    }
  }
  return {defect <= 1e-8, defect};
}

// Kolmogorov-Smirnov distance of (S_n psi - n m)/sqrt(n) under mu from
// Normal(0, sigma^2).
inline double clt_empirical(const CircleMap& map, const Potential& phi,
                            const Potential& psi, const Grid& grid, int n,
                            int samples, std::uint64_t seed) {
  const VarianceReport var = clt_variance(map, phi, psi, grid);
  if (var.sigma2_series <= 1e-6) {
    throw DegenerateVariance("observable is (nearly) a coboundary");
  }
  const EquilibriumSampler sampler = EquilibriumSampler::make(map, phi, grid);
  std::vector<double> z =
      sampler.birkhoff_samples([&](double x) { return psi(x); }, n, samples,
                               seed);
  const double scale = std::sqrt(static_cast<double>(n));
  for (double& s : z) s = (s - n * var.mean) / scale;
  std::sort(z.begin(), z.end());
  const double sd = std::sqrt(var.sigma2_series);
  double ks = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-z[i] / (sd * std::numbers::sqrt2));
    const double lo = static_cast<double>(i) / z.size();
    const double hi = static_cast<double>(i + 1) / z.size();
    ks = std::max({ks, std::abs(cdf - lo), std::abs(cdf - hi)});
  }
  return ks;
}

}  // namespace thermoform
