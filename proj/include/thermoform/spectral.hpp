#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "thermoform/errors.hpp"
#include "thermoform/grid.hpp"
#include "thermoform/rng.hpp"
#include "thermoform/transfer.hpp"
#include "thermoform/trig_poly.hpp"

namespace thermoform {

// Dominant eigendata of a transfer matrix. Normalization follows the
// equilibrium-state convention: nu(1) = 1 first, then nu(h) = 1, so that
// mu = h nu is a probability.
struct SpectralTriple {
  double lambda = 0.0;
  double pressure = 0.0;
  GridFunction h;
  Eigen::VectorXd nu;
  double gap_ratio = 0.0;

  double nu_integral(const GridFunction& g) const { return nu.dot(g.values()); }
};

namespace detail {

inline double power_iterate(const Eigen::MatrixXd& m, Eigen::VectorXd& v) {
  double lambda = 0.0;
  double prev_diff = 1.0;
  for (int iter = 0; iter < 100000; ++iter) {
    Eigen::VectorXd w = m * v;
    lambda = w.dot(v) / v.dot(v);
    const double norm = w.cwiseAbs().maxCoeff();
    w /= norm * (w[0] < 0 ? -1.0 : 1.0);
    const double diff = (w - v).cwiseAbs().maxCoeff();
    v = std::move(w);
    if (diff <= 1e-14) return lambda;
    // Floating noise floor: accept a stalled but tiny difference.
    if (iter > 5000 && diff <= 1e-13 && diff >= prev_diff) return lambda;
    prev_diff = diff;
  }
  throw NoConvergence("power iteration exceeded 10^5 steps");
}

}  // namespace detail

inline SpectralTriple dominant_triple(const TransferMatrix& tm) {
  const Eigen::MatrixXd& m = tm.matrix();
  const int n = static_cast<int>(m.rows());

  Eigen::VectorXd h = Eigen::VectorXd::Ones(n);
  const double lambda_r = detail::power_iterate(m, h);
  Eigen::VectorXd nu = Eigen::VectorXd::Ones(n);
  detail::power_iterate(Eigen::MatrixXd(m.transpose()), nu);

  // Rayleigh quotient with both eigenvectors is the most accurate lambda.
  const double lambda = nu.dot(m * h) / nu.dot(h);
  (void)lambda_r;

  if (nu.sum() < 0) nu = -nu;
  nu /= nu.sum();
  if (h.sum() < 0) h = -h;
  h /= nu.dot(h);

  // Subdominant modulus from 40 iterations on the deflated operator
  // M - lambda h nu^T (nu h = 1 makes h nu^T the spectral projector).
  SplitRng rng(0x5eedULL);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = rng.next_symmetric();
  w -= h * nu.dot(w);
  double log_growth = 0.0;
  int counted = 0;
  for (int iter = 0; iter < 40; ++iter) {
    Eigen::VectorXd z = m * w - (lambda * nu.dot(w)) * h;
    z -= h * nu.dot(z);  // re-project, keeps rounding from reintroducing h
    const double norm = z.norm();
    if (norm < 1e-290) {
      w.setZero();
      break;
    }
    if (iter >= 30) {
      log_growth += std::log(norm / w.norm());
      ++counted;
    }
    w = z / norm * w.norm();
  }
  double sub = 0.0;
  if (counted > 0) sub = std::exp(log_growth / counted);

  SpectralTriple out{lambda, std::log(lambda), GridFunction(tm.grid(), h), nu,
                     std::min(sub / lambda, 1.0)};
  return out;
}

// Hilbert projective metric of the positive cone, on grid values:
// Theta(f,g) = log( max_k(f_k/g_k) * max_k(g_k/f_k) ).
inline double hilbert_metric_positive(const GridFunction& f,
                                      const GridFunction& g) {
  if (f.size() != g.size()) throw DimensionMismatch("grid mismatch");
  double fg = 0.0, gf = 0.0;
  for (int k = 0; k < f.size(); ++k) {
    if (!(f[k] > 0.0) || !(g[k] > 0.0)) {
      throw NotPositive("Hilbert metric needs strictly positive functions");
    }
    fg = std::max(fg, f[k] / g[k]);
    gf = std::max(gf, g[k] / f[k]);
  }
  return std::log(fg * gf);
}

// (e^Theta - 1) ||f||_inf, an upper bound on ||f - g||_inf for functions
// with equal integrals, together with the actual sup distance.
struct UniformBound {
  double bound;
  double actual;
};

inline UniformBound projective_to_uniform_bound(const GridFunction& f,
                                                const GridFunction& g) {
  const double theta = hilbert_metric_positive(f, g);
  const double sup_f = f.values().cwiseAbs().maxCoeff();
  const double actual = (f.values() - g.values()).cwiseAbs().maxCoeff();
  return {(std::exp(theta) - 1.0) * sup_f, actual};
}

// Membership in the C^1 cone: phi > 0 and sup |D phi / phi| <= kappa.
inline bool cone_membership_c1(const GridFunction& gf, double kappa) {
  for (int k = 0; k < gf.size(); ++k) {
    if (!(gf[k] > 0.0)) throw NotPositive("cone element must be positive");
  }
  const GridFunction d = trig_differentiate(gf);
  double worst = 0.0;
  for (int k = 0; k < gf.size(); ++k) {
    worst = std::max(worst, std::abs(d[k] / gf[k]));
  }
  return worst <= kappa;
}

inline double log_deriv_sup(const GridFunction& gf) {
  const GridFunction d = trig_differentiate(gf);
  double worst = 0.0;
  for (int k = 0; k < gf.size(); ++k) {
    worst = std::max(worst, std::abs(d[k] / gf[k]));
  }
  return worst;
}

struct ConeParams {
  double kappa0 = 0.0;
  double rho = 0.0;
  double diameter_bound = 0.0;  // empirical image diameter
  double tau = 0.0;             // 1 - e^{-diameter}
};

struct ConeReport {
  ConeParams params;
  double worst_ratio = 0.0;  // sup |D(Lg)/(Lg)| / kappa over all samples
  int violations = 0;        // image log-derivative above rho * kappa
  int samples = 0;
};

// Random element of the C^1 cone interior: exp(q) for a random trig
// polynomial q with bandwidth <= 8 scaled so sup |q'| <= kappa.
inline GridFunction random_cone_element(const Grid& grid, double kappa,
                                        SplitRng& rng) {
  const int bw = 1 + static_cast<int>(rng.next_u64() % 8);
  std::vector<double> a(static_cast<std::size_t>(bw)), b(a);
  for (int k = 0; k < bw; ++k) {
    a[static_cast<std::size_t>(k)] = rng.next_symmetric();
    b[static_cast<std::size_t>(k)] = rng.next_symmetric();
  }
  TrigPoly q(0.0, std::move(a), std::move(b));
  const double bound = q.deriv_sup_bound();
  if (bound > 0.0) q *= kappa * rng.next_double() / bound;
  return GridFunction::sample(grid, [&](double x) { return std::exp(q(x)); });
}

// Empirical check of the cone invariance L(Lambda_kappa) in Lambda_{rho kappa}
// for kappa in {k0, 2 k0, 4 k0}, with k0 = 2 ||D phi|| / (sigma - 1) from the
// C^1 invariance proof (falling back to 1 when phi is constant) and
// rho = (1 + 1/sigma) / 2.
inline ConeReport cone_invariance_check(const CircleMap& map,
                                        const Potential& phi, const Grid& grid,
                                        int samples,
                                        std::uint64_t seed = 2024) {
  const double sigma = map.sigma();
  const double kappa0 = 2.0 * phi.deriv_sup() / (sigma - 1.0);
  const double rho = 0.5 * (1.0 + 1.0 / sigma);
  const double kappa_base = kappa0 > 0.0 ? kappa0 : 1.0;

  const TransferMatrix tm = assemble_transfer(map, phi, grid);
  ConeReport rep;
  rep.params.kappa0 = kappa0;
  rep.params.rho = rho;

  SplitRng rng(seed);
  double diameter = 0.0;
  GridFunction prev_image = GridFunction::constant(grid, 1.0);
  bool have_prev = false;
  for (int mult : {1, 2, 4}) {
    const double kappa = kappa_base * mult;
    for (int s = 0; s < samples; ++s) {
      const GridFunction g = random_cone_element(grid, kappa, rng);
      const GridFunction lg = tm.apply(g);
      const double image_sup = log_deriv_sup(lg);
      rep.worst_ratio = std::max(rep.worst_ratio, image_sup / kappa);
      if (image_sup > rho * kappa * (1.0 + 1e-10)) ++rep.violations;
      ++rep.samples;
      if (have_prev) {
        diameter = std::max(diameter, hilbert_metric_positive(lg, prev_image));
      }
      prev_image = lg;
      have_prev = true;
    }
  }
  rep.params.diameter_bound = diameter;
  rep.params.tau = 1.0 - std::exp(-diameter);
  return rep;
}

struct ContractionTrial {
  double theta_before;
  double theta_after;
  double ratio;
};

// Median Birkhoff contraction factor Theta(Lf, Lg) / Theta(f, g) over random
// positive pairs; a pair with Theta(f,g) = 0 contributes ratio 0 by
// convention.
inline double contraction_factor_estimate(const TransferMatrix& tm, int trials,
                                          std::uint64_t seed = 7,
                                          std::vector<ContractionTrial>* log = nullptr) {
  SplitRng rng(seed);
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const GridFunction f = random_cone_element(tm.grid(), 3.0, rng);
    const GridFunction g = random_cone_element(tm.grid(), 3.0, rng);
    const double before = hilbert_metric_positive(f, g);
    const double after = hilbert_metric_positive(tm.apply(f), tm.apply(g));
    const double ratio = before > 0.0 ? after / before : 0.0;
    ratios.push_back(ratio);
    if (log) log->push_back({before, after, ratio});
  }
  std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2,
                   ratios.end());
  return ratios[ratios.size() / 2];
}

struct DecayFit {
  std::vector<double> sup_errors;  // ||L~^n 1 - nu(1) h||_inf, n = 1..
  double rate = 0.0;               // fitted e^{slope}
  double r_squared = 0.0;
  int fitted_points = 0;
};

// Sup-norm decay of normalized iterates toward the eigenfunction; the
// log-linear fit skips values at the floating noise floor.
inline DecayFit iterate_decay(const TransferMatrix& tm,
                              const SpectralTriple& triple, int n_max = 30) {
  DecayFit fit;
  GridFunction v = GridFunction::constant(tm.grid(), 1.0);
  const Eigen::VectorXd& target = triple.h.values();
  for (int n = 1; n <= n_max; ++n) {
    v = tm.apply(v);
    v.values() /= triple.lambda;
    fit.sup_errors.push_back((v.values() - target).cwiseAbs().maxCoeff());
  }
  std::vector<double> xs, ys;
  const double floor =
      std::max(1e-14, 1e-12 * target.cwiseAbs().maxCoeff());
  for (int n = 1; n <= n_max; ++n) {
    const double e = fit.sup_errors[static_cast<std::size_t>(n) - 1];
    if (e > floor) {
      xs.push_back(n);
      ys.push_back(std::log(e));
    }
  }
  fit.fitted_points = static_cast<int>(xs.size());
  if (xs.size() >= 3) {
    const double n_pts = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
      syy += ys[i] * ys[i];
    }
    const double slope = (n_pts * sxy - sx * sy) / (n_pts * sxx - sx * sx);
    fit.rate = std::exp(slope);
    const double corr = (n_pts * sxy - sx * sy) /
                        std::sqrt((n_pts * sxx - sx * sx) * (n_pts * syy - sy * sy));
    fit.r_squared = corr * corr;
  } else {
    // Immediate convergence (e.g. the linear map): nothing to fit.
    fit.rate = 0.0;
    fit.r_squared = 1.0;
  }
  return fit;
}

}  // namespace thermoform
