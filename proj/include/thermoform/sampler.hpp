#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "thermoform/circle_map.hpp"
#include "thermoform/grid.hpp"
#include "thermoform/potential.hpp"
#include "thermoform/rng.hpp"
#include "thermoform/thermo.hpp"

namespace thermoform {

// Exact sampler for the equilibrium state: the backward Markov chain that
// picks inverse branch j with probability e^{phi(f_j x)} h(f_j x) / (lambda
// h(x)). The probabilities sum to 1 by the eigen-equation, and the chain's
// stationary law is mu. Because each step of the chain is one step of a
// forward orbit read in reverse, Birkhoff sums under mu are accumulated
// along the chain itself; this sidesteps the loss of precision of long
// forward orbits in floating point.
class EquilibriumSampler {
 public:
  EquilibriumSampler(CircleMap map, Potential phi, SpectralTriple triple)
      : map_(std::move(map)),
        phi_(std::move(phi)),
        lambda_(triple.lambda),
        h_(triple.h.to_trig_poly()) {}

  static EquilibriumSampler make(const CircleMap& map, const Potential& phi,
                                 const Grid& grid) {
    return EquilibriumSampler(map, phi, solve_triple(map, phi, grid));
  }

  double h(double x) const { return h_(x); }
  double lambda() const { return lambda_; }

  std::vector<double> branch_probabilities(double x) const {
    const auto branches = map_.inverse_branches(x);
    const double hx = h_(x);
    std::vector<double> p;
    p.reserve(branches.size());
    for (const auto& br : branches) {
      p.push_back(std::exp(phi_(br.point)) * h_(br.point) / (lambda_ * hx));
    }
    return p;
  }

  // One backward step; returns the chosen preimage.
  double step(double x, SplitRng& rng) const {
    const auto branches = map_.inverse_branches(x);
    const double hx = h_(x);
    double u = rng.next_double();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < branches.size(); ++j) {
      acc += std::exp(phi_(branches[j].point)) * h_(branches[j].point) /
             (lambda_ * hx);
      if (u < acc) return branches[j].point;
    }
    return branches.back().point;
  }

  // `count` draws from mu: burn-in 1e3 steps, then every 10th state.
  std::vector<double> sample(int count, std::uint64_t seed) const {
    SplitRng rng(seed);
    double x = burn_in(rng);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      for (int t = 0; t < kThin; ++t) x = step(x, rng);
      out.push_back(x);
    }
    return out;
  }

  // `count` draws of the Birkhoff sum S_n psi under mu. Each draw advances
  // the stationary chain by kThin decorrelation steps and then accumulates
  // psi over n further steps (a stationary window of the reversed orbit).
  template <typename Fn>
  std::vector<double> birkhoff_samples(const Fn& psi, int n, int count,
                                       std::uint64_t seed) const {
    SplitRng rng(seed);
    double x = burn_in(rng);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      for (int t = 0; t < kThin; ++t) x = step(x, rng);
      double s = psi(x);
      for (int t = 1; t < n; ++t) {
        x = step(x, rng);
        s += psi(x);
      }
      out.push_back(s);
    }
    return out;
  }

 private:
  static constexpr int kBurnIn = 1000;
  static constexpr int kThin = 10;

  double burn_in(SplitRng& rng) const {
    double x = 0.5;
    for (int i = 0; i < kBurnIn; ++i) x = step(x, rng);
    return x;
  }

  CircleMap map_;
  Potential phi_;
  double lambda_;
  TrigPoly h_;
};

inline std::vector<double> sample_equilibrium(const CircleMap& map,
                                              const Potential& phi,
                                              const Grid& grid, int count,
                                              std::uint64_t seed) {
  return EquilibriumSampler::make(map, phi, grid).sample(count, seed);
}

}  // namespace thermoform
