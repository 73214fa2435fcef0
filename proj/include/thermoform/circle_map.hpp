#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "thermoform/errors.hpp"
#include "thermoform/trig_poly.hpp"

namespace thermoform {

struct InverseBranch {
  double point;  // y with f(y) = x (mod 1)
  double deriv;  // f'(y)
};

// Degree-d expanding circle map f(x) = d x + g(x) mod 1, with g a
// trigonometric polynomial. Expansion f' > 1 is verified at construction on
// a 4096-point grid (with a second-derivative Lipschitz correction) together
// with the coefficient bound d - sum 2 pi k (|a_k| + |b_k|).
class CircleMap {
 public:
  explicit CircleMap(int degree, TrigPoly perturbation = TrigPoly())
      : degree_(degree), g_(std::move(perturbation)), dg_(g_.derivative()) {
    if (degree_ < 2) throw NotExpanding("degree must be >= 2");
    const int n_check = 4096;
    double grid_inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_check; ++i) {
      grid_inf = std::min(grid_inf, deriv(static_cast<double>(i) / n_check));
    }
    const double second_bound = dg_.deriv_sup_bound();
    const double grid_certified = grid_inf - 0.5 * second_bound / n_check;
    const double coeff_bound = degree_ - g_.deriv_sup_bound();
    sigma_ = std::max(grid_certified, coeff_bound);
    if (!(sigma_ > 1.0)) {
      throw NotExpanding("map is not uniformly expanding: inf f' <= 1");
    }
  }

  int degree() const { return degree_; }
  const TrigPoly& perturbation() const { return g_; }
  double sigma() const { return sigma_; }

  double operator()(double x) const { return mod1(degree_ * x + g_(x)); }
  double lift(double x) const { return degree_ * x + g_(x); }
  double deriv(double x) const { return degree_ + dg_(x); }

  double iterate(double x, int n) const {
    for (int i = 0; i < n; ++i) x = (*this)(x);
    return x;
  }

  // The d preimages of x, ordered by increasing branch point, each with the
  // map derivative there. Bisection brackets the monotone lift, Newton
  // finishes; a branch exceeding 60 iterations signals NewtonDivergence.
  std::vector<InverseBranch> inverse_branches(double x) const {
    x = mod1(x);
    std::vector<InverseBranch> out;
    out.reserve(static_cast<std::size_t>(degree_));
    const double f0 = lift(0.0);
    // Targets x + m with f0 <= x + m < f0 + d: exactly d integers m.
    const long m_start = static_cast<long>(std::ceil(f0 - x - 1e-13));
    for (long m = m_start; m < m_start + degree_; ++m) {
      const double target = x + static_cast<double>(m);
      out.push_back(solve_branch(target));
    }
    std::sort(out.begin(), out.end(),
              [](const InverseBranch& a, const InverseBranch& b) {
                return a.point < b.point;
              });
    return out;
  }

  // Birkhoff sum S_n psi(x) = sum_{j<n} psi(f^j x).
  template <typename Fn>
  double birkhoff_sum(const Fn& psi, double x, int n) const {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      s += psi(x);
      x = (*this)(x);
    }
    return s;
  }

 private:
  InverseBranch solve_branch(double target) const {
    if (g_.is_zero()) {  // linear map: closed-form branch
      const double y = target / degree_;
      return {mod1(y), static_cast<double>(degree_)};
    }
    double lo = 0.0, hi = 1.0;
    const double f0 = lift(0.0);
    double y = std::clamp((target - f0) / degree_, 0.0, 1.0);
    int iters = 0;
    // Bisect to width 1e-3 unless Newton from the linear seed already lands.
    auto residual = [&](double p) { return lift(p) - target; };
    double r = residual(y);
    while (std::abs(r) > 1e-12) {
      if (++iters > 60) {
        throw NewtonDivergence("inverse branch solve did not converge");
      }
      const double step = r / deriv(y);
      double next = y - step;
      if (r > 0.0) {
        hi = std::min(hi, y);
      } else {
        lo = std::max(lo, y);
      }
      if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
      y = next;
      r = residual(y);
    }
    return {mod1(y), deriv(y)};
  }

  int degree_;
  TrigPoly g_;
  TrigPoly dg_;
  double sigma_ = 0.0;
};

// Derivative of the j-th inverse branch of the family f_eps = f + eps H at
// eps = 0, as a function of the base point: implicit differentiation of
// f_eps(f_j^eps(x)) = x gives  t_j(x) = -H(f_j(x)) / f'(f_j(x)).
inline std::vector<double> branch_response(const CircleMap& map,
                                           const TrigPoly& H, double x) {
  const auto branches = map.inverse_branches(x);
  std::vector<double> out;
  out.reserve(branches.size());
  for (const auto& b : branches) out.push_back(-H(b.point) / b.deriv);
  return out;
}

// One-parameter family eps -> f with perturbation g + eps H. eps_max bounds
// the expanding range from the coefficient bound on H'.
class MapFamily {
 public:
  MapFamily(CircleMap base, TrigPoly direction)
      : base_(std::move(base)), direction_(std::move(direction)) {
    const double dh = direction_.deriv_sup_bound();
    eps_max_ = dh > 0.0 ? (base_.sigma() - 1.0) / dh
                        : std::numeric_limits<double>::infinity();
  }

  const CircleMap& base() const { return base_; }
  const TrigPoly& direction() const { return direction_; }
  double eps_max() const { return eps_max_; }

  CircleMap at(double eps) const {
    if (eps == 0.0) return base_;
    if (std::abs(eps) > eps_max_) {
      throw FamilyNotExpanding("|eps| exceeds the expanding range eps_max=" +
                               std::to_string(eps_max_));
    }
    return CircleMap(base_.degree(),
                     base_.perturbation() + eps * direction_);
  }

 private:
  CircleMap base_;
  TrigPoly direction_;
  double eps_max_;
};

}  // namespace thermoform
