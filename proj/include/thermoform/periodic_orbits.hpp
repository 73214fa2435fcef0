#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "thermoform/circle_map.hpp"
#include "thermoform/errors.hpp"

namespace thermoform {

struct PeriodicOrbitSet {
  int period = 0;
  std::vector<double> points;     // fixed points of f^n in [0,1), increasing
  std::vector<double> residuals;  // |f^n(p) - p mod 1|
};

namespace detail {

// n-fold lift iteration with per-step mod-1 reduction; the integer part is
// carried exactly so that F^n(p) - p stays fully accurate even when d^n is
// large. Extended precision keeps the amplified rounding error below 1e-13
// at d^n ~ 1e6.
struct LiftIterate {
  long double reduced;   // f^n(p) in [0,1)
  std::int64_t carried;  // F^n(p) - f^n(p), an exact integer
  long double deriv;     // (f^n)'(p)
};

inline LiftIterate lift_pow(const CircleMap& map, long double p, int n) {
  const long double d = static_cast<long double>(map.degree());
  const TrigPoly& g = map.perturbation();
  const TrigPoly dg = g.derivative();
  long double y = p;
  long double deriv = 1.0L;
  std::int64_t carried = 0;
  for (int i = 0; i < n; ++i) {
    deriv *= d + dg.eval_long(y);
    long double z = d * y + g.eval_long(y);
    const long double fl = floorl(z);
    // Reduction F(y - k) = F(y) - d k propagates earlier carries by d.
    carried = carried * map.degree() + static_cast<std::int64_t>(fl);
    y = z - fl;
    if (y >= 1.0L) {
      y -= 1.0L;
      ++carried;
    }
  }
  return {y, carried, deriv};
}

}  // namespace detail

// All d^n - 1 fixed points of f^n, one per integer level m of the strictly
// increasing lift G(p) = F^n(p) - p.
inline PeriodicOrbitSet periodic_points(const CircleMap& map, int n) {
  if (n < 1) throw Error("period must be >= 1");
  double count_d = std::pow(static_cast<double>(map.degree()), n);
  if (count_d > 1e6) throw TooManyPoints("d^n exceeds 10^6");
  const std::int64_t total = static_cast<std::int64_t>(std::llround(count_d)) - 1;

  auto G = [&](long double p) {
    const auto it = detail::lift_pow(map, p, n);
    return std::pair<long double, long double>(
        it.reduced + static_cast<long double>(it.carried) - p, it.deriv - 1.0L);
  };

  const long double g0 = G(0.0L).first;
  const std::int64_t m_start =
      static_cast<std::int64_t>(ceill(g0 - 1e-11L));

  PeriodicOrbitSet out;
  out.period = n;
  out.points.reserve(static_cast<std::size_t>(total));
  out.residuals.reserve(static_cast<std::size_t>(total));

  long double lo_edge = 0.0L;
  for (std::int64_t m = m_start; m < m_start + total; ++m) {
    const long double target = static_cast<long double>(m);
    long double lo = lo_edge, hi = 1.0L;
    // Bisection to width 1e-3, then Newton on the lift.
    if (G(lo).first > target + 1e-12L) lo = 0.0L;  // paranoia at the seam
    while (hi - lo > 1e-3L) {
      const long double mid = 0.5L * (lo + hi);
      if (G(mid).first < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    long double p = 0.5L * (lo + hi);
    int iters = 0;
    for (;;) {
      const auto [val, der] = G(p);
      const long double r = val - target;
      if (fabsl(r) <= 1e-13L) break;
      if (++iters > 60) throw NewtonDivergence("periodic point Newton stalled");
      if (r > 0.0L) {
        hi = p;
      } else {
        lo = p;
      }
      long double next = p - r / der;
      if (!(next >= lo && next <= hi)) next = 0.5L * (lo + hi);
      p = next;
    }
    const long double res = fabsl(G(p).first - target);
    out.points.push_back(static_cast<double>(p));
    out.residuals.push_back(static_cast<double>(res));
    lo_edge = p;
  }
  std::sort(out.points.begin(), out.points.end());
  return out;
}

}  // namespace thermoform
