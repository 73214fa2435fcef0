#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "thermoform/errors.hpp"
#include "thermoform/trig_poly.hpp"

namespace thermoform {

// Equispaced periodic grid x_k = k/N, N even.
class Grid {
 public:
  explicit Grid(int n_nodes) : n_(n_nodes) {
    if (n_ < 8 || n_ % 2 != 0) throw Error("grid size must be even and >= 8");
  }
  int size() const { return n_; }
  double node(int k) const { return static_cast<double>(k) / n_; }
  bool operator==(const Grid& o) const { return n_ == o.n_; }

 private:
  int n_;
};

// Periodic cardinal function for even N with the Nyquist mode split
// symmetrically (cosine convention):
//   w(t) = sin(N pi t) / (N tan(pi t)),  w(0) = 1.
inline double trig_cardinal(int n, double t) {
  t = t - std::round(t);
  const double s = std::sin(std::numbers::pi * t);
  if (std::abs(s) < 1e-14) return 1.0;
  return std::sin(n * std::numbers::pi * t) /
         (n * std::tan(std::numbers::pi * t));
}

class GridFunction {
 public:
  GridFunction(Grid grid, Eigen::VectorXd values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw DimensionMismatch("value count does not match grid");
    }
  }

  template <typename Fn>
  static GridFunction sample(Grid grid, const Fn& f) {
    Eigen::VectorXd v(grid.size());
    for (int k = 0; k < grid.size(); ++k) v[k] = f(grid.node(k));
    return GridFunction(grid, std::move(v));
  }
  static GridFunction constant(Grid grid, double c) {
    return GridFunction(grid, Eigen::VectorXd::Constant(grid.size(), c));
  }

  const Grid& grid() const { return grid_; }
  int size() const { return grid_.size(); }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator[](int k) const { return values_[k]; }

  // Balanced trigonometric interpolant through the node values; exact for
  // modes below N/2 and for the Nyquist cosine.
  double interpolate(double x) const {
    const int n = grid_.size();
    // p(x) = sin(N pi x) / N * sum_l (-1)^l v_l / tan(pi (x - l/N))
    // with a guard when x sits on a node.
    double acc = 0.0;
    for (int l = 0; l < n; ++l) {
      const double t = x - grid_.node(l);
      const double tr = t - std::round(t);
      if (std::abs(std::sin(std::numbers::pi * tr)) < 1e-14) {
        return values_[l];
      }
      const double sign = (l % 2 == 0) ? 1.0 : -1.0;
      acc += sign * values_[l] / std::tan(std::numbers::pi * tr);
    }
    return std::sin(n * std::numbers::pi * x) * acc / n;
  }

  // Collapse the grid values to an explicit trigonometric polynomial,
  // dropping coefficients below `drop`; used where many off-grid
  // evaluations make the O(N) barycentric form too slow.
  TrigPoly to_trig_poly(double drop = 1e-14) const {
    const int n = grid_.size();
    const int half = n / 2;
    std::vector<double> a(static_cast<std::size_t>(half), 0.0);
    std::vector<double> b(static_cast<std::size_t>(half), 0.0);
    double c0 = 0.0;
    for (int k = 0; k < n; ++k) c0 += values_[k];
    c0 /= n;
    for (int m = 1; m <= half; ++m) {
      double am = 0.0, bm = 0.0;
      for (int k = 0; k < n; ++k) {
        const double th = kTwoPi * m * grid_.node(k);
        am += values_[k] * std::cos(th);
        bm += values_[k] * std::sin(th);
      }
      const double scale = (m == half) ? 1.0 / n : 2.0 / n;
      a[static_cast<std::size_t>(m) - 1] = scale * am;
      b[static_cast<std::size_t>(m) - 1] = (m == half) ? 0.0 : scale * bm;
    }
    int keep = 0;
    for (int m = 0; m < half; ++m) {
      if (std::abs(a[static_cast<std::size_t>(m)]) > drop ||
          std::abs(b[static_cast<std::size_t>(m)]) > drop) {
        keep = m + 1;
      }
    }
    a.resize(static_cast<std::size_t>(keep));
    b.resize(static_cast<std::size_t>(keep));
    return TrigPoly(c0, std::move(a), std::move(b));
  }

 private:
  Grid grid_;
  Eigen::VectorXd values_;
};

// Spectral differentiation matrix for the balanced interpolant:
// D_kj = pi (-1)^{k-j} cot(pi (k-j)/N), zero diagonal.
inline const Eigen::MatrixXd& diff_matrix(const Grid& grid) {
  static thread_local int cached_n = -1;
  static thread_local Eigen::MatrixXd cached;
  const int n = grid.size();
  if (cached_n != n) {
    cached.resize(n, n);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        if (k == j) {
          cached(k, j) = 0.0;
        } else {
          const int diff = k - j;
          const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
          cached(k, j) = sign * std::numbers::pi /
                         std::tan(std::numbers::pi * diff / n);
        }
      }
    }
    cached_n = n;
  }
  return cached;
}

inline GridFunction trig_differentiate(const GridFunction& gf) {
  return GridFunction(gf.grid(), diff_matrix(gf.grid()) * gf.values());
}

inline double trig_interpolate(const GridFunction& gf, double x) {
  return gf.interpolate(x);
}

}  // namespace thermoform
