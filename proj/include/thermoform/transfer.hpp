#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include "thermoform/circle_map.hpp"
#include "thermoform/errors.hpp"
#include "thermoform/grid.hpp"
#include "thermoform/potential.hpp"

namespace thermoform {

// Fourier-collocation discretization of the transfer operator
//   (L g)(x) = sum_j e^{phi(f_j(x))} g(f_j(x)),
// row k expressing the functional through the cardinal interpolation basis
// at the inverse branches of node x_k.
class TransferMatrix {
 public:
  TransferMatrix(Grid grid, Eigen::MatrixXd entries, std::string map_id = {},
                 std::string potential_id = {})
      : grid_(grid),
        entries_(std::move(entries)),
        map_id_(std::move(map_id)),
        potential_id_(std::move(potential_id)) {}

  const Grid& grid() const { return grid_; }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  const std::string& map_id() const { return map_id_; }
  const std::string& potential_id() const { return potential_id_; }

  GridFunction apply(const GridFunction& gf) const {
    if (!(gf.grid() == grid_)) {
      throw DimensionMismatch("grid function does not match operator grid");
    }
    return GridFunction(grid_, entries_ * gf.values());
  }

 private:
  Grid grid_;
  Eigen::MatrixXd entries_;
  std::string map_id_, potential_id_;
};

inline TransferMatrix assemble_transfer(const CircleMap& map,
                                        const Potential& phi,
                                        const Grid& grid,
                                        std::string map_id = {},
                                        std::string potential_id = {}) {
  const int n = grid.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const auto branches = map.inverse_branches(grid.node(k));
    for (const auto& br : branches) {
      const double w = std::exp(phi(br.point));
      for (int l = 0; l < n; ++l) {
        m(k, l) += w * trig_cardinal(n, br.point - grid.node(l));
      }
    }
  }
  return TransferMatrix(grid, std::move(m), std::move(map_id),
                        std::move(potential_id));
}

inline GridFunction apply_transfer(const TransferMatrix& tm,
                                   const GridFunction& gf) {
  return tm.apply(gf);
}

}  // namespace thermoform
