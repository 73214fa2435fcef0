#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "thermoform/circle_map.hpp"
#include "thermoform/trig_poly.hpp"

namespace thermoform {

// A potential (or observable direction) with an evaluable derivative.
// Covers trigonometric polynomials, the geometric potential -log f', and
// affine combinations of both, which is all the corpus needs.
class Potential {
 public:
  Potential()
      : Potential(TrigPoly()) {}
  Potential(const TrigPoly& p)  // NOLINT: implicit on purpose
      : val_([p](double x) { return p(x); }),
        der_([d = p.derivative()](double x) { return d(x); }),
        label_("trig") {}
  Potential(std::function<double(double)> value,
            std::function<double(double)> deriv, std::string label = "custom")
      : val_(std::move(value)), der_(std::move(deriv)), label_(std::move(label)) {}

  static Potential neg_log_deriv(const CircleMap& map) {
    auto d2g = map.perturbation().derivative().derivative();
    return Potential(
        [map](double x) { return -std::log(map.deriv(x)); },
        [map, d2g](double x) { return -d2g(x) / map.deriv(x); },
        "-log f'");
  }

  double operator()(double x) const { return val_(x); }
  double deriv(double x) const { return der_(x); }
  const std::string& label() const { return label_; }

  // Grid maximum of |phi'| on 4096 points; stands in for ||D phi||_0.
  double deriv_sup() const {
    double m = 0.0;
    for (int i = 0; i < 4096; ++i) {
      m = std::max(m, std::abs(der_(static_cast<double>(i) / 4096)));
    }
    return m;
  }

  friend Potential operator+(const Potential& a, const Potential& b) {
    return Potential(
        [va = a.val_, vb = b.val_](double x) { return va(x) + vb(x); },
        [da = a.der_, db = b.der_](double x) { return da(x) + db(x); },
        a.label_ + "+" + b.label_);
  }
  friend Potential operator*(double c, const Potential& p) {
    return Potential([c, v = p.val_](double x) { return c * v(x); },
                     [c, d = p.der_](double x) { return c * d(x); },
                     p.label_);
  }

 private:
  std::function<double(double)> val_, der_;
  std::string label_;
};

}  // namespace thermoform
