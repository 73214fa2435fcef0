#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace thermoform {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reduce to [0,1). Values within 1e-15 of 1 collapse to 0 so that branch
// ordering stays deterministic at the seam.
inline double mod1(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0 - 1e-15) r = 0.0;
  return r;
}

// Real trigonometric polynomial on the unit circle:
//   p(x) = c + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x),  k = 1..K.
class TrigPoly {
 public:
  TrigPoly() = default;
  explicit TrigPoly(double constant) : constant_(constant) {}
  TrigPoly(double constant, std::vector<double> cos_coeffs,
           std::vector<double> sin_coeffs)
      : constant_(constant),
        cos_(std::move(cos_coeffs)),
        sin_(std::move(sin_coeffs)) {
    if (cos_.size() < sin_.size()) cos_.resize(sin_.size(), 0.0);
    if (sin_.size() < cos_.size()) sin_.resize(cos_.size(), 0.0);
  }

  static TrigPoly harmonic_cos(int k, double amp = 1.0) {
    std::vector<double> a(static_cast<std::size_t>(k), 0.0), b(a);
    a[static_cast<std::size_t>(k) - 1] = amp;
    return TrigPoly(0.0, std::move(a), std::move(b));
  }
  static TrigPoly harmonic_sin(int k, double amp = 1.0) {
    std::vector<double> a(static_cast<std::size_t>(k), 0.0), b(a);
    b[static_cast<std::size_t>(k) - 1] = amp;
    return TrigPoly(0.0, std::move(a), std::move(b));
  }

  double constant() const { return constant_; }
  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }
  int bandwidth() const { return static_cast<int>(cos_.size()); }
  bool is_zero() const {
    if (constant_ != 0.0) return false;
    for (double a : cos_)
      if (a != 0.0) return false;
    for (double b : sin_)
      if (b != 0.0) return false;
    return true;
  }

  double operator()(double x) const {
    double s = constant_;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
      const double th = kTwoPi * static_cast<double>(k + 1) * x;
      s += cos_[k] * std::cos(th) + sin_[k] * std::sin(th);
    }
    return s;
  }

  long double eval_long(long double x) const {
    long double s = constant_;
    constexpr long double two_pi_l = 2.0L * std::numbers::pi_v<long double>;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
      const long double th = two_pi_l * static_cast<long double>(k + 1) * x;
      s += static_cast<long double>(cos_[k]) * cosl(th) +
           static_cast<long double>(sin_[k]) * sinl(th);
    }
    return s;
  }

  // d/dx: a_k cos + b_k sin  ->  2 pi k (b_k cos - a_k sin).
  TrigPoly derivative() const {
    std::vector<double> a(cos_.size()), b(sin_.size());
    for (std::size_t k = 0; k < cos_.size(); ++k) {
      const double w = kTwoPi * static_cast<double>(k + 1);
      a[k] = w * sin_[k];
      b[k] = -w * cos_[k];
    }
    return TrigPoly(0.0, std::move(a), std::move(b));
  }

  // |c| + sum (|a_k| + |b_k|), an upper bound for the sup norm.
  double sup_bound() const {
    double s = std::abs(constant_);
    for (std::size_t k = 0; k < cos_.size(); ++k)
      s += std::abs(cos_[k]) + std::abs(sin_[k]);
    return s;
  }

  // sum 2 pi k (|a_k| + |b_k|), an upper bound for sup |p'|.
  double deriv_sup_bound() const {
    double s = 0.0;
    for (std::size_t k = 0; k < cos_.size(); ++k)
      s += kTwoPi * static_cast<double>(k + 1) *
           (std::abs(cos_[k]) + std::abs(sin_[k]));
    return s;
  }

  TrigPoly& operator+=(const TrigPoly& o) {
    constant_ += o.constant_;
    if (cos_.size() < o.cos_.size()) {
      cos_.resize(o.cos_.size(), 0.0);
      sin_.resize(o.sin_.size(), 0.0);
    }
    for (std::size_t k = 0; k < o.cos_.size(); ++k) {
      cos_[k] += o.cos_[k];
      sin_[k] += o.sin_[k];
    }
    return *this;
  }
  TrigPoly& operator*=(double a) {
    constant_ *= a;
    for (auto& c : cos_) c *= a;
    for (auto& s : sin_) s *= a;
    return *this;
  }
  friend TrigPoly operator+(TrigPoly lhs, const TrigPoly& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend TrigPoly operator*(double a, TrigPoly p) {
    p *= a;
    return p;
  }
  friend TrigPoly operator-(TrigPoly p) {
    p *= -1.0;
    return p;
  }
  friend TrigPoly operator-(TrigPoly lhs, const TrigPoly& rhs) {
    lhs += (-1.0) * rhs;
    return lhs;
  }

 private:
  double constant_ = 0.0;
  std::vector<double> cos_, sin_;
};

}  // namespace thermoform
