#pragma once

#include <cmath>
#include <stdexcept>

#include "nmm/types.hpp"

namespace nmm {

// Complex coordinate stretch for one axis. The physical interval is
// (-L/2, L/2); the absorbing layers occupy L/2 < |t| < L/2 + d with
// absorption profile sigma * ((|t| - L/2) / d)^m.
struct StretchProfile {
  double L = 0.0;
  double d = 0.0;
  double sigma = 0.0;
  int m = 0;

  StretchProfile() = default;
  StretchProfile(double L_, double d_, double sigma_, int m_)
      : L(L_), d(d_), sigma(sigma_), m(m_) {
    if (L <= 0.0 || d <= 0.0) throw std::invalid_argument("pml: nonpositive extent");
    if (sigma < 0.0) throw std::invalid_argument("pml: negative sigma");
    if (m < 0) throw std::invalid_argument("pml: negative grading exponent");
  }

  double outer() const { return 0.5 * L + d; }

  // Absorption at t, taking the limit from the side of `hint`. With m = 0 the
  // profile jumps at |t| = L/2, so the layer onset needs a one-sided value.
  double sigma_at(double t, double hint) const {
    if (std::abs(hint) <= 0.5 * L) return 0.0;
    double u = (std::abs(t) - 0.5 * L) / d;
    if (u < 0.0) u = 0.0;
    return sigma * std::pow(u, m); // pow(0,0) == 1 keeps the m = 0 onset value
  }
  double sigma_at(double t) const { return sigma_at(t, t); }

  Complex alpha_at(double t, double hint) const { return Complex(1.0, sigma_at(t, hint)); }
  Complex alpha_at(double t) const { return alpha_at(t, t); }

  // Antiderivative of sigma from 0 to t, signed like t.
  double absorb_to(double t) const {
    double u = (std::abs(t) - 0.5 * L) / d;
    if (u <= 0.0) return 0.0;
    double s = sigma * d / (m + 1) * std::pow(u, m + 1);
    return t >= 0.0 ? s : -s;
  }

  // Total one-sided absorption integral across the layer.
  double absorb_total() const { return sigma * d / (m + 1); }

  // Stretched coordinate t + i * integral of sigma.
  Complex stretch(double t) const { return Complex(t, absorb_to(t)); }
};

} // namespace nmm
