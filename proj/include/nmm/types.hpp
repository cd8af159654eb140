#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdio>
#include <string>

namespace nmm {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using IVector = Eigen::VectorXi;
using Eigen::Index;

inline constexpr Complex iu{0.0, 1.0};

// sqrt on the branch with Im >= 0, taking Re >= 0 on the real-negative tie.
// Propagation factors e^{i sqrt(d) x} built on this branch never grow.
inline Complex principal_sqrt(Complex z) {
  Complex s = std::sqrt(z);
  if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() < 0.0)) s = -s;
  return s;
}

// Decimal form with enough digits to reparse to the identical double.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace nmm
