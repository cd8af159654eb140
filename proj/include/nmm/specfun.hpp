#pragma once

#include "nmm/types.hpp"

namespace nmm {

// Outgoing Hankel function H^(1)_order for order 0 or 1 at complex argument.
// Ascending series below |z| = hankel_switch_radius(), large-argument
// expansion beyond; both branches hold for -pi < arg z < pi.
Complex hankel1(int order, Complex z);

double hankel_switch_radius();

// sqrt(dx^2 + dy^2) on the branch with nonnegative imaginary part
// (nonnegative real part as the tie-break), continuous under outward
// coordinate stretching. Reduces to the Euclidean distance for real input.
Complex complex_distance(Complex dx, Complex dy);
Complex complex_distance(Complex x_tilde, Complex y_tilde, double xs, double ys);

namespace detail {

// Individual branches of hankel1, exported so tests can probe the switchover.
Complex hankel1_series(int order, Complex z);
Complex hankel1_asymptotic(int order, Complex z);

} // namespace detail

} // namespace nmm
