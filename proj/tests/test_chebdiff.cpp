#include <cmath>

#include "doctest.h"
#include "nmm/chebdiff.hpp"

using namespace nmm;

TEST_SUITE("chebdiff") {

TEST_CASE("lobatto points are ascending, symmetric, with exact endpoints") {
  RVector x = cheb_points(9, -1.5, 2.5);
  CHECK(x.size() == 9);
  CHECK(x(0) == -1.5);
  CHECK(x(8) == 2.5);
  for (int i = 1; i < 9; ++i) CHECK(x(i) > x(i - 1));
  for (int i = 0; i < 9; ++i) CHECK(x(i) + x(8 - i) == doctest::Approx(1.0).epsilon(1e-15));
  // interior values against cos(pi k / (n-1))
  CHECK(x(4) == doctest::Approx(0.5));
  RVector u = cheb_points(5, -1.0, 1.0);
  CHECK(u(1) == doctest::Approx(-std::sqrt(0.5)));
  CHECK(u(3) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("two-point derivative matrix") {
  RVector x(2);
  x << -1.0, 1.0;
  RMatrix D = diff_matrix(x);
  CHECK(D(0, 0) == doctest::Approx(-0.5));
  CHECK(D(0, 1) == doctest::Approx(0.5));
  CHECK(D(1, 0) == doctest::Approx(-0.5));
  CHECK(D(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("derivative matrix is exact on polynomials of full degree") {
  const int n = 12;
  RVector x = cheb_points(n, 0.3, 2.1);
  RMatrix D = diff_matrix(x);
  // p(t) = t^(n-1) - 3 t^2 + t
  RVector p(n), dp(n);
  for (int i = 0; i < n; ++i) {
    p(i) = std::pow(x(i), n - 1) - 3.0 * x(i) * x(i) + x(i);
    dp(i) = (n - 1) * std::pow(x(i), n - 2) - 6.0 * x(i) + 1.0;
  }
  RVector err = D * p - dp;
  CHECK(err.cwiseAbs().maxCoeff() <= 1e-9 * dp.cwiseAbs().maxCoeff());
}

TEST_CASE("row sums vanish") {
  RVector x = cheb_points(40, -2.0, 5.0);
  RMatrix D = diff_matrix(x);
  RVector ones = RVector::Ones(40);
  CHECK((D * ones).cwiseAbs().maxCoeff() <= 1e-12 * D.cwiseAbs().maxCoeff());
}

TEST_CASE("spectral accuracy on a smooth function") {
  RVector x = cheb_points(32, 0.0, 2.0);
  RMatrix D = diff_matrix(x);
  RVector f(32), df(32);
  for (int i = 0; i < 32; ++i) {
    f(i) = std::sin(3.0 * x(i));
    df(i) = 3.0 * std::cos(3.0 * x(i));
  }
  CHECK((D * f - df).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("barycentric interpolation reproduces nodes and smooth values") {
  RVector x = cheb_points(24, -1.0, 1.0);
  BarycentricTable t = barycentric_table(x);
  RVector f(24);
  for (int i = 0; i < 24; ++i) f(i) = std::exp(x(i));
  CHECK(barycentric_eval(t, f, x(7)) == f(7));
  CHECK(barycentric_eval(t, f, 0.123456) == doctest::Approx(std::exp(0.123456)).epsilon(1e-12));
}

TEST_CASE("grid duplicates internal breakpoints") {
  RVector b(3);
  b << -1.0, 0.0, 2.0;
  IVector c(2);
  c << 8, 12;
  CollocationGrid g = make_collocation_grid(b, c);
  CHECK(g.size() == 20);
  CHECK(g.points(7) == 0.0);
  CHECK(g.points(8) == 0.0);
  CHECK(g.free_indices().size() == 16);
  CHECK(g.constrained_indices().size() == 4);
  CHECK(g.subdomain_of(-0.5) == 0);
  CHECK(g.subdomain_of(0.0) == 1); // half-open on the right
  CHECK(g.subdomain_of(2.0) == 1);
  CHECK_THROWS(g.subdomain_of(2.5));
}

TEST_CASE("grid validation") {
  RVector b(3);
  b << 0.0, 0.0, 1.0;
  CHECK_THROWS(make_collocation_grid(b, 8));
  RVector b2(2);
  b2 << 0.0, 1.0;
  CHECK_THROWS(make_collocation_grid(b2, 3));
}

TEST_CASE("unstretched operator rows reduce to D^2 + k0^2 eps") {
  RVector b(2);
  b << -1.0, 1.0;
  CollocationGrid g = make_collocation_grid(b, 10);
  StretchProfile sp(1.6, 0.2, 0.0, 0); // sigma = 0
  RVector eps = RVector::Constant(10, 2.25);
  const double k0 = 3.0;
  SturmLiouvilleOp sl = stretched_sturm_liouville(g, sp, eps, k0);
  RMatrix D = diff_matrix(g.points);
  RMatrix ref = D * D;
  ref.diagonal().array() += k0 * k0 * 2.25;
  for (Index i = 1; i + 1 < g.size(); ++i)
    for (Index j = 0; j < g.size(); ++j)
      CHECK(std::abs(sl.op(i, j) - ref(i, j)) <= 1e-9 * ref.cwiseAbs().maxCoeff());
  CHECK(sl.op.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sl.op.row(9).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("interface rows encode continuity and one-sided flux") {
  RVector b(3);
  b << -2.0, 2.0, 3.0; // split exactly at the absorber onset
  CollocationGrid g = make_collocation_grid(b, 8);
  StretchProfile sp(4.0, 1.0, 3.0, 0);
  RVector eps = RVector::Ones(g.size());
  SturmLiouvilleOp sl = stretched_sturm_liouville(g, sp, eps, 1.0);
  CHECK(sl.kind[7] == RowKind::Continuity);
  CHECK(sl.kind[8] == RowKind::Flux);
  CHECK(sl.op(7, 7) == Complex(1.0, 0.0));
  CHECK(sl.op(7, 8) == Complex(-1.0, 0.0));
  // linear-in-t samples, continuous value, with (1/a) u' matched across the
  // onset: u = a t on the physical side, u = a^2 t + 2 a (1 - a) beyond it
  Complex a = sp.alpha_at(2.0, 2.5);
  CHECK(a == Complex(1.0, 3.0));
  CVector vals(g.size());
  for (Index i = 0; i < 8; ++i) vals(i) = a * g.points(i);
  for (Index i = 8; i < 16; ++i) vals(i) = a * a * g.points(i) + 2.0 * a * (1.0 - a);
  CHECK(std::abs((sl.op.row(8) * vals)(0, 0)) <= 1e-10 * sl.op.row(8).cwiseAbs().maxCoeff());
}

} // TEST_SUITE
