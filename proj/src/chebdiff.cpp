#include "nmm/chebdiff.hpp"

#include <cmath>
#include <stdexcept>

namespace nmm {

RVector cheb_points(int n, double a, double b) {
  if (n < 2) throw std::invalid_argument("chebdiff: need at least two points");
  if (!(a < b)) throw std::invalid_argument("chebdiff: empty interval");
  RVector x(n);
  // Mirror pairs so the grid is exactly symmetric about the midpoint.
  for (int k = 0; 2 * k <= n - 1; ++k) {
    double t = 0.5 * (1.0 - std::cos(M_PI * k / (n - 1)));
    x(k) = a + (b - a) * t;
    x(n - 1 - k) = b - (b - a) * t;
  }
  x(0) = a;
  x(n - 1) = b;
  return x;
}

static RVector barycentric_weights(const RVector& x) {
  const Index n = x.size();
  if (n < 2) throw std::invalid_argument("chebdiff: need at least two points");
  if (n > 600) throw std::invalid_argument("chebdiff: too many points for product weights");
  const double a = x(0), b = x(n - 1);
  // Work on [-1, 1] so the products stay within double range.
  RVector xs = (2.0 * x.array() - (a + b)) / (b - a);
  RVector w(n);
  for (Index i = 0; i < n; ++i) {
    double p = 1.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      p *= xs(i) - xs(j);
      if (p == 0.0) throw std::invalid_argument("chebdiff: repeated node");
    }
    w(i) = 1.0 / p;
  }
  w /= w.cwiseAbs().maxCoeff();
  return w;
}

RMatrix diff_matrix(const RVector& points) {
  const Index n = points.size();
  const double a = points(0), b = points(n - 1);
  RVector xs = (2.0 * points.array() - (a + b)) / (b - a);
  RVector w = barycentric_weights(points);
  RMatrix D(n, n);
  for (Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      D(i, j) = (w(j) / w(i)) / (xs(i) - xs(j));
      diag -= D(i, j);
    }
    D(i, i) = diag;
  }
  return D * (2.0 / (b - a));
}

BarycentricTable barycentric_table(const RVector& points) {
  return BarycentricTable{points, barycentric_weights(points)};
}

template <typename Vec>
static typename Vec::Scalar bary_eval_impl(const BarycentricTable& t, const Vec& v, double xq) {
  using Scalar = typename Vec::Scalar;
  const Index n = t.x.size();
  Scalar num = Scalar(0);
  double den = 0.0;
  for (Index i = 0; i < n; ++i) {
    double dx = xq - t.x(i);
    if (dx == 0.0) return v(i);
    double c = t.w(i) / dx;
    num += c * v(i);
    den += c;
  }
  return num / den;
}

double barycentric_eval(const BarycentricTable& t, const RVector& values, double xq) {
  return bary_eval_impl(t, values, xq);
}
Complex barycentric_eval(const BarycentricTable& t, const CVector& values, double xq) {
  return bary_eval_impl(t, values, xq);
}

RVector barycentric_row(const BarycentricTable& t, double xq) {
  const Index n = t.x.size();
  RVector row(n);
  for (Index i = 0; i < n; ++i) {
    double dx = xq - t.x(i);
    if (dx == 0.0) {
      row.setZero();
      row(i) = 1.0;
      return row;
    }
    row(i) = t.w(i) / dx;
  }
  return row / row.sum();
}

bool CollocationGrid::is_subdomain_end(Index i) const {
  for (int s = 0; s < subdomains(); ++s)
    if (i == first_of(s) || i == last_of(s)) return true;
  return false;
}

int CollocationGrid::subdomain_of(double y) const {
  const int S = subdomains();
  if (y < breakpoints(0) || y > breakpoints(S))
    throw std::invalid_argument("chebdiff: point outside grid");
  for (int s = 0; s < S - 1; ++s)
    if (y < breakpoints(s + 1)) return s;
  return S - 1;
}

std::vector<Index> CollocationGrid::free_indices() const {
  std::vector<Index> idx;
  idx.reserve(size());
  for (int s = 0; s < subdomains(); ++s)
    for (Index i = first_of(s) + 1; i < last_of(s); ++i) idx.push_back(i);
  return idx;
}

std::vector<Index> CollocationGrid::constrained_indices() const {
  std::vector<Index> idx;
  for (int s = 0; s < subdomains(); ++s) {
    idx.push_back(first_of(s));
    idx.push_back(last_of(s));
  }
  return idx;
}

CollocationGrid make_collocation_grid(const RVector& breakpoints, const IVector& counts) {
  const int S = static_cast<int>(counts.size());
  if (S < 1 || breakpoints.size() != S + 1)
    throw std::invalid_argument("chebdiff: breakpoint/count mismatch");
  for (int s = 0; s < S; ++s) {
    if (!(breakpoints(s) < breakpoints(s + 1)))
      throw std::invalid_argument("chebdiff: breakpoints not strictly increasing");
    if (counts(s) < 4) throw std::invalid_argument("chebdiff: fewer than four points in a subdomain");
  }
  CollocationGrid g;
  g.breakpoints = breakpoints;
  g.counts = counts;
  g.offsets = IVector(S);
  Index total = 0;
  for (int s = 0; s < S; ++s) {
    g.offsets(s) = static_cast<int>(total);
    total += counts(s);
  }
  g.points = RVector(total);
  for (int s = 0; s < S; ++s)
    g.points.segment(g.offsets(s), counts(s)) =
        cheb_points(counts(s), breakpoints(s), breakpoints(s + 1));
  return g;
}

CollocationGrid make_collocation_grid(const RVector& breakpoints, int points_per_subdomain) {
  IVector counts = IVector::Constant(breakpoints.size() - 1, points_per_subdomain);
  return make_collocation_grid(breakpoints, counts);
}

SturmLiouvilleOp stretched_sturm_liouville(const CollocationGrid& grid,
                                           const StretchProfile& stretch,
                                           const RVector& eps, double k0) {
  const Index P = grid.size();
  if (eps.size() != P) throw std::invalid_argument("chebdiff: eps sample count mismatch");
  SturmLiouvilleOp sl;
  sl.grid = grid;
  sl.op = CMatrix::Zero(P, P);
  sl.kind.assign(P, RowKind::Interior);
  sl.inv_alpha = CVector(P);
  sl.diff.resize(grid.subdomains());

  for (int s = 0; s < grid.subdomains(); ++s) {
    const Index o = grid.first_of(s);
    const int n = grid.counts(s);
    const double hint = 0.5 * (grid.breakpoints(s) + grid.breakpoints(s + 1));
    RVector pts = grid.points.segment(o, n);
    sl.diff[s] = diff_matrix(pts);
    CVector ia(n);
    for (int i = 0; i < n; ++i) ia(i) = 1.0 / stretch.alpha_at(pts(i), hint);
    sl.inv_alpha.segment(o, n) = ia;
    CMatrix Dc = sl.diff[s].cast<Complex>();
    CMatrix block = ia.asDiagonal() * (Dc * (ia.asDiagonal() * Dc));
    block.diagonal() += (k0 * k0 * eps.segment(o, n)).cast<Complex>();
    sl.op.block(o, o, n, n) = block;
  }

  // Duplicated interface points: value continuity and one-sided flux balance.
  for (int s = 0; s + 1 < grid.subdomains(); ++s) {
    const Index iL = grid.last_of(s);
    const Index iR = grid.first_of(s + 1);
    sl.op.row(iL).setZero();
    sl.op(iL, iL) = 1.0;
    sl.op(iL, iR) = -1.0;
    sl.kind[iL] = RowKind::Continuity;

    sl.op.row(iR).setZero();
    const Index oL = grid.first_of(s);
    const int nL = grid.counts(s);
    const Index oR = grid.first_of(s + 1);
    const int nR = grid.counts(s + 1);
    sl.op.block(iR, oL, 1, nL) =
        sl.inv_alpha(iL) * sl.diff[s].row(nL - 1).cast<Complex>();
    sl.op.block(iR, oR, 1, nR) -=
        sl.inv_alpha(iR) * sl.diff[s + 1].row(0).cast<Complex>();
    sl.kind[iR] = RowKind::Flux;
  }

  const Index bot = 0, top = P - 1;
  sl.op.row(bot).setZero();
  sl.op.row(top).setZero();
  sl.kind[bot] = RowKind::Boundary;
  sl.kind[top] = RowKind::Boundary;
  return sl;
}

CVector grid_derivative(const SturmLiouvilleOp& op, const CVector& values) {
  const CollocationGrid& g = op.grid;
  CVector out(g.size());
  for (int s = 0; s < g.subdomains(); ++s) {
    const Index o = g.first_of(s);
    const int n = g.counts(s);
    out.segment(o, n) = op.diff[s].cast<Complex>() * values.segment(o, n);
  }
  return out;
}

} // namespace nmm
