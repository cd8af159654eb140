#pragma once

#include <vector>

#include "nmm/pml.hpp"
#include "nmm/types.hpp"

namespace nmm {

// Chebyshev-Gauss-Lobatto points mapped to [a, b], ascending, endpoints exact.
RVector cheb_points(int n, double a, double b);

// Dense first-derivative collocation matrix for distinct ascending nodes,
// built from barycentric weights with the negative-sum diagonal.
RMatrix diff_matrix(const RVector& points);

// Barycentric interpolation table for one set of nodes.
struct BarycentricTable {
  RVector x;
  RVector w;
};
BarycentricTable barycentric_table(const RVector& points);
double barycentric_eval(const BarycentricTable& t, const RVector& values, double xq);
Complex barycentric_eval(const BarycentricTable& t, const CVector& values, double xq);

// Interpolation weights as a row vector: barycentric_row(t, xq) * values
// equals barycentric_eval(t, values, xq). Exact unit row on a node hit.
RVector barycentric_row(const BarycentricTable& t, double xq);

// Piecewise Lobatto grid over [breakpoints.front(), breakpoints.back()].
// Subdomain ends are duplicated: the last point of one subdomain and the
// first point of the next carry the same coordinate but distinct indices,
// holding one-sided limits across material or absorber interfaces.
struct CollocationGrid {
  RVector breakpoints; // size S+1, strictly increasing
  IVector counts;      // size S, each >= 4
  IVector offsets;     // size S, start index of each subdomain
  RVector points;      // size P = sum(counts)

  int subdomains() const { return static_cast<int>(counts.size()); }
  Index size() const { return points.size(); }
  Index first_of(int s) const { return offsets(s); }
  Index last_of(int s) const { return offsets(s) + counts(s) - 1; }
  bool is_subdomain_end(Index i) const;
  // Subdomain containing y; intervals are half-open on the right except the last.
  int subdomain_of(double y) const;
  std::vector<Index> free_indices() const;        // interior points of every subdomain
  std::vector<Index> constrained_indices() const; // subdomain endpoints
};

CollocationGrid make_collocation_grid(const RVector& breakpoints, const IVector& counts);
CollocationGrid make_collocation_grid(const RVector& breakpoints, int points_per_subdomain);

enum class RowKind { Interior, Boundary, Continuity, Flux };

// Discretization of (1/a) d/dy ((1/a) d phi/dy) + k0^2 eps(y) phi with
// a(y) = 1 + i sigma(y). Interior rows hold the operator; duplicated
// interface points hold value continuity and (1/a) phi' flux continuity.
// The two outer boundary rows are left zero for the caller to fill.
struct SturmLiouvilleOp {
  CollocationGrid grid;
  CMatrix op;                 // P x P
  std::vector<RowKind> kind;  // per row
  CVector inv_alpha;          // one-sided 1/a at every grid point
  std::vector<RMatrix> diff;  // per-subdomain derivative matrices
};

SturmLiouvilleOp stretched_sturm_liouville(const CollocationGrid& grid,
                                           const StretchProfile& stretch,
                                           const RVector& eps, double k0);

// Derivative of grid samples, applied subdomain by subdomain.
CVector grid_derivative(const SturmLiouvilleOp& op, const CVector& values);

} // namespace nmm
