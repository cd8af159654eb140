#pragma once

#include "nmm/chebdiff.hpp"
#include "nmm/types.hpp"

#include <vector>

namespace nmm {

// Termination of the transverse operator at an outer grid end. The Robin
// coefficient is complex so the bottom condition stays usable beyond the
// critical angle, where beta_minus turns imaginary.
struct BoundaryCondition {
  enum class Kind { Dirichlet, Robin };
  Kind kind = Kind::Dirichlet;
  Complex robin_coef{0.0, 0.0};

  static BoundaryCondition dirichlet() { return {}; }
  static BoundaryCondition robin(Complex coef) { return {Kind::Robin, coef}; }
};

struct BoundarySpec {
  BoundaryCondition bottom, top;
};

struct EigenMode {
  Complex delta;
  Complex sqrt_delta;  // branch with Im >= 0, Re >= 0 on the real tie
  CVector phi;         // grid values, scaled so the largest entry is exactly 1
};

struct ModeBasis {
  CollocationGrid grid;
  BoundarySpec bc;
  std::vector<EigenMode> modes;           // descending Re(delta)
  std::vector<BarycentricTable> interp;   // per-subdomain node tables
};

// Writes the two outer boundary rows of the operator in place.
// Dirichlet: phi = 0. Robin: (1/a) phi' - i c phi = 0 on top,
// (1/a) phi' + i c phi = 0 on the bottom; c = 0 degenerates to Neumann.
void apply_boundary_rows(SturmLiouvilleOp& op, const BoundarySpec& bc);

// The num_modes eigenpairs with largest Re(delta) of the transverse
// operator under bc. Subdomain-end values are eliminated through the
// boundary/continuity/flux rows, so the dense solve runs on the interior
// points only and the constraint rows hold to solver roundoff.
ModeBasis solve_modes(const SturmLiouvilleOp& op, const BoundarySpec& bc, int num_modes);

// Mode values interpolated at arbitrary transverse positions inside the
// grid span: out(q, j) = phi_j(ys(q)). A position on an interface reads
// the upper subdomain; the modes are continuous there anyway.
CMatrix mode_values(const ModeBasis& basis, const RVector& ys);
Complex mode_value(const ModeBasis& basis, Index mode, double y);

// Modes violating the expected Im(delta) >= 0 half-plane beyond the
// discretization allowance. Diagnostic only; the solver proceeds.
int negative_im_count(const ModeBasis& basis);

} // namespace nmm
