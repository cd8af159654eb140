#include "nmm/modes.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace nmm {

namespace {

void write_robin_row(SturmLiouvilleOp& op, Index row, int subdomain, Complex coef,
                     double sign) {
  const CollocationGrid& g = op.grid;
  const Index o = g.first_of(subdomain);
  const Index n = g.counts(subdomain);
  op.op.row(row).setZero();
  const RMatrix& d = op.diff[subdomain];
  const Index local = row - o;
  op.op.row(row).segment(o, n) = op.inv_alpha(row) * d.row(local).cast<Complex>();
  op.op(row, row) += sign * iu * coef;
}

} // namespace

void apply_boundary_rows(SturmLiouvilleOp& op, const BoundarySpec& bc) {
  const Index last = op.grid.size() - 1;
  if (bc.bottom.kind == BoundaryCondition::Kind::Dirichlet) {
    op.op.row(0).setZero();
    op.op(0, 0) = 1.0;
  } else {
    write_robin_row(op, 0, 0, bc.bottom.robin_coef, +1.0);
  }
  if (bc.top.kind == BoundaryCondition::Kind::Dirichlet) {
    op.op.row(last).setZero();
    op.op(last, last) = 1.0;
  } else {
    write_robin_row(op, last, op.grid.subdomains() - 1, bc.top.robin_coef, -1.0);
  }
}

ModeBasis solve_modes(const SturmLiouvilleOp& op_in, const BoundarySpec& bc,
                      int num_modes) {
  SturmLiouvilleOp op = op_in;
  apply_boundary_rows(op, bc);

  const std::vector<Index> free = op.grid.free_indices();
  const std::vector<Index> held = op.grid.constrained_indices();
  const Index nf = (Index)free.size();
  const Index nc = (Index)held.size();
  if (num_modes < 1 || num_modes > nf)
    throw std::invalid_argument("modes: requested " + std::to_string(num_modes) +
                                " modes but the grid has " + std::to_string(nf) +
                                " interior points");

  CMatrix lcc(nc, nc), lcf(nc, nf), lfc(nf, nc), lff(nf, nf);
  for (Index r = 0; r < nc; ++r) {
    for (Index c = 0; c < nc; ++c) lcc(r, c) = op.op(held[r], held[c]);
    for (Index c = 0; c < nf; ++c) lcf(r, c) = op.op(held[r], free[c]);
  }
  for (Index r = 0; r < nf; ++r) {
    for (Index c = 0; c < nc; ++c) lfc(r, c) = op.op(free[r], held[c]);
    for (Index c = 0; c < nf; ++c) lff(r, c) = op.op(free[r], free[c]);
  }

  // constraint rows eliminate the subdomain-end values: phi_held = E phi_free
  const CMatrix E = -lcc.partialPivLu().solve(lcf);
  const CMatrix reduced = lff + lfc * E;

  Eigen::ComplexEigenSolver<CMatrix> solver(reduced, true);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("modes: eigensolver did not converge");

  std::vector<Index> order(nf);
  std::iota(order.begin(), order.end(), Index(0));
  const auto& values = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (values(a).real() != values(b).real()) return values(a).real() > values(b).real();
    if (values(a).imag() != values(b).imag()) return values(a).imag() > values(b).imag();
    return a < b;
  });

  ModeBasis basis;
  basis.grid = op.grid;
  basis.bc = bc;
  basis.modes.reserve(num_modes);
  const Index total = op.grid.size();
  for (int k = 0; k < num_modes; ++k) {
    const Index which = order[k];
    CVector free_part = solver.eigenvectors().col(which);
    CVector held_part = E * free_part;
    CVector phi(total);
    for (Index j = 0; j < nf; ++j) phi(free[j]) = free_part(j);
    for (Index j = 0; j < nc; ++j) phi(held[j]) = held_part(j);
    Index peak = 0;
    phi.cwiseAbs().maxCoeff(&peak);
    phi /= phi(peak);  // deterministic phase: the peak entry becomes exactly 1
    EigenMode mode;
    mode.delta = values(which);
    mode.sqrt_delta = principal_sqrt(mode.delta);
    mode.phi = std::move(phi);
    basis.modes.push_back(std::move(mode));
  }
  basis.interp.reserve(op.grid.subdomains());
  for (int s = 0; s < op.grid.subdomains(); ++s)
    basis.interp.push_back(barycentric_table(
        op.grid.points.segment(op.grid.first_of(s), op.grid.counts(s))));
  return basis;
}

CMatrix mode_values(const ModeBasis& basis, const RVector& ys) {
  const CollocationGrid& g = basis.grid;
  const Index n_modes = (Index)basis.modes.size();
  CMatrix phi(g.size(), n_modes);
  for (Index j = 0; j < n_modes; ++j) phi.col(j) = basis.modes[j].phi;
  CMatrix out(ys.size(), n_modes);
  for (Index q = 0; q < ys.size(); ++q) {
    const int s = g.subdomain_of(ys(q));
    const RVector row = barycentric_row(basis.interp[s], ys(q));
    out.row(q) =
        row.cast<Complex>().transpose() * phi.middleRows(g.first_of(s), g.counts(s));
  }
  return out;
}

Complex mode_value(const ModeBasis& basis, Index mode, double y) {
  const CollocationGrid& g = basis.grid;
  const int s = g.subdomain_of(y);
  return barycentric_eval(basis.interp[s],
                          CVector(basis.modes[mode].phi.segment(g.first_of(s), g.counts(s))),
                          y);
}

int negative_im_count(const ModeBasis& basis) {
  int count = 0;
  for (const EigenMode& mode : basis.modes)
    if (mode.delta.imag() < -1e-6 * (1.0 + std::abs(mode.delta))) ++count;
  return count;
}

} // namespace nmm
