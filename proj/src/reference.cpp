#include "nmm/reference.hpp"

#include "nmm/specfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nmm {
namespace {

constexpr double kRadPerDeg = M_PI / 180.0;

double sampled_max(const StratifiedProfile& profile, double a, double b) {
  const RVector ys = cheb_points(33, a, b);
  double mx = profile.eval(ys(0));
  for (Index i = 1; i < ys.size(); ++i) mx = std::max(mx, profile.eval(ys(i)));
  return mx;
}

int wave_count(double k0, double eps_max, double width) {
  const double n = std::sqrt(std::max(eps_max, 1.0));
  const int c = static_cast<int>(std::ceil(0.7 * k0 * n * width)) + 18;
  return std::clamp(c, 18, 220);
}

double inf_norm(const CMatrix& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

// Core discretization shared by the plane and line-source solvers: interior
// rows hold d^2/dy^2, duplicated interior jumps hold value and derivative
// continuity, the two outer rows are filled per solve. The k0^2 eps part of
// the diagonal lives in `eps` because the spectral shift varies per solve.
struct CoreBvp {
  CollocationGrid grid;
  RMatrix d2;
  std::vector<RowKind> kind;
  RVector eps;
  RVector row_bot, row_top;  // one-sided derivative rows at the core faces
};

CoreBvp make_core_bvp(const StratifiedProfile& profile, double k0) {
  const auto& jumps = profile.jumps;
  const RVector breaks =
      Eigen::Map<const RVector>(jumps.data(), static_cast<Index>(jumps.size()));
  IVector counts(breaks.size() - 1);
  for (Index d = 0; d + 1 < breaks.size(); ++d)
    counts(d) = wave_count(k0, sampled_max(profile, breaks(d), breaks(d + 1)),
                           breaks(d + 1) - breaks(d));

  CoreBvp bvp;
  bvp.grid = make_collocation_grid(breaks, counts);
  const Index p = bvp.grid.size();
  bvp.d2 = RMatrix::Zero(p, p);
  bvp.kind.assign(p, RowKind::Interior);
  bvp.eps.resize(p);
  for (Index i = 0; i < p; ++i) bvp.eps(i) = profile.eval(bvp.grid.points(i));

  std::vector<RMatrix> diff(bvp.grid.subdomains());
  for (int d = 0; d < bvp.grid.subdomains(); ++d) {
    const Index o = bvp.grid.first_of(d);
    const Index n = bvp.grid.counts(d);
    diff[d] = diff_matrix(bvp.grid.points.segment(o, n));
    const RMatrix d2 = diff[d] * diff[d];
    for (Index i = 1; i + 1 < n; ++i) bvp.d2.row(o + i).segment(o, n) = d2.row(i);
  }

  const int last = bvp.grid.subdomains() - 1;
  bvp.row_bot = RVector::Zero(p);
  bvp.row_bot.segment(0, bvp.grid.counts(0)) = diff[0].row(0);
  bvp.row_top = RVector::Zero(p);
  bvp.row_top.segment(bvp.grid.first_of(last), bvp.grid.counts(last)) =
      diff[last].row(bvp.grid.counts(last) - 1);
  bvp.kind[0] = RowKind::Boundary;
  bvp.kind[p - 1] = RowKind::Boundary;

  for (int d = 0; d + 1 < bvp.grid.subdomains(); ++d) {
    const Index il = bvp.grid.last_of(d);
    const Index ir = bvp.grid.first_of(d + 1);
    bvp.d2(il, il) = 1.0;
    bvp.d2(il, ir) = -1.0;
    bvp.kind[il] = RowKind::Continuity;
    bvp.d2.row(ir).segment(bvp.grid.first_of(d), bvp.grid.counts(d)) =
        diff[d].row(bvp.grid.counts(d) - 1);
    bvp.d2.row(ir).segment(ir, bvp.grid.counts(d + 1)) -= diff[d + 1].row(0);
    bvp.kind[ir] = RowKind::Flux;
  }
  return bvp;
}

// f'' + (k0^2 eps + shift) f = 0 on the core, f'(y_bot) + i coef_bot f = rhs_bot,
// f'(y_top) - i coef_top f = rhs_top.
CVector solve_core(const CoreBvp& bvp, double k0, Complex shift, Complex coef_bot,
                   Complex coef_top, Complex rhs_bot, Complex rhs_top) {
  const Index p = bvp.grid.size();
  CMatrix a = bvp.d2.cast<Complex>();
  for (Index i = 0; i < p; ++i)
    if (bvp.kind[i] == RowKind::Interior) a(i, i) += k0 * k0 * bvp.eps(i) + shift;
  a.row(0) = bvp.row_bot.cast<Complex>();
  a(0, 0) += iu * coef_bot;
  a.row(p - 1) = bvp.row_top.cast<Complex>();
  a(p - 1, p - 1) -= iu * coef_top;

  CVector b = CVector::Zero(p);
  b(0) = rhs_bot;
  b(p - 1) = rhs_top;
  const CVector f = a.partialPivLu().solve(b);
  const double resid = (a * f - b).cwiseAbs().maxCoeff();
  const double scale =
      inf_norm(a) * f.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff();
  if (!(resid <= 1e-8 * scale))
    throw std::runtime_error("reference: core boundary value problem is numerically singular");
  return f;
}

std::vector<BarycentricTable> subdomain_tables(const CollocationGrid& grid) {
  std::vector<BarycentricTable> tabs;
  tabs.reserve(grid.subdomains());
  for (int d = 0; d < grid.subdomains(); ++d)
    tabs.push_back(barycentric_table(grid.points.segment(grid.first_of(d), grid.counts(d))));
  return tabs;
}

// All columns of `cols` interpolated at one point of the grid span.
CVector interp_columns(const CollocationGrid& grid,
                       const std::vector<BarycentricTable>& tabs, const CMatrix& cols,
                       double xq) {
  const int d = grid.subdomain_of(xq);
  const Index o = grid.first_of(d);
  const Index n = grid.counts(d);
  const RVector row = barycentric_row(tabs[d], xq);
  return (row.cast<Complex>().transpose() * cols.middleRows(o, n)).transpose();
}

void require_constant_rim(const StratifiedProfile& profile) {
  if (profile.pieces.front().kind != PieceKind::Constant ||
      profile.pieces.back().kind != PieceKind::Constant)
    throw std::invalid_argument("reference: outermost profile pieces must be constant");
}

} // namespace

Complex PlaneLayeredReference::vertical(Complex y_stretched) const {
  const Complex pref = std::exp(Complex(0.0, -beta_plus * y_top));
  const double yr = y_stretched.real();
  if (yr >= y_top) {
    const Complex ph = iu * beta_plus * (y_stretched - y_top);
    return pref * (std::exp(-ph) + R_coeff * std::exp(ph));
  }
  if (yr <= y_bot)
    return pref * T_coeff * std::exp(-iu * beta_minus * (y_stretched - y_bot));
  const int d = core_grid.subdomain_of(yr);
  const CVector seg = f_values.segment(core_grid.first_of(d), core_grid.counts(d));
  return pref * barycentric_eval(core_interp[d], seg, yr);
}

Complex PlaneLayeredReference::vertical_scattered(Complex y_stretched) const {
  const Complex pref = std::exp(Complex(0.0, -beta_plus * y_top));
  const double yr = y_stretched.real();
  if (yr >= y_top)  // the incident factor cancels exactly against pref
    return pref * R_coeff * std::exp(iu * beta_plus * (y_stretched - y_top));
  return vertical(y_stretched) - std::exp(-iu * beta_plus * y_stretched);
}

Complex PlaneLayeredReference::value_at(Complex x_stretched, Complex y_stretched) const {
  return std::exp(iu * alpha * x_stretched) * vertical(y_stretched);
}

Complex PlaneLayeredReference::value(double x, Complex y) const {
  return value_at(stretch_x.stretch(x), y);
}

Complex PlaneLayeredReference::dx(double x, Complex y) const {
  return iu * alpha * stretch_x.alpha_at(x) * value(x, y);
}

PlaneLayeredReference slab_plane_reference(const StratifiedProfile& profile,
                                           double theta_deg, double k0,
                                           const StretchProfile& stretch_x) {
  require_constant_rim(profile);
  if (!(k0 > 0.0)) throw std::invalid_argument("reference: k0 must be positive");
  if (!(std::abs(theta_deg) < 90.0))
    throw std::invalid_argument("reference: |theta| must be below 90 degrees");

  PlaneLayeredReference ref;
  ref.theta_deg = theta_deg;
  ref.stretch_x = stretch_x;
  const double eps_top = profile.pieces.back().value;
  const double eps_bot = profile.pieces.front().value;
  const double t = theta_deg * kRadPerDeg;
  ref.alpha = k0 * std::sqrt(eps_top) * std::sin(t);
  ref.beta_plus = k0 * std::sqrt(eps_top) * std::cos(t);
  ref.beta_minus = principal_sqrt(Complex(k0 * k0 * eps_bot - ref.alpha * ref.alpha, 0.0));

  if (profile.jumps.size() <= 1) {
    const double c = profile.jumps.empty() ? 0.0 : profile.jumps.front();
    ref.y_bot = ref.y_top = c;
    ref.R_coeff = (ref.beta_plus - ref.beta_minus) / (ref.beta_plus + ref.beta_minus);
    ref.T_coeff = 1.0 + ref.R_coeff;
    return ref;
  }

  ref.y_bot = profile.jumps.front();
  ref.y_top = profile.jumps.back();
  const CoreBvp bvp = make_core_bvp(profile, k0);
  ref.f_values = solve_core(bvp, k0, Complex(-ref.alpha * ref.alpha, 0.0),
                            ref.beta_minus, Complex(ref.beta_plus, 0.0),
                            Complex(0.0, 0.0), Complex(0.0, -2.0 * ref.beta_plus));
  ref.core_grid = bvp.grid;
  ref.core_interp = subdomain_tables(bvp.grid);
  ref.R_coeff = ref.f_values(ref.f_values.size() - 1) - 1.0;
  ref.T_coeff = ref.f_values(0);
  return ref;
}

PlaneLayeredReference background_plane_reference(const Scene& scene, double theta_deg) {
  if (scene.incidence.kind != Incidence::Kind::PlaneWave)
    throw std::logic_error("reference: scene has no plane-wave incidence");
  return slab_plane_reference(scene.background, theta_deg, scene.k0,
                              scene.pml.x_profile());
}

Complex LineSourceReference::incident(double x, Complex y) const {
  const Complex xs = stretch_x.stretch(x);
  const Complex rho = complex_distance(xs - x_src, y - y_src);
  return 0.25 * iu * hankel1(0, k0 * n_top * rho);
}

Complex LineSourceReference::incident_dx(double x, Complex y) const {
  const Complex xs = stretch_x.stretch(x);
  const Complex rho = complex_distance(xs - x_src, y - y_src);
  return -0.25 * iu * k0 * n_top * hankel1(1, k0 * n_top * rho) *
         ((xs - x_src) / rho) * stretch_x.alpha_at(x);
}

Complex LineSourceReference::value(double x, Complex y) const {
  const CVector ps = interp_columns(xbasis.grid, xbasis.interp, psi_nodes, x);
  const double yr = y.real();
  const Index m = ps.size();
  if (yr > y_top) {
    Complex acc(0.0, 0.0);
    for (Index j = 0; j < m; ++j)
      acc += c_t(j) * std::exp(iu * gamma_top(j) * (y - y_top)) * ps(j);
    return acc + incident(x, y);
  }
  if (core_grid.size() > 0 && yr >= y_bot) {
    const CVector ph = interp_columns(core_grid, core_interp, phi, yr);
    return (ph.transpose() * ps)(0);
  }
  Complex acc(0.0, 0.0);
  for (Index j = 0; j < m; ++j)
    acc += c_b(j) * std::exp(-iu * gamma_bot(j) * (y - y_bot)) * ps(j);
  return acc;
}

Complex LineSourceReference::dx(double x, Complex y) const {
  const CVector dps = interp_columns(xbasis.grid, xbasis.interp, dpsi, x);
  const double yr = y.real();
  const Index m = dps.size();
  if (yr > y_top) {
    Complex acc(0.0, 0.0);
    for (Index j = 0; j < m; ++j)
      acc += c_t(j) * std::exp(iu * gamma_top(j) * (y - y_top)) * dps(j);
    return acc + incident_dx(x, y);
  }
  if (core_grid.size() > 0 && yr >= y_bot) {
    const CVector ph = interp_columns(core_grid, core_interp, phi, yr);
    return (ph.transpose() * dps)(0);
  }
  Complex acc(0.0, 0.0);
  for (Index j = 0; j < m; ++j)
    acc += c_b(j) * std::exp(-iu * gamma_bot(j) * (y - y_bot)) * dps(j);
  return acc;
}

LineSourceReference line_source_reference(const Scene& scene,
                                          const StratifiedProfile& profile,
                                          double x_src, double y_src) {
  require_constant_rim(profile);
  if (!(scene.k0 > 0.0)) throw std::invalid_argument("reference: k0 must be positive");

  LineSourceReference ref;
  ref.k0 = scene.k0;
  ref.x_src = x_src;
  ref.y_src = y_src;
  ref.stretch_x = scene.pml.x_profile();
  ref.stretch_y = scene.pml.y_profile();
  const double eps_top = profile.pieces.back().value;
  const double eps_bot = profile.pieces.front().value;
  ref.n_top = std::sqrt(eps_top);
  ref.y_bot = profile.jumps.empty() ? 0.0 : profile.jumps.front();
  ref.y_top = profile.jumps.empty() ? 0.0 : profile.jumps.back();
  if (!(y_src > ref.y_top))
    throw std::invalid_argument("reference: line source must sit above the stratified core");
  if (!(std::abs(x_src) < 0.5 * scene.pml.L1))
    throw std::invalid_argument("reference: line source outside the physical box");

  const double k0 = scene.k0;
  double eps_max = std::max(eps_top, eps_bot);
  if (profile.jumps.size() >= 2)
    eps_max = std::max(eps_max, sampled_max(profile, ref.y_bot, ref.y_top));
  const double n_max = std::sqrt(eps_max);

  const double l1 = scene.pml.L1, d1 = scene.pml.d1;
  const int n_pml = std::clamp(
      static_cast<int>(std::ceil(M_PI * std::sqrt(scene.pml.sigma * k0 * n_max * d1))) + 16,
      24, 288);
  int n_phys = std::max(
      {72, static_cast<int>(std::ceil(0.6 * k0 * n_max * l1)) + 16,
       static_cast<int>(std::ceil(4.0 * M_PI * (0.5 * l1) /
                                  std::max(y_src - ref.y_top, 0.05)))});
  n_phys = std::min(n_phys, 420);

  RVector breaks(4);
  breaks << -0.5 * l1 - d1, -0.5 * l1, 0.5 * l1, 0.5 * l1 + d1;
  IVector counts(3);
  counts << n_pml, n_phys, n_pml;
  const CollocationGrid grid = make_collocation_grid(breaks, counts);
  const SturmLiouvilleOp op = stretched_sturm_liouville(
      grid, ref.stretch_x, RVector::Zero(grid.size()), k0);

  const std::vector<Index> free = grid.free_indices();
  const Index m = static_cast<Index>(free.size());
  ref.xbasis = solve_modes(
      op, BoundarySpec{BoundaryCondition::dirichlet(), BoundaryCondition::dirichlet()},
      static_cast<int>(m));

  const Index p = grid.size();
  ref.psi_nodes.resize(p, m);
  ref.dpsi.resize(p, m);
  for (Index j = 0; j < m; ++j) {
    ref.psi_nodes.col(j) = ref.xbasis.modes[j].phi;
    ref.dpsi.col(j) = grid_derivative(op, ref.xbasis.modes[j].phi);
  }

  ref.gamma_top.resize(m);
  ref.gamma_bot.resize(m);
  for (Index j = 0; j < m; ++j) {
    const Complex delta = ref.xbasis.modes[j].delta;
    ref.gamma_top(j) = principal_sqrt(k0 * k0 * eps_top + delta);
    ref.gamma_bot(j) = principal_sqrt(k0 * k0 * eps_bot + delta);
  }

  // Incident trace and y-derivative trace at the core top, collocated at
  // the interior grid points; the mode-value matrix there is square.
  CMatrix psi_free(m, m);
  CVector t0(m), t1(m);
  const Complex dy(ref.y_top - y_src, 0.0);
  for (Index r = 0; r < m; ++r) {
    const Index idx = free[r];
    for (Index j = 0; j < m; ++j) psi_free(r, j) = ref.xbasis.modes[j].phi(idx);
    const Complex xs = ref.stretch_x.stretch(grid.points(idx));
    const Complex rho = complex_distance(xs - x_src, dy);
    const Complex arg = k0 * ref.n_top * rho;
    t0(r) = 0.25 * iu * hankel1(0, arg);
    t1(r) = -0.25 * iu * k0 * ref.n_top * hankel1(1, arg) * (dy / rho);
  }
  const Eigen::PartialPivLU<CMatrix> lu(psi_free);
  ref.c_ps = lu.solve(t0);
  ref.d_ps = lu.solve(t1);
  const double psi_norm = inf_norm(psi_free);
  const auto check_trace = [&](const CVector& coef, const CVector& trace) {
    const double resid = (psi_free * coef - trace).cwiseAbs().maxCoeff();
    if (!(resid <= 1e-8 * (psi_norm * coef.cwiseAbs().maxCoeff() +
                           trace.cwiseAbs().maxCoeff())))
      throw std::runtime_error("reference: incident trace expansion failed");
  };
  check_trace(ref.c_ps, t0);
  check_trace(ref.d_ps, t1);

  ref.c_t.resize(m);
  ref.c_b.resize(m);
  if (profile.jumps.size() >= 2) {
    const CoreBvp bvp = make_core_bvp(profile, k0);
    ref.core_grid = bvp.grid;
    ref.core_interp = subdomain_tables(bvp.grid);
    ref.phi.resize(bvp.grid.size(), m);
    for (Index j = 0; j < m; ++j) {
      const CVector f = solve_core(
          bvp, k0, ref.xbasis.modes[j].delta, ref.gamma_bot(j), ref.gamma_top(j),
          Complex(0.0, 0.0), ref.d_ps(j) - iu * ref.gamma_top(j) * ref.c_ps(j));
      ref.phi.col(j) = f;
      ref.c_b(j) = f(0);
      ref.c_t(j) = f(f.size() - 1) - ref.c_ps(j);
    }
  } else {
    for (Index j = 0; j < m; ++j) {
      const Complex denom = ref.gamma_top(j) + ref.gamma_bot(j);
      if (std::abs(denom) <=
          1e-12 * (std::abs(ref.gamma_top(j)) + std::abs(ref.gamma_bot(j)) + 1.0))
        throw std::runtime_error("reference: degenerate per-mode matching");
      ref.c_b(j) = (ref.gamma_top(j) * ref.c_ps(j) + iu * ref.d_ps(j)) / denom;
      ref.c_t(j) = ref.c_b(j) - ref.c_ps(j);
    }
  }
  return ref;
}

InterfaceData interface_jump_data(const FieldReference& left,
                                  const FieldReference& right, double x_c,
                                  const RVector& ys, const StretchProfile& stretch_y) {
  InterfaceData out;
  out.f = CVector::Zero(ys.size());
  out.g = CVector::Zero(ys.size());
  if (&left == &right) return out;

  const auto* pl = dynamic_cast<const PlaneLayeredReference*>(&left);
  const auto* pr = dynamic_cast<const PlaneLayeredReference*>(&right);
  if (pl && pr && pl->alpha == pr->alpha && pl->beta_plus == pr->beta_plus) {
    const Complex plane = std::exp(iu * pl->alpha * pl->stretch_x.stretch(x_c));
    const Complex chain = iu * pl->alpha * pl->stretch_x.alpha_at(x_c);
    for (Index i = 0; i < ys.size(); ++i) {
      const Complex yt = stretch_y.stretch(ys(i));
      out.f(i) = plane * (pr->vertical_scattered(yt) - pl->vertical_scattered(yt));
      out.g(i) = chain * out.f(i);
    }
    return out;
  }

  for (Index i = 0; i < ys.size(); ++i) {
    const Complex yt = stretch_y.stretch(ys(i));
    out.f(i) = right.value(x_c, yt) - left.value(x_c, yt);
    out.g(i) = right.dx(x_c, yt) - left.dx(x_c, yt);
  }
  return out;
}

} // namespace nmm
