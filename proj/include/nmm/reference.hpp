#pragma once

#include "nmm/chebdiff.hpp"
#include "nmm/modes.hpp"
#include "nmm/pml.hpp"
#include "nmm/scene.hpp"
#include "nmm/types.hpp"

#include <vector>

namespace nmm {

// Reference field of one x-uniform segment: the solution its layered
// profile would produce if it filled the whole strip. Evaluation takes the
// physical x and an already-stretched transverse coordinate, so callers
// choose their own transverse absorber; the x stretch is applied
// internally where the field depends on it.
class FieldReference {
 public:
  virtual ~FieldReference() = default;
  virtual Complex value(double x, Complex y) const = 0;
  // d/dx of value(); exact through the absorber, chain factors included.
  virtual Complex dx(double x, Complex y) const = 0;
};

class ZeroReference final : public FieldReference {
 public:
  Complex value(double, Complex) const override { return Complex(0.0, 0.0); }
  Complex dx(double, Complex) const override { return Complex(0.0, 0.0); }
};

// Plane wave over a stratified profile, incident from the top. Above the
// core the field is the incident wave plus R_coeff times the reflected
// one, below it T_coeff times the transmitted one, both referenced to the
// core faces; inside the core it follows the collocation solution f. All
// three regions share the phase prefactor exp(-i beta_plus y_top).
class PlaneLayeredReference final : public FieldReference {
 public:
  double theta_deg = 0.0;
  double alpha = 0.0;      // horizontal wavenumber
  double beta_plus = 0.0;  // vertical wavenumber of the top medium
  Complex beta_minus;      // bottom medium; imaginary beyond the critical angle
  double y_bot = 0.0, y_top = 0.0;  // core interval; a point at a bare interface
  Complex R_coeff, T_coeff;

  CollocationGrid core_grid;  // empty when the core is a point
  CVector f_values;
  std::vector<BarycentricTable> core_interp;
  StretchProfile stretch_x;

  Complex value(double x, Complex y) const override;
  Complex dx(double x, Complex y) const override;

  // Field at explicitly stretched coordinates, for callers carrying their
  // own absorber.
  Complex value_at(Complex x_stretched, Complex y_stretched) const;
  // The y-dependent factor alone.
  Complex vertical(Complex y_stretched) const;
  // vertical() minus the incident factor exp(-i beta_plus y). The incident
  // wave is incoming, so the stretch amplifies it in the top absorber;
  // differences of references sharing it must cancel it analytically, not
  // in floating point.
  Complex vertical_scattered(Complex y_stretched) const;
};

// Plane-wave reference over the profile as given: its jump list delimits
// the core, so equal-valued neighbours still count toward it. With at most
// one jump the coefficients close in the two-media form; otherwise f
// solves f'' + (k0^2 eps - alpha^2) f = 0 on the core with impedance rows
// coupling to the outer media.
PlaneLayeredReference slab_plane_reference(const StratifiedProfile& profile,
                                           double theta_deg, double k0,
                                           const StretchProfile& stretch_x);

// Background solution of a plane-wave scene.
PlaneLayeredReference background_plane_reference(const Scene& scene, double theta_deg);

// Cylindrical wave of a line source at (x_src, y_src) above the core of a
// stratified profile. The scattered part is expanded in the Dirichlet
// eigenmodes psi_j of the stretched d^2/dx^2 operator on the full x
// interval; each mode carries outgoing vertical factors outside the core
// and a collocation solution phi_j inside it. The incident trace and its
// y-derivative are matched exactly at the interior collocation points.
class LineSourceReference final : public FieldReference {
 public:
  double x_src = 0.0, y_src = 0.0;
  double k0 = 0.0;
  double n_top = 0.0;  // refractive index of the source medium
  double y_bot = 0.0, y_top = 0.0;

  ModeBasis xbasis;    // modes over the stretched x interval
  CMatrix psi_nodes;   // mode values at the x grid points, one column per mode
  CMatrix dpsi;        // d psi_j / dx at the x grid points
  CVector c_ps, d_ps;  // incident trace and its y-derivative in the mode basis
  CVector gamma_top, gamma_bot;  // sqrt(k0^2 eps_pm + delta_j), Im >= 0
  CVector c_t, c_b;    // vertical amplitudes above and below the core
  CMatrix phi;         // core solutions, grid points by modes; empty when degenerate
  CollocationGrid core_grid;
  std::vector<BarycentricTable> core_interp;
  StretchProfile stretch_x, stretch_y;

  Complex value(double x, Complex y) const override;
  Complex dx(double x, Complex y) const override;

  // (i/4) H0^(1)(k0 n_top rho) at the stretched x, and its x-derivative.
  Complex incident(double x, Complex y) const;
  Complex incident_dx(double x, Complex y) const;
};

// The source must lie strictly above the core top (above the single jump,
// or above zero for a uniform profile) and strictly inside the physical
// box in x. Only k0 and the absorber parameters are read from the scene.
LineSourceReference line_source_reference(const Scene& scene,
                                          const StratifiedProfile& profile,
                                          double x_src, double y_src);

// Field and x-derivative jumps between the references of two neighbouring
// segments at x = x_c, sampled at the stretched images of ys. Plane
// references with the same incident wave are differenced through their
// scattered parts, keeping the jumps accurate inside the top absorber.
struct InterfaceData {
  CVector f, g;
};

InterfaceData interface_jump_data(const FieldReference& left,
                                  const FieldReference& right, double x_c,
                                  const RVector& ys, const StretchProfile& stretch_y);

} // namespace nmm
