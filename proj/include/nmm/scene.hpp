#pragma once

#include "nmm/chebdiff.hpp"
#include "nmm/pml.hpp"
#include "nmm/types.hpp"

#include <string>
#include <vector>

namespace nmm {

enum class PieceKind { Constant, Polynomial, Table };

// Permittivity on one y-interval. Table pieces interpolate through all
// their nodes (polynomial in the barycentric form), so smooth profiles
// sampled at Chebyshev points keep spectral accuracy.
struct ProfilePiece {
  PieceKind kind = PieceKind::Constant;
  double value = 0.0;          // Constant
  std::vector<double> coeffs;  // Polynomial, ascending powers of y
  BarycentricTable table;      // Table nodes
  RVector table_values;
  std::string table_path;      // as written in the scene file

  double eval(double y) const;
};

// Piecewise permittivity in y on the whole line: pieces[i] applies between
// jumps[i-1] and jumps[i], the outermost pieces extend to +-infinity.
// At a jump the upper piece wins.
struct StratifiedProfile {
  std::vector<double> jumps;         // strictly increasing, may be empty
  std::vector<ProfilePiece> pieces;  // jumps.size() + 1, bottom to top

  double eval(double y) const;
  const ProfilePiece& piece_at(double y) const;
  bool is_constant() const;
};

// Merges neighbouring constant pieces of equal value, dropping the jump
// between them. A scatterer whose profile matches the background reduces
// to the background profile exactly.
StratifiedProfile canonicalized(StratifiedProfile p);

struct Inhomogeneity {
  double x_lo = 0.0, x_hi = 0.0;  // x-extent
  double y0 = 0.0, y1 = 0.0;      // y-extent
  StratifiedProfile profile;      // meaningful on [y0, y1]
};

struct PmlSpec {
  double L1 = 0.0, L2 = 0.0;  // physical box side lengths
  double d1 = 0.0, d2 = 0.0;  // absorber thicknesses
  double sigma = 0.0;
  int m = 0;  // grading exponent

  StretchProfile x_profile() const { return StretchProfile(L1, d1, sigma, m); }
  StretchProfile y_profile() const { return StretchProfile(L2, d2, sigma, m); }
};

struct Incidence {
  enum class Kind { PlaneWave, LineSource };
  Kind kind = Kind::PlaneWave;
  double theta_deg = 0.0;      // PlaneWave, as given in the scene file
  double xs = 0.0, ys = 0.0;   // LineSource position
};

struct Scene {
  double k0 = 0.0;
  bool k0_given = false;  // false: the file gave lambda
  double lambda = 0.0;    // set when k0_given is false
  StratifiedProfile background;  // constant pieces only
  std::vector<Inhomogeneity> inhomogeneities;  // sorted by x_lo
  PmlSpec pml;
  Incidence incidence;
  int num_modes = 0;
  int points_per_subdomain = 12;

  double eps_top() const { return background.pieces.back().value; }
  double eps_bottom() const { return background.pieces.front().value; }
};

// Parses and validates a scene. Table paths are resolved against base_dir.
// Throws std::runtime_error with the offending line for grammar problems,
// std::invalid_argument naming the violated invariant otherwise.
Scene parse_scene(const std::string& config_text, const std::string& base_dir = ".");

// Canonical text form; parse_scene(serialize_scene(s)) reproduces s bit for bit.
std::string serialize_scene(const Scene& scene);

// Pointwise permittivity. Inhomogeneity rectangles are half-open
// ([x_lo, x_hi) x [y0, y1)), matching the profile's at-jump convention.
double permittivity(const Scene& scene, double x, double y);

enum class SegmentKind { Exterior, Interior };

struct Segment {
  double x_lo = 0.0, x_hi = 0.0;
  SegmentKind kind = SegmentKind::Exterior;
  StratifiedProfile profile;
};

// x-uniform segments partitioning the stretched domain, left to right:
// the two unbounded-through-PML exterior segments and, between them, one
// interior segment per inhomogeneity and per gap. The interior profiles
// are the background overlaid with the scatterer, canonicalized.
std::vector<Segment> segment_decomposition(const Scene& scene);

// Plane-wave phase parameters (PlaneWave scenes only).
double plane_alpha(const Scene& scene);
double plane_beta_plus(const Scene& scene);
Complex plane_beta_minus(const Scene& scene);  // imaginary beyond the critical angle

} // namespace nmm
