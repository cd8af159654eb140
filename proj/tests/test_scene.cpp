#include "doctest.h"

#include "nmm/scene.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

using namespace nmm;

namespace {

std::string example1_text() {
  return "# plane wave onto a dielectric block\n"
         "lambda = 1.13\n"
         "background.interfaces = 0\n"
         "background.eps = 4, 1\n"
         "inhomogeneity[0].x_lo = -0.5\n"
         "inhomogeneity[0].x_hi = 0.5\n"
         "inhomogeneity[0].y0 = -1\n"
         "inhomogeneity[0].y1 = 1\n"
         "inhomogeneity[0].eps = const:4\n"
         "pml.L1 = 5\n"
         "pml.L2 = 5\n"
         "pml.d1 = 0.05\n"
         "pml.d2 = 0.05\n"
         "pml.sigma = 70\n"
         "pml.m = 0\n"
         "incidence.plane.theta_deg = 0\n"
         "nmm.N = 950\n"
         "nmm.points_per_subdomain = 12\n";
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  size_t at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

template <class E, class F>
std::string thrown_message(F&& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  return "(no exception)";
}

bool mentions(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

} // namespace

TEST_SUITE("scene") {

TEST_CASE("parses the block-on-substrate example") {
  Scene s = parse_scene(example1_text());
  CHECK(s.k0 == 2.0 * M_PI / 1.13);
  CHECK_FALSE(s.k0_given);
  CHECK(s.eps_top() == 4.0);
  CHECK(s.eps_bottom() == 1.0);
  CHECK(s.background.jumps == std::vector<double>{0.0});
  REQUIRE(s.inhomogeneities.size() == 1);
  CHECK(s.inhomogeneities[0].x_lo == -0.5);
  CHECK(s.inhomogeneities[0].y1 == 1.0);
  CHECK(s.pml.sigma == 70.0);
  CHECK(s.incidence.kind == Incidence::Kind::PlaneWave);
  CHECK(s.num_modes == 950);
}

TEST_CASE("pointwise permittivity respects layers and the scatterer") {
  Scene s = parse_scene(example1_text());
  CHECK(permittivity(s, 2.0, 1.0) == 4.0);
  CHECK(permittivity(s, 2.0, -1.0) == 1.0);
  CHECK(permittivity(s, 0.0, -0.5) == 4.0);  // inside the block, below the interface
  CHECK(permittivity(s, 0.0, -1.5) == 1.0);

  std::string quad = replaced(example1_text(), "eps = const:4", "eps = poly:2.25,3,1");
  quad = replaced(quad, "y0 = -1", "y0 = -0.5");
  quad = replaced(quad, "y1 = 1", "y1 = 0.5");
  Scene s2 = parse_scene(quad);
  CHECK(permittivity(s2, 0.0, 0.0) == 2.25);
  CHECK(permittivity(s2, 0.0, 0.25) == doctest::Approx(1.75 * 1.75).epsilon(1e-15));
}

TEST_CASE("segment decomposition partitions the stretched line") {
  Scene s = parse_scene(example1_text());
  std::vector<Segment> segs = segment_decomposition(s);
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].kind == SegmentKind::Exterior);
  CHECK(segs[1].kind == SegmentKind::Interior);
  CHECK(segs[2].kind == SegmentKind::Exterior);
  CHECK(segs[0].x_lo == -2.55);
  CHECK(segs[0].x_hi == -0.5);
  CHECK(segs[1].x_hi == 0.5);
  CHECK(segs[2].x_hi == 2.55);
  // overlay of block eps 4 over the two-layer background collapses to a
  // two-layer profile with the remaining jump at the block's lower face
  CHECK(segs[1].profile.jumps == std::vector<double>{-1.0});
  CHECK(segs[1].profile.pieces[0].value == 1.0);
  CHECK(segs[1].profile.pieces[1].value == 4.0);
}

TEST_CASE("degenerate and multi-scatterer segmentations") {
  std::string no_inh = example1_text();
  for (size_t at; (at = no_inh.find("inhomogeneity[")) != std::string::npos;)
    no_inh.erase(at, no_inh.find('\n', at) - at + 1);
  Scene empty = parse_scene(no_inh);
  CHECK(segment_decomposition(empty).size() == 1);
  CHECK(segment_decomposition(empty)[0].kind == SegmentKind::Exterior);

  std::string two = example1_text();
  two = replaced(two, "inhomogeneity[0].x_lo = -0.5", "inhomogeneity[0].x_lo = -1.5");
  two = replaced(two, "inhomogeneity[0].x_hi = 0.5", "inhomogeneity[0].x_hi = -0.5");
  two += "inhomogeneity[1].x_lo = 0.5\n"
         "inhomogeneity[1].x_hi = 1.5\n"
         "inhomogeneity[1].y0 = -1\n"
         "inhomogeneity[1].y1 = 1\n"
         "inhomogeneity[1].eps = const:2\n";
  Scene s = parse_scene(two);
  std::vector<Segment> segs = segment_decomposition(s);
  REQUIRE(segs.size() == 5);
  CHECK(segs[0].kind == SegmentKind::Exterior);
  CHECK(segs[1].kind == SegmentKind::Interior);
  CHECK(segs[2].kind == SegmentKind::Interior);  // gap keeps the background
  CHECK(segs[3].kind == SegmentKind::Interior);
  CHECK(segs[4].kind == SegmentKind::Exterior);
  CHECK(segs[2].x_lo == -0.5);
  CHECK(segs[2].x_hi == 0.5);
  CHECK(segs[2].profile.jumps == s.background.jumps);
  CHECK(segs[3].profile.pieces[1].value == 2.0);
}

TEST_CASE("a scatterer matching the background cancels out") {
  std::string null_text = example1_text();
  null_text = replaced(null_text, "y0 = -1", "y0 = 0.25");
  null_text = replaced(null_text, "y1 = 1", "y1 = 1.25");
  Scene s = parse_scene(null_text);
  std::vector<Segment> segs = segment_decomposition(s);
  CHECK(segs[1].profile.jumps == s.background.jumps);
  CHECK(segs[1].profile.pieces.size() == 2);
  CHECK(segs[1].profile.pieces[0].value == 1.0);
  CHECK(segs[1].profile.pieces[1].value == 4.0);
}

TEST_CASE("canonicalization merges equal constants only") {
  StratifiedProfile p;
  p.jumps = {-1.0, 1.0};
  p.pieces.resize(3);
  p.pieces[0].value = 2.0;
  p.pieces[1].value = 2.0;
  p.pieces[2].kind = PieceKind::Polynomial;
  p.pieces[2].coeffs = {2.0};
  StratifiedProfile c = canonicalized(p);
  CHECK(c.jumps == std::vector<double>{1.0});
  CHECK(c.pieces.size() == 2);
  CHECK(c.pieces[1].kind == PieceKind::Polynomial);
}

TEST_CASE("round-trip is bit-exact") {
  std::string text = example1_text();
  Scene a = parse_scene(text);
  std::string ser = serialize_scene(a);
  Scene b = parse_scene(ser);
  CHECK(serialize_scene(b) == ser);
  CHECK(b.k0 == a.k0);
  CHECK(b.lambda == a.lambda);
  CHECK(b.pml.d1 == a.pml.d1);
  CHECK(b.inhomogeneities[0].y1 == a.inhomogeneities[0].y1);

  // awkward numbers survive the 17-digit form
  std::string odd = replaced(text, "lambda = 1.13", "k0 = 5.5601726356915703");
  odd = replaced(odd, "theta_deg = 0", "theta_deg = 33.712345678901237");
  Scene c = parse_scene(odd);
  Scene d = parse_scene(serialize_scene(c));
  CHECK(d.k0 == c.k0);
  CHECK(d.k0_given);
  CHECK(d.incidence.theta_deg == c.incidence.theta_deg);
  CHECK(serialize_scene(d) == serialize_scene(c));

  std::string src = replaced(text, "incidence.plane.theta_deg = 0",
                             "incidence.source.x = 0.2\nincidence.source.y = 1.5");
  Scene e = parse_scene(src);
  Scene f = parse_scene(serialize_scene(e));
  CHECK(f.incidence.kind == Incidence::Kind::LineSource);
  CHECK(f.incidence.xs == 0.2);
  CHECK(serialize_scene(f) == serialize_scene(e));
}

TEST_CASE("tabulated permittivity pieces interpolate their nodes") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "nmm_scene_test";
  fs::create_directories(dir);
  RVector nodes = cheb_points(12, -0.5, 0.5);
  {
    std::ofstream out(dir / "quad.csv");
    out << "# y, eps\n";
    for (Index j = 0; j < nodes.size(); ++j) {
      double y = nodes(j);
      out << format_g17(y) << ", " << format_g17((1.5 + y) * (1.5 + y)) << "\n";
    }
  }
  std::string text = replaced(example1_text(), "eps = const:4", "eps = table:quad.csv");
  text = replaced(text, "y0 = -1", "y0 = -0.5");
  text = replaced(text, "y1 = 1", "y1 = 0.5");
  Scene s = parse_scene(text, dir.string());
  CHECK(permittivity(s, 0.0, 0.3) == doctest::Approx(1.8 * 1.8).epsilon(1e-13));
  CHECK(permittivity(s, 0.0, nodes(5)) ==
        doctest::Approx((1.5 + nodes(5)) * (1.5 + nodes(5))).epsilon(1e-15));
  // the path in the file is preserved verbatim
  CHECK(mentions(serialize_scene(s), "table:quad.csv"));
  Scene again = parse_scene(serialize_scene(s), dir.string());
  CHECK(permittivity(again, 0.0, 0.3) == permittivity(s, 0.0, 0.3));
}

TEST_CASE("rejects malformed configs with the offending line") {
  auto parse = [](const std::string& t) { return parse_scene(t); };
  CHECK(mentions(thrown_message<std::runtime_error>([&] {
          parse(replaced(example1_text(), "pml.m = 0", "pml.m"));
        }),
        "expected key = value"));
  CHECK(mentions(thrown_message<std::runtime_error>([&] {
          parse(example1_text() + "pml.sigma = 70\n");
        }),
        "duplicate key 'pml.sigma'"));
  CHECK(mentions(thrown_message<std::runtime_error>([&] {
          parse(example1_text() + "unknown.thing = 3\n");
        }),
        "unknown key 'unknown.thing'"));
  CHECK(mentions(thrown_message<std::runtime_error>([&] {
          parse(replaced(example1_text(), "lambda = 1.13", "lambda = fast"));
        }),
        "bad number 'fast'"));
  CHECK(mentions(thrown_message<std::runtime_error>([&] {
          parse(replaced(example1_text(), "const:4", "cube:4"));
        }),
        "unknown permittivity kind"));
  CHECK(mentions(thrown_message<std::runtime_error>([&] {
          parse(example1_text() + "inhomogeneity[0].x_lo = 1\n");
        }),
        "duplicate key"));
}

TEST_CASE("rejects invalid scenes naming the invariant") {
  auto parse = [](const std::string& t) { return parse_scene(t); };
  CHECK(mentions(thrown_message<std::invalid_argument>([&] {
          std::string t = replaced(example1_text(), "y0 = -1", "y0 = 1");
          parse(replaced(t, "y1 = 1", "y1 = -1"));
        }),
        "y-extent reversed"));
  CHECK(mentions(thrown_message<std::invalid_argument>([&] {
          std::string t = replaced(example1_text(), "x_lo = -0.5", "x_lo = 0.5");
          parse(replaced(t, "x_hi = 0.5", "x_hi = -0.5"));
        }),
        "x-extent reversed"));
  CHECK(mentions(thrown_message<std::invalid_argument>([&] {
          parse(example1_text() +
                "inhomogeneity[1].x_lo = 0\ninhomogeneity[1].x_hi = 1\n"
                "inhomogeneity[1].y0 = -1\ninhomogeneity[1].y1 = 1\n"
                "inhomogeneity[1].eps = const:2\n");
        }),
        "overlapping inhomogeneities"));
  CHECK(mentions(thrown_message<std::invalid_argument>([&] {
          parse(example1_text() +
                "inhomogeneity[1].x_lo = 0.5\ninhomogeneity[1].x_hi = 1\n"
                "inhomogeneity[1].y0 = -1\ninhomogeneity[1].y1 = 1\n"
                "inhomogeneity[1].eps = const:2\n");
        }),
        "share a boundary"));
  CHECK(mentions(thrown_message<std::invalid_argument>([&] {
          parse(replaced(example1_text(), "x_hi = 0.5", "x_hi = 2.5"));
        }),
        "exceeds the physical box"));
  CHECK(mentions(thrown_message<std::invalid_argument>([&] {
          parse(replaced(example1_text(), "background.eps = 4, 1", "background.eps = 4"));
        }),
        "one more entry"));
  CHECK(mentions(thrown_message<std::invalid_argument>([&] {
          parse(replaced(example1_text(), "theta_deg = 0", "theta_deg = 90"));
        }),
        "angle out of range"));
  CHECK(mentions(thrown_message<std::invalid_argument>([&] {
          parse(replaced(example1_text(), "nmm.N = 950", "nmm.N = 0"));
        }),
        "N must be at least 1"));
  CHECK(mentions(thrown_message<std::invalid_argument>([&] {
          parse(replaced(example1_text(), "lambda = 1.13", "lambda = 1.13\nk0 = 2"));
        }),
        "exactly one of lambda or k0"));
  CHECK(mentions(thrown_message<std::invalid_argument>([&] {
          parse(replaced(example1_text(), "eps = const:4", "eps = poly:0.5,-3"));
        }),
        "not positive on the interval"));
  CHECK(mentions(thrown_message<std::invalid_argument>([&] {
          parse(replaced(example1_text(), "background.interfaces = 0",
                         "background.interfaces = 3"));
        }),
        "inside the physical box"));
}

TEST_CASE("line source placement rules") {
  std::string base = replaced(example1_text(), "incidence.plane.theta_deg = 0",
                              "incidence.source.x = SRCX\nincidence.source.y = SRCY");
  auto with_source = [&](const std::string& x, const std::string& y) {
    return replaced(replaced(base, "SRCX", x), "SRCY", y);
  };
  CHECK_NOTHROW(parse_scene(with_source("0.2", "1.5")));   // above the block
  CHECK_NOTHROW(parse_scene(with_source("0.2", "0.25")));  // strictly inside
  CHECK_NOTHROW(parse_scene(with_source("2", "0")));       // exterior segment
  CHECK(mentions(thrown_message<std::invalid_argument>(
            [&] { parse_scene(with_source("0.5", "1.5")); }),
        "source on segment boundary"));
  CHECK(mentions(thrown_message<std::invalid_argument>(
            [&] { parse_scene(with_source("0.2", "1")); }),
        "source on inhomogeneity boundary"));
  CHECK(mentions(thrown_message<std::invalid_argument>(
            [&] { parse_scene(with_source("0.2", "2.5")); }),
        "source outside the physical box"));
}

TEST_CASE("plane-wave phase parameters track the top medium") {
  Scene s = parse_scene(example1_text());
  CHECK(plane_alpha(s) == 0.0);
  CHECK(plane_beta_plus(s) == doctest::Approx(2.0 * s.k0).epsilon(1e-15));
  CHECK(plane_beta_minus(s).real() == doctest::Approx(s.k0).epsilon(1e-15));

  // total internal reflection beyond the 30-degree critical angle of the
  // eps 4 over eps 1 pair
  Scene beyond = parse_scene(replaced(example1_text(), "theta_deg = 0", "theta_deg = 45"));
  Complex bm = plane_beta_minus(beyond);
  CHECK(bm.real() == 0.0);
  CHECK(bm.imag() > 0.9 * beyond.k0);

  Scene critical = parse_scene(replaced(example1_text(), "theta_deg = 0", "theta_deg = 30"));
  CHECK(std::abs(plane_beta_minus(critical)) < 1e-7 * critical.k0);

  Scene line = parse_scene(replaced(example1_text(), "incidence.plane.theta_deg = 0",
                                    "incidence.source.x = 0.2\nincidence.source.y = 1.5"));
  CHECK_THROWS_AS(plane_alpha(line), std::logic_error);
}

TEST_CASE("permittivity stays positive everywhere") {
  Scene s = parse_scene(example1_text());
  for (int ix = 0; ix <= 40; ++ix) {
    for (int iy = 0; iy <= 40; ++iy) {
      double x = -2.55 + 5.1 * ix / 40.0;
      double y = -2.55 + 5.1 * iy / 40.0;
      double e = permittivity(s, x, y);
      CHECK(e >= 1.0);
      CHECK(e <= 4.0);
    }
  }
}

} // TEST_SUITE
