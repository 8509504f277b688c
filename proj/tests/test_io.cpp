#include <doctest.h>

#include <sstream>

#include "gdm/error.hpp"
#include "gdm/io.hpp"

using namespace gdm;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal analytic1 config") {
  const auto c = parse("# comment\ntest=analytic1\n");
  CHECK(c.m_ratio == 1.0);
  CHECK(c.dm == 0.05);
  CHECK(c.n == 25);
  CHECK(c.out_dir == ".");
}

TEST_CASE("overrides and mesh source replacement") {
  const auto c = parse("test = analytic2\nscheme = b\nlevel = 5\nvariant = dh  # vanishing diffusion\ndt=0.01\n");
  CHECK(c.scheme == SchemeKind::b);
  CHECK(c.level == 5);
  CHECK(c.n == 0);
  CHECK(c.variant == VariantKind::dh);
  CHECK(c.dt == 0.01);
}

TEST_CASE("config errors name the line") {
  CHECK(error_of("test=analytic1\nscheme=c\n").rfind("line 2:", 0) == 0);
  CHECK(error_of("test=lit1\n\nfoo=1\n").rfind("line 3:", 0) == 0);
  CHECK(error_of("test=lit1\ndt=abc\n").rfind("line 2:", 0) == 0);
  CHECK(error_of("test=lit1\ndt=18\ndt=18\n").rfind("line 3:", 0) == 0);
  CHECK(error_of("test=lit1\nn\n").rfind("line 2:", 0) == 0);
  CHECK(error_of("test=lit1\nn=\n").rfind("line 2:", 0) == 0);
  CHECK(error_of("scheme=a\n").find("test") != std::string::npos);
  CHECK_FALSE(error_of("test=analytic1\ndt=0.03\n").empty());
  CHECK_THROWS_AS(parse_config_file("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("serialise round trip") {
  for (auto t : {TestCase::analytic1, TestCase::analytic2, TestCase::lit1, TestCase::lit2}) {
    auto c = default_config(t);
    c.variant = VariantKind::upstream;
    c.dt = c.t_final / 7.0;
    c.out_dir = "results/run 1";
    c.vtk_every = 3;
    CHECK(parse(serialise(c)) == c);
  }
  auto b = default_config(TestCase::analytic1);
  b.scheme = SchemeKind::b;
  b.n = 0;
  b.mesh_file = "meshes/mesh4.txt";
  b.pattern = TrianglePattern::diagonal;
  CHECK(parse(serialise(b)) == b);
}

TEST_CASE("CSV numbers carry 6 significant digits") {
  CHECK(format_number(0.0238) == "2.38000e-02");
  CHECK(format_number(1.0 / 3.0) == "3.33333e-01");
  CHECK(format_number(NAN).empty());
  SuiteRow row;
  row.mesh = "25x25";
  row.dt = 0.02;
  row.l1 = 2.3786e-2;
  row.l2 = 3.2291e-2;
  row.ratio_l1 = row.ratio_l2 = NAN;
  std::ostringstream out;
  write_errors_csv(out, {row});
  CHECK(out.str() ==
        "scheme,variant,mesh,dt,L1,L2,ratio_L1,ratio_L2\n"
        "a,centred,25x25,2.00000e-02,2.37860e-02,3.22910e-02,,\n");
}

TEST_CASE("VTK: 2x2 grid with c = 1") {
  const auto gd = scheme_a(build_cartesian(2, 1.0));
  const auto one = constant_dofs(gd, 1.0);
  const auto zero = constant_dofs(gd, 0.0);
  const std::vector<Vec2> u(gd.subcells.size(), Vec2{1.0, -2.0});
  std::stringstream ss;
  write_vtk(ss, gd, one, zero, u);
  const std::string text = ss.str();
  CHECK(text.find("CELLS 9 ") != std::string::npos);
  CHECK(text.find("CELL_DATA 9\nSCALARS c double 1\nLOOKUP_TABLE default\n1\n1\n1\n1\n1\n1\n1\n1\n1\n") !=
        std::string::npos);
  CHECK(text.find("VECTORS velocity double\n1 -2 0\n") != std::string::npos);
  const auto s = validate_vtk(ss);
  CHECK(s.cells == 9);
  CHECK(s.points == 36);
  CHECK(s.scalars == std::vector<std::string>{"c", "p"});
  CHECK(s.vectors == std::vector<std::string>{"velocity"});
}

TEST_CASE("VTK validator rejects inconsistent files") {
  const auto m = build_structured_triangulation(2, 1.0);
  const auto gd = scheme_b(m, build_dual(m));
  const auto c = constant_dofs(gd, 0.5);
  const std::vector<Vec2> u(gd.subcells.size());
  std::ostringstream out;
  write_vtk(out, gd, c, c, u);
  std::string text = out.str();
  std::istringstream good(text);
  CHECK(validate_vtk(good).cells == gd.ndof);

  std::string truncated = text.substr(0, text.size() - 20);
  std::istringstream bad(truncated);
  CHECK_THROWS_AS(validate_vtk(bad), ValidationError);

  const auto pos = text.find("CELL_DATA ");
  std::string wrong = text;
  wrong.replace(pos, std::string("CELL_DATA ").size() + 2, "CELL_DATA 99");
  std::istringstream bad2(wrong);
  CHECK_THROWS_AS(validate_vtk(bad2), ValidationError);
  CHECK_THROWS_AS(write_vtk(out, gd, std::vector<double>(3), c, u), InvalidParameter);
}
