#include "gdm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gdm/error.hpp"

namespace gdm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void fail(const Entry& e, const std::string& what) {
  throw ConfigError("line " + std::to_string(e.line) + ": " + what);
}

double parse_double(const Entry& e, const std::string& key) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail(e, "'" + key + "' expects a number");
  return v;
}

int parse_int(const Entry& e, const std::string& key) {
  int v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(e, "'" + key + "' expects an integer");
  return v;
}

template <class Parse>
auto parse_enum(const Entry& e, Parse parse) {
  try {
    return parse(e.value);
  } catch (const ConfigError& err) {
    fail(e, err.what());
  }
}

const char* const kKeys[] = {"test",   "scheme", "variant", "n",     "level",   "mesh_file", "pattern",
                             "dt",     "t_final", "length", "m_ratio", "mu0",   "dm",        "dl",
                             "dt_disp", "phi",   "perm",    "rate",  "c0",      "c_injected", "out_dir",
                             "vtk_every"};

bool known_key(const std::string& k) {
  for (const char* key : kKeys) {
    if (k == key) return true;
  }
  return false;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  std::map<std::string, Entry> entries;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_key(key)) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    if (entries.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    entries[key] = {value, line_no};
  }
  if (!entries.count("test")) throw ConfigError("missing required key 'test'");
  RunConfig c = default_config(parse_enum(entries["test"], parse_test_case));

  // An explicit mesh source replaces the default one.
  if (entries.count("n") || entries.count("level") || entries.count("mesh_file")) {
    c.n = 0;
    c.level = 0;
    c.mesh_file.clear();
  }
  for (const auto& [key, e] : entries) {
    if (key == "test") continue;
    if (key == "scheme") c.scheme = parse_enum(e, parse_scheme);
    else if (key == "variant") c.variant = parse_enum(e, parse_variant);
    else if (key == "pattern") c.pattern = parse_enum(e, parse_pattern);
    else if (key == "n") c.n = parse_int(e, key);
    else if (key == "level") c.level = parse_int(e, key);
    else if (key == "vtk_every") c.vtk_every = parse_int(e, key);
    else if (key == "mesh_file") c.mesh_file = e.value;
    else if (key == "out_dir") c.out_dir = e.value;
    else if (key == "dt") c.dt = parse_double(e, key);
    else if (key == "t_final") c.t_final = parse_double(e, key);
    else if (key == "length") c.length = parse_double(e, key);
    else if (key == "m_ratio") c.m_ratio = parse_double(e, key);
    else if (key == "mu0") c.mu0 = parse_double(e, key);
    else if (key == "dm") c.dm = parse_double(e, key);
    else if (key == "dl") c.dl = parse_double(e, key);
    else if (key == "dt_disp") c.dt_disp = parse_double(e, key);
    else if (key == "phi") c.phi = parse_double(e, key);
    else if (key == "perm") c.perm = parse_double(e, key);
    else if (key == "rate") c.rate = parse_double(e, key);
    else if (key == "c0") c.c0 = parse_double(e, key);
    else if (key == "c_injected") c.c_injected = parse_double(e, key);
  }
  c.validate();
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialise(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "test=" << to_string(c.test) << '\n'
      << "scheme=" << to_string(c.scheme) << '\n'
      << "variant=" << to_string(c.variant) << '\n';
  if (c.n > 0) out << "n=" << c.n << '\n';
  if (c.level > 0) out << "level=" << c.level << '\n';
  if (!c.mesh_file.empty()) out << "mesh_file=" << c.mesh_file << '\n';
  out << "pattern=" << to_string(c.pattern) << '\n'
      << "dt=" << c.dt << '\n'
      << "t_final=" << c.t_final << '\n'
      << "length=" << c.length << '\n'
      << "m_ratio=" << c.m_ratio << '\n'
      << "mu0=" << c.mu0 << '\n'
      << "dm=" << c.dm << '\n'
      << "dl=" << c.dl << '\n'
      << "dt_disp=" << c.dt_disp << '\n'
      << "phi=" << c.phi << '\n'
      << "perm=" << c.perm << '\n'
      << "rate=" << c.rate << '\n'
      << "c0=" << c.c0 << '\n'
      << "c_injected=" << c.c_injected << '\n'
      << "out_dir=" << c.out_dir << '\n'
      << "vtk_every=" << c.vtk_every << '\n';
  return out.str();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

void write_errors_csv(std::ostream& out, const std::vector<SuiteRow>& rows) {
  out << "scheme,variant,mesh,dt,L1,L2,ratio_L1,ratio_L2\n";
  for (const auto& r : rows) {
    out << to_string(r.scheme) << ',' << to_string(r.variant) << ',' << r.mesh << ',' << format_number(r.dt) << ','
        << format_number(r.l1) << ',' << format_number(r.l2) << ',' << format_number(r.ratio_l1) << ','
        << format_number(r.ratio_l2) << '\n';
  }
}

void write_diagnostics_csv(std::ostream& out, const std::vector<StepDiagnostics>& steps) {
  out << "step,time,mass_residual,pressure_mean,picard_iters,cmin,cmax,nonlinear_residual,energy_residual\n";
  for (const auto& s : steps) {
    out << s.step << ',' << format_number(s.time) << ',' << format_number(s.mass_residual) << ','
        << format_number(s.pressure_mean) << ',' << s.picard_iterations << ',' << format_number(s.cmin) << ','
        << format_number(s.cmax) << ',' << format_number(s.nonlinear_residual) << ','
        << format_number(s.energy_residual) << '\n';
  }
}

void write_quality_csv(std::ostream& out, const std::vector<QualityReport>& reports) {
  out << "scheme,mesh,h,ndof,C_D,S_D,W_D\n";
  for (const auto& r : reports) {
    const double s = r.consistency.empty() ? NAN : r.consistency.begin()->second;
    const double w = r.conformity.empty() ? NAN : r.conformity.begin()->second;
    out << r.scheme << ',' << r.mesh << ',' << format_number(r.h) << ',' << r.ndof << ','
        << format_number(r.coercivity) << ',' << format_number(s) << ',' << format_number(w) << '\n';
  }
}

void write_vtk(std::ostream& out, const GradientDiscretisation& gd, std::span<const double> c,
               std::span<const double> p, std::span<const Vec2> subcell_velocity) {
  if (c.size() != gd.ndof || p.size() != gd.ndof) throw InvalidParameter("VTK fields must be dof vectors");
  if (subcell_velocity.size() != gd.subcells.size()) throw InvalidParameter("velocity must be given per sub-cell");
  const std::size_t cells = gd.recon_count();
  std::size_t points = 0;
  for (const auto& poly : gd.recon_polygons) points += poly.size();

  const auto pc = reconstruct(gd, c);
  const auto pp = reconstruct(gd, p);
  std::vector<Vec2> vel(cells);
  for (std::size_t s = 0; s < gd.subcells.size(); ++s) {
    const auto& sc = gd.subcells[s];
    vel[sc.recon] = vel[sc.recon] + (sc.measure / gd.recon_measures[sc.recon]) * subcell_velocity[s];
  }

  out.precision(10);
  out << "# vtk DataFile Version 3.0\n"
      << "gdm fields scheme " << gd.scheme << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << points << " double\n";
  for (const auto& poly : gd.recon_polygons) {
    for (const auto& v : poly) out << v.x << ' ' << v.y << " 0\n";
  }
  out << "CELLS " << cells << ' ' << cells + points << '\n';
  std::size_t next = 0;
  for (const auto& poly : gd.recon_polygons) {
    out << poly.size();
    for (std::size_t k = 0; k < poly.size(); ++k) out << ' ' << next++;
    out << '\n';
  }
  out << "CELL_TYPES " << cells << '\n';
  for (std::size_t k = 0; k < cells; ++k) out << "7\n";
  out << "CELL_DATA " << cells << '\n';
  out << "SCALARS c double 1\nLOOKUP_TABLE default\n";
  for (double v : pc) out << v << '\n';
  out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (double v : pp) out << v << '\n';
  out << "VECTORS velocity double\n";
  for (const auto& v : vel) out << v.x << ' ' << v.y << " 0\n";
}

void write_vtk_file(const std::string& path, const GradientDiscretisation& gd, std::span<const double> c,
                    std::span<const double> p, std::span<const Vec2> subcell_velocity) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_vtk(out, gd, c, p, subcell_velocity);
  if (!out) throw IoError("write to '" + path + "' failed");
}

namespace {

template <class T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) throw ValidationError(std::string("VTK: cannot read ") + what);
  return v;
}

void expect(std::istream& in, const std::string& word) {
  const auto got = read_value<std::string>(in, word.c_str());
  if (got != word) throw ValidationError("VTK: expected '" + word + "', found '" + got + "'");
}

}  // namespace

VtkSummary validate_vtk(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0) throw ValidationError("VTK: bad header");
  std::getline(in, line);  // title
  expect(in, "ASCII");
  expect(in, "DATASET");
  expect(in, "UNSTRUCTURED_GRID");
  VtkSummary s;
  expect(in, "POINTS");
  s.points = read_value<std::size_t>(in, "point count");
  read_value<std::string>(in, "point type");
  for (std::size_t k = 0; k < 3 * s.points; ++k) read_value<double>(in, "point coordinate");
  expect(in, "CELLS");
  s.cells = read_value<std::size_t>(in, "cell count");
  const auto total = read_value<std::size_t>(in, "cell list size");
  std::size_t consumed = 0;
  for (std::size_t k = 0; k < s.cells; ++k) {
    const auto m = read_value<std::size_t>(in, "cell size");
    consumed += m + 1;
    for (std::size_t j = 0; j < m; ++j) {
      if (read_value<std::size_t>(in, "cell vertex") >= s.points) throw ValidationError("VTK: vertex out of range");
    }
  }
  if (consumed != total) throw ValidationError("VTK: cell list size does not match the records");
  expect(in, "CELL_TYPES");
  if (read_value<std::size_t>(in, "cell type count") != s.cells) throw ValidationError("VTK: cell type count");
  for (std::size_t k = 0; k < s.cells; ++k) read_value<int>(in, "cell type");
  expect(in, "CELL_DATA");
  if (read_value<std::size_t>(in, "cell data count") != s.cells) throw ValidationError("VTK: cell data count");
  std::string word;
  while (in >> word) {
    if (word == "SCALARS") {
      s.scalars.push_back(read_value<std::string>(in, "scalar name"));
      read_value<std::string>(in, "scalar type");
      read_value<int>(in, "component count");
      expect(in, "LOOKUP_TABLE");
      read_value<std::string>(in, "table name");
      for (std::size_t k = 0; k < s.cells; ++k) read_value<double>(in, "scalar value");
    } else if (word == "VECTORS") {
      s.vectors.push_back(read_value<std::string>(in, "vector name"));
      read_value<std::string>(in, "vector type");
      for (std::size_t k = 0; k < 3 * s.cells; ++k) read_value<double>(in, "vector value");
    } else {
      throw ValidationError("VTK: unexpected section '" + word + "'");
    }
  }
  return s;
}

VtkSummary validate_vtk_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
  return validate_vtk(in);
}

}  // namespace gdm
