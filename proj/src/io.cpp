#include "cyfam/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cyfam/error.hpp"

namespace cyfam::io {

using nlohmann::ordered_json;

namespace {

std::string header(const TensorField& t) {
  std::ostringstream os;
  os << "# variance=" << to_string(t.variance()) << " n=" << t.fiber().n() << " N=" << t.fiber().points();
  return os.str();
}

void coord_columns(std::ostream& os, int n) {
  for (int j = 1; j <= n; ++j) os << 'x' << j << ',';
  for (int j = 1; j <= n; ++j) os << 'y' << j << ',';
}

ordered_json matrix_json(const CMat& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(format_complex(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

CMat matrix_from_json(const ordered_json& j) {
  const int rows = static_cast<int>(j.size());
  CMat m(rows, rows);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[static_cast<std::size_t>(r)].size()) != rows) throw ConfigError("coefficient matrix is not square");
    for (int c = 0; c < rows; ++c) m(r, c) = parse_complex(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<std::string>());
  }
  return m;
}

}  // namespace

std::string field_csv(const TensorField& t) {
  const FiberGrid& g = t.fiber();
  std::ostringstream os;
  os.precision(17);
  os << header(t) << '\n';
  coord_columns(os, g.n());
  for (std::size_t c = 0; c < t.components(); ++c) {
    os << "re" << c << ",im" << c << (c + 1 < t.components() ? "," : "");
  }
  os << '\n';
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (int a = 0; a < g.axes(); ++a) os << g.coord(p, a) << ',';
    for (std::size_t c = 0; c < t.components(); ++c) {
      const cplx z = t.component(c)[p];
      os << z.real() << ',' << z.imag() << (c + 1 < t.components() ? "," : "");
    }
    os << '\n';
  }
  return os.str();
}

void write_field_csv(const std::filesystem::path& path, const TensorField& t) { write_text(path, field_csv(t)); }

TensorField read_field_csv(const std::filesystem::path& path, const GridPtr& grid, const Variance& variance) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  TensorField t(grid, variance);
  std::string line;
  std::getline(in, line);
  if (line != header(t)) throw ShapeError("unexpected field header in " + path.string() + ": " + line);
  std::getline(in, line);
  for (std::size_t p = 0; p < grid->size(); ++p) {
    if (!std::getline(in, line)) throw ShapeError("truncated field file " + path.string());
    std::istringstream row(line);
    std::string cell;
    for (int a = 0; a < grid->axes(); ++a) std::getline(row, cell, ',');
    for (std::size_t c = 0; c < t.components(); ++c) {
      std::string re, im;
      std::getline(row, re, ',');
      std::getline(row, im, ',');
      t.component(c)[p] = cplx(std::stod(re), std::stod(im));
    }
  }
  return t;
}

void write_scalar_csv(const std::filesystem::path& path, const FiberGrid& grid, std::span<const double> values,
                      const std::string& column) {
  std::ostringstream os;
  os.precision(17);
  os << "# n=" << grid.n() << " N=" << grid.points() << '\n';
  coord_columns(os, grid.n());
  os << column << '\n';
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (int a = 0; a < grid.axes(); ++a) os << grid.coord(p, a) << ',';
    os << values[p] << '\n';
  }
  write_text(path, os.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_form(const std::filesystem::path& dir, const AdmissibleForm& w) {
  std::filesystem::create_directories(dir);
  ordered_json m;
  m["family"]["name"] = w.family.name();
  m["family"]["n"] = w.n();
  m["family"]["radius"] = w.family.domain_radius();
  m["family"]["coefficients"] = ordered_json::array();
  for (const CMat& c : w.family.coefficients()) m["family"]["coefficients"].push_back(matrix_json(c));
  m["stencil"]["center"] = format_complex(w.stencil.center);
  m["stencil"]["h"] = w.stencil.h;
  m["grid"] = w.grid()->points();
  m["provenance"] = to_string(w.provenance);
  m["ma_iterations"] = w.ma_iterations;
  ordered_json files = ordered_json::array();
  for (int k = 0; k < SParameterStencil::size; ++k) {
    const std::string name = "fiber_" + std::to_string(k) + ".csv";
    write_field_csv(dir / name, w.fibers[static_cast<std::size_t>(k)].g());
    files.push_back(name);
  }
  for (std::size_t j = 0; j < w.mixed_linear.size(); ++j) {
    const std::string name = "mixed_linear_" + std::to_string(j) + ".csv";
    write_field_csv(dir / name, w.mixed_linear[j]);
    files.push_back(name);
  }
  write_field_csv(dir / "mixed_periodic.csv", w.mixed_periodic);
  write_field_csv(dir / "g_ss.csv", w.g_ss);
  files.push_back("mixed_periodic.csv");
  files.push_back("g_ss.csv");
  for (std::size_t k = 0; k < w.potential.size(); ++k) {
    const std::string name = "potential_" + std::to_string(k) + ".csv";
    write_field_csv(dir / name, TensorField::scalar(w.fibers[k].grid(), w.potential[k]));
    files.push_back(name);
  }
  m["files"] = files;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

AdmissibleForm read_form(const std::filesystem::path& dir) {
  ordered_json m;
  try {
    m = ordered_json::parse(read_text(dir / "manifest.json"));
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  std::vector<CMat> coeffs;
  for (const auto& c : m["family"]["coefficients"]) coeffs.push_back(matrix_from_json(c));
  PeriodFamily fam(m["family"]["name"].get<std::string>(), coeffs, m["family"]["radius"].get<double>());
  SParameterStencil st{parse_complex(m["stencil"]["center"].get<std::string>()), m["stencil"]["h"].get<double>()};
  const int points = m["grid"].get<int>();
  const std::string prov = m["provenance"].get<std::string>();
  const int n = fam.n();
  std::vector<GridPtr> grids;
  for (int k = 0; k < SParameterStencil::size; ++k) grids.push_back(FiberGrid::make(fam.period(st.point(k)), points));
  const Variance metric_v{Slot::down_holo, Slot::down_anti};
  AdmissibleForm w{fam, st, prov == "closed-form" ? Provenance::closed_form : Provenance::solver_corrected, {}, {},
                   read_field_csv(dir / "mixed_periodic.csv", grids[0], {Slot::down_anti}),
                   read_field_csv(dir / "g_ss.csv", grids[0], {}), {}, m.value("ma_iterations", 0)};
  for (int k = 0; k < SParameterStencil::size; ++k)
    w.fibers.emplace_back(read_field_csv(dir / ("fiber_" + std::to_string(k) + ".csv"), grids[static_cast<std::size_t>(k)], metric_v));
  for (int j = 0; j < n; ++j)
    w.mixed_linear.push_back(read_field_csv(dir / ("mixed_linear_" + std::to_string(j) + ".csv"), grids[0], {Slot::down_anti}));
  if (w.provenance == Provenance::solver_corrected) {
    for (int k = 0; k < SParameterStencil::size; ++k) {
      const TensorField t = read_field_csv(dir / ("potential_" + std::to_string(k) + ".csv"), grids[static_cast<std::size_t>(k)], {});
      w.potential.emplace_back(t.values().begin(), t.values().end());
    }
  }
  return w;
}

}  // namespace cyfam::io
