#include "esdf/io.hpp"

#include <charconv>
#include <filesystem>
#include <sstream>

namespace esdf {

std::string OutputHeader::line() const {
  std::ostringstream os;
  os << "# esdf kind=" << kind << " version=" << version << " config_hash=" << config_hash
     << " seed=" << seed;
  return os.str();
}

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const OutputHeader& header,
                     const std::vector<std::string>& columns)
    : out_(path), ncols_(columns.size()) {
  if (!out_) throw ConfigError("cannot write '" + path + "'");
  out_ << header.line() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row_text(cells);
}

void CsvWriter::row_text(const std::vector<std::string>& cells) {
  if (cells.size() != ncols_) throw std::logic_error("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
}

std::vector<std::string> field_names(const GasMixture& mix, int dim) {
  std::vector<std::string> f{"rho", "u"};
  if (dim == 2) f.push_back("v");
  f.insert(f.end(), {"p", "T"});
  for (int i = 0; i < mix.size(); ++i) f.push_back("Y_" + mix.species(i).name);
  f.insert(f.end(), {"gamma_star", "e0_star"});
  return f;
}

std::vector<double> cell_fields(const PrimitiveState& w, const FrozenPair& fp, int n_species, int dim) {
  std::vector<double> v{w.rho, w.vel[0]};
  if (dim == 2) v.push_back(w.vel[1]);
  v.push_back(w.p);
  v.push_back(w.T);
  for (int i = 0; i < n_species; ++i) v.push_back(w.Y[static_cast<std::size_t>(i)]);
  v.push_back(fp.gamma_star);
  v.push_back(fp.e0_star);
  return v;
}

void write_snapshot_csv(const std::string& path, const OutputHeader& header, const Solver& s) {
  const auto& mesh = s.mesh();
  const int dim = mesh.dim();
  std::vector<std::string> cols{"x"};
  if (dim == 2) cols.push_back("y");
  cols.push_back("level");
  for (auto& f : field_names(s.mixture(), dim)) cols.push_back(f);
  CsvWriter w(path, header, cols);
  const auto prim = s.primitives();
  for (int c = 0; c < mesh.size(); ++c) {
    const auto x = mesh.center(c);
    std::vector<double> row{x[0]};
    if (dim == 2) row.push_back(x[1]);
    row.push_back(mesh.cell(c).level);
    const auto f = cell_fields(prim[static_cast<std::size_t>(c)], s.state().fp[static_cast<std::size_t>(c)],
                               s.mixture().size(), dim);
    row.insert(row.end(), f.begin(), f.end());
    w.row(row);
  }
}

void write_snapshot_vtk(const std::string& path, const OutputHeader& header, const Solver& s) {
  const auto& mesh = s.mesh();
  if (mesh.dim() != 2) throw ConfigError("VTK snapshots are 2D only");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  const int n = mesh.size();
  out << "# vtk DataFile Version 3.0\n" << header.line().substr(2) << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 4 * n << " double\n";
  for (int c = 0; c < n; ++c) {
    const auto x = mesh.center(c);
    const int lv = mesh.cell(c).level;
    const double hx = 0.5 * mesh.dx(lv), hy = 0.5 * mesh.dy(lv);
    out << format_double(x[0] - hx) << ' ' << format_double(x[1] - hy) << " 0\n"
        << format_double(x[0] + hx) << ' ' << format_double(x[1] - hy) << " 0\n"
        << format_double(x[0] + hx) << ' ' << format_double(x[1] + hy) << " 0\n"
        << format_double(x[0] - hx) << ' ' << format_double(x[1] + hy) << " 0\n";
  }
  out << "CELLS " << n << ' ' << 5 * n << '\n';
  for (int c = 0; c < n; ++c) out << "4 " << 4 * c << ' ' << 4 * c + 1 << ' ' << 4 * c + 2 << ' ' << 4 * c + 3 << '\n';
  out << "CELL_TYPES " << n << '\n';
  for (int c = 0; c < n; ++c) out << "9\n";

  const auto prim = s.primitives();
  const auto names = field_names(s.mixture(), 2);
  std::vector<std::vector<double>> cols(names.size(), std::vector<double>(static_cast<std::size_t>(n)));
  for (int c = 0; c < n; ++c) {
    const auto f = cell_fields(prim[static_cast<std::size_t>(c)], s.state().fp[static_cast<std::size_t>(c)],
                               s.mixture().size(), 2);
    for (std::size_t k = 0; k < f.size(); ++k) cols[k][static_cast<std::size_t>(c)] = f[k];
  }
  out << "CELL_DATA " << n << '\n';
  out << "SCALARS level int 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < n; ++c) out << mesh.cell(c).level << '\n';
  for (std::size_t k = 0; k < names.size(); ++k) {
    out << "SCALARS " << names[k] << " double 1\nLOOKUP_TABLE default\n";
    for (double v : cols[k]) out << format_double(v) << '\n';
  }
}

Summary& Summary::add(const std::string& key, const std::string& value) {
  kv_.emplace_back(key, value);
  return *this;
}
Summary& Summary::add(const std::string& key, double value) { return add(key, format_double(value)); }
Summary& Summary::add(const std::string& key, long value) { return add(key, std::to_string(value)); }
Summary& Summary::add(const std::string& key, bool value) { return add(key, std::string(value ? "true" : "false")); }

std::string Summary::line() const {
  std::string s;
  for (const auto& [k, v] : kv_) {
    if (!s.empty()) s += ' ';
    s += k + '=' + v;
  }
  return s;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw ConfigError("output directory '" + dir + "' is not writable");
}

}  // namespace esdf
