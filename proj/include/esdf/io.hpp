#pragma once

// CSV / legacy VTK writers and single-line key=value summaries.

#include "esdf/solver.hpp"

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace esdf {

struct OutputHeader {
  std::string kind;  // "series", "snapshot", "convergence", "verify", ...
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = ESDF_VERSION;

  /// "# esdf kind=... version=... config_hash=... seed=..."
  std::string line() const;
};

/// Row-oriented CSV with the header comment as its first line.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const OutputHeader& header, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  /// Pre-formatted cells.
  void row_text(const std::vector<std::string>& cells);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::size_t ncols_;
};

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Field names for the per-cell output: rho, u, [v], p, T, Y_<name>..., gamma_star, e0_star.
std::vector<std::string> field_names(const GasMixture& mix, int dim);
std::vector<double> cell_fields(const PrimitiveState& w, const FrozenPair& fp, int n_species, int dim);

/// 1D snapshot: x, level, fields.
void write_snapshot_csv(const std::string& path, const OutputHeader& header, const Solver& s);

/// 2D snapshot as a legacy ASCII VTK unstructured grid with cell data.
void write_snapshot_vtk(const std::string& path, const OutputHeader& header, const Solver& s);

class Summary {
 public:
  Summary& add(const std::string& key, const std::string& value);
  Summary& add(const std::string& key, double value);
  Summary& add(const std::string& key, long value);
  Summary& add(const std::string& key, bool value);
  /// "key=value key=value ..." with no trailing newline.
  std::string line() const;

 private:
  std::vector<std::pair<std::string, std::string>> kv_;
};

/// Creates the directory (and parents); throws ConfigError when it is not writable.
void ensure_directory(const std::string& dir);

}  // namespace esdf
