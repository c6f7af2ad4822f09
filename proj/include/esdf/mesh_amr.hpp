#pragma once

// 1D/2D Cartesian mesh with cell-based quadtree refinement.
//
// Only leaves are stored as cells. Each refinement level keeps a dense slot
// array over its (nx 2^l) x (ny 2^l) index space holding the leaf id, kRefined
// for interior nodes, or kAbsent.

#include "esdf/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace esdf {

enum Side : int { kXLo = 0, kXHi = 1, kYLo = 2, kYHi = 3 };

struct MeshSpec {
  int dim = 1;
  int nx = 100;
  int ny = 1;
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
  bool periodic_x = false;
  bool periodic_y = false;
  int max_level = 0;
};

struct Cell {
  int level = 0;
  int i = 0;
  int j = 0;
};

/// Interface between `left` (lower coordinate) and `right`. The normal points
/// from left to right. On a domain boundary the outside id is -1 and `side`
/// names the boundary; interior faces have side == -1.
struct Face {
  int left = -1;
  int right = -1;
  int side = -1;
  FaceNormal fn;
  bool hanging = false;
};

struct AmrConfig {
  int max_levels = 0;
  double e_ref = 0.1;
  int regrid_interval = 10;
};

/// For each new cell, the old cells it draws from with volume fractions.
using Remap = std::vector<std::vector<std::pair<int, double>>>;

class Mesh {
 public:
  static constexpr int kAbsent = -1;
  static constexpr int kRefined = -2;

  explicit Mesh(const MeshSpec& spec);

  const MeshSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  int size() const { return static_cast<int>(cells_.size()); }
  int max_level() const { return spec_.max_level; }
  const Cell& cell(int c) const { return cells_[static_cast<std::size_t>(c)]; }

  double dx(int level) const;
  double dy(int level) const;
  Vector2 center(int c) const;
  double volume(int c) const;
  /// Smallest edge length of the cell (the CFL length).
  double min_h(int c) const;

  const std::vector<Face>& faces() const { return faces_; }
  /// Faces touching cell c: (face id, +1 if c is the face's left cell, else -1).
  std::span<const std::pair<int, int>> cell_faces(int c) const;

  /// Slot value at (level, i, j) after periodic wrap; kAbsent outside the
  /// domain or above the tree.
  int slot(int level, int i, int j) const;

  /// Same-level value of `f` at (level, i, j): the covering leaf, or the
  /// volume average of descendants. Out-of-domain indices are mirrored.
  double virtual_value(std::span<const double> f, int level, int i, int j) const;

  /// Sun-Takayama indicator e = max_a |D2 f| / (0.3 |f| + |D f|).
  std::vector<double> refinement_indicator(std::span<const double> f) const;

  /// Flags: +1 refine, -1 coarsen if the whole sibling group agrees, 0 keep.
  /// Enforces level <= max_level and 2:1 balance (including corners).
  Remap adapt(std::span<const int> flags);

  /// Flags from an indicator with threshold e_ref and coarsening at e_ref/2.
  std::vector<int> flags_from_indicator(std::span<const double> e, double e_ref) const;

  bool is_balanced() const;

 private:
  void rebuild();
  int nx_at(int level) const { return spec_.nx << level; }
  int ny_at(int level) const { return spec_.dim == 2 ? spec_.ny << level : 1; }
  std::size_t index(int level, int i, int j) const;
  bool wrap(int level, int& i, int& j) const;
  double subtree_average(std::span<const double> f, int level, int i, int j) const;
  bool refine_slot(int level, int i, int j);
  void balance();

  MeshSpec spec_;
  std::vector<std::vector<int>> slots_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::vector<int> cell_face_offsets_;
  std::vector<std::pair<int, int>> cell_face_list_;
};

/// Applies a remap to per-cell values (volume-weighted).
template <class T>
std::vector<T> apply_remap(const Remap& remap, const std::vector<T>& old) {
  std::vector<T> out;
  out.reserve(remap.size());
  for (const auto& src : remap) {
    T acc = old[static_cast<std::size_t>(src.front().first)] * src.front().second;
    for (std::size_t k = 1; k < src.size(); ++k)
      acc = acc + old[static_cast<std::size_t>(src[k].first)] * src[k].second;
    out.push_back(acc);
  }
  return out;
}

}  // namespace esdf
