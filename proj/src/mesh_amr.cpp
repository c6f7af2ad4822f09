#include "esdf/mesh_amr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace esdf {

namespace {

constexpr int kLeafMark = 0;

int mirror(int i, int n) {
  if (i < 0) return -1 - i;
  if (i >= n) return 2 * n - 1 - i;
  return i;
}

int wrap_mod(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

Mesh::Mesh(const MeshSpec& spec) : spec_(spec) {
  if (spec_.dim != 1 && spec_.dim != 2) throw ConfigError("mesh dimension must be 1 or 2");
  if (spec_.nx < 1 || (spec_.dim == 2 && spec_.ny < 1)) throw ConfigError("mesh needs >= 1 cell per axis");
  if (spec_.max_level < 0 || spec_.max_level > 4) throw ConfigError("max AMR level must be in [0, 4]");
  if (!(spec_.x1 > spec_.x0) || (spec_.dim == 2 && !(spec_.y1 > spec_.y0)))
    throw ConfigError("mesh bounds must be increasing");
  if (spec_.dim == 1) {
    spec_.ny = 1;
    spec_.periodic_y = false;
  }
  slots_.resize(static_cast<std::size_t>(spec_.max_level + 1));
  for (int l = 0; l <= spec_.max_level; ++l)
    slots_[static_cast<std::size_t>(l)].assign(
        static_cast<std::size_t>(nx_at(l)) * static_cast<std::size_t>(ny_at(l)), kAbsent);
  std::fill(slots_[0].begin(), slots_[0].end(), kLeafMark);
  rebuild();
}

double Mesh::dx(int level) const { return (spec_.x1 - spec_.x0) / nx_at(level); }

double Mesh::dy(int level) const {
  return spec_.dim == 2 ? (spec_.y1 - spec_.y0) / ny_at(level) : 1.0;
}

Vector2 Mesh::center(int c) const {
  const auto& k = cell(c);
  return {spec_.x0 + (k.i + 0.5) * dx(k.level),
          spec_.dim == 2 ? spec_.y0 + (k.j + 0.5) * dy(k.level) : 0.0};
}

double Mesh::volume(int c) const { return dx(cell(c).level) * dy(cell(c).level); }

double Mesh::min_h(int c) const {
  const int l = cell(c).level;
  return spec_.dim == 2 ? std::min(dx(l), dy(l)) : dx(l);
}

std::span<const std::pair<int, int>> Mesh::cell_faces(int c) const {
  const auto b = static_cast<std::size_t>(cell_face_offsets_[static_cast<std::size_t>(c)]);
  const auto e = static_cast<std::size_t>(cell_face_offsets_[static_cast<std::size_t>(c) + 1]);
  return {cell_face_list_.data() + b, e - b};
}

std::size_t Mesh::index(int level, int i, int j) const {
  return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_at(level)) +
         static_cast<std::size_t>(i);
}

bool Mesh::wrap(int level, int& i, int& j) const {
  const int nx = nx_at(level), ny = ny_at(level);
  if (i < 0 || i >= nx) {
    if (!spec_.periodic_x) return false;
    i = wrap_mod(i, nx);
  }
  if (j < 0 || j >= ny) {
    if (!spec_.periodic_y) return false;
    j = wrap_mod(j, ny);
  }
  return true;
}

int Mesh::slot(int level, int i, int j) const {
  if (level < 0 || level > spec_.max_level) return kAbsent;
  if (!wrap(level, i, j)) return kAbsent;
  return slots_[static_cast<std::size_t>(level)][index(level, i, j)];
}

void Mesh::rebuild() {
  cells_.clear();
  std::function<void(int, int, int)> visit = [&](int l, int i, int j) {
    int& s = slots_[static_cast<std::size_t>(l)][index(l, i, j)];
    if (s == kRefined) {
      const int cj_max = spec_.dim == 2 ? 1 : 0;
      for (int cj = 0; cj <= cj_max; ++cj)
        for (int ci = 0; ci <= 1; ++ci) visit(l + 1, 2 * i + ci, spec_.dim == 2 ? 2 * j + cj : 0);
      return;
    }
    s = static_cast<int>(cells_.size());
    cells_.push_back({l, i, j});
  };
  for (int j = 0; j < ny_at(0); ++j)
    for (int i = 0; i < nx_at(0); ++i) visit(0, i, j);

  faces_.clear();
  for (int c = 0; c < size(); ++c) {
    const auto [l, i, j] = cells_[static_cast<std::size_t>(c)];
    for (int axis = 0; axis < spec_.dim; ++axis) {
      for (int dir : {-1, 1}) {
        int ni = i + (axis == 0 ? dir : 0);
        int nj = j + (axis == 1 ? dir : 0);
        Face f;
        f.fn.n = axis == 0 ? Vector2{1.0, 0.0} : Vector2{0.0, 1.0};
        f.fn.area = spec_.dim == 1 ? 1.0 : (axis == 0 ? dy(l) : dx(l));
        if (!wrap(l, ni, nj)) {
          f.side = 2 * axis + (dir > 0 ? 1 : 0);
          (dir > 0 ? f.left : f.right) = c;
          faces_.push_back(f);
          continue;
        }
        const int s = slots_[static_cast<std::size_t>(l)][index(l, ni, nj)];
        if (s == kRefined) continue;
        int other = s;
        if (s == kAbsent) {
          int al = l, ai = ni, aj = nj;
          do {
            --al;
            ai >>= 1;
            aj >>= 1;
            other = slots_[static_cast<std::size_t>(al)][index(al, ai, aj)];
          } while (other < 0 && al > 0);
          f.hanging = true;
        } else if (dir < 0) {
          continue;
        }
        f.left = dir > 0 ? c : other;
        f.right = dir > 0 ? other : c;
        faces_.push_back(f);
      }
    }
  }

  std::vector<int> count(cells_.size() + 1, 0);
  for (const auto& f : faces_) {
    if (f.left >= 0) ++count[static_cast<std::size_t>(f.left) + 1];
    if (f.right >= 0) ++count[static_cast<std::size_t>(f.right) + 1];
  }
  for (std::size_t k = 1; k < count.size(); ++k) count[k] += count[k - 1];
  cell_face_offsets_ = count;
  cell_face_list_.assign(static_cast<std::size_t>(count.back()), {0, 0});
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (int fi = 0; fi < static_cast<int>(faces_.size()); ++fi) {
    const auto& f = faces_[static_cast<std::size_t>(fi)];
    if (f.left >= 0) cell_face_list_[static_cast<std::size_t>(fill[static_cast<std::size_t>(f.left)]++)] = {fi, 1};
    if (f.right >= 0) cell_face_list_[static_cast<std::size_t>(fill[static_cast<std::size_t>(f.right)]++)] = {fi, -1};
  }
}

double Mesh::subtree_average(std::span<const double> f, int level, int i, int j) const {
  const int s = slots_[static_cast<std::size_t>(level)][index(level, i, j)];
  if (s >= 0) return f[static_cast<std::size_t>(s)];
  double acc = 0.0;
  const int cj_max = spec_.dim == 2 ? 1 : 0;
  for (int cj = 0; cj <= cj_max; ++cj)
    for (int ci = 0; ci <= 1; ++ci)
      acc += subtree_average(f, level + 1, 2 * i + ci, spec_.dim == 2 ? 2 * j + cj : 0);
  return acc / (spec_.dim == 2 ? 4.0 : 2.0);
}

double Mesh::virtual_value(std::span<const double> f, int level, int i, int j) const {
  if (!spec_.periodic_x) i = mirror(i, nx_at(level));
  if (!spec_.periodic_y && spec_.dim == 2) j = mirror(j, ny_at(level));
  wrap(level, i, j);
  for (int l = level; l >= 0; --l) {
    const int s = slots_[static_cast<std::size_t>(l)][index(l, i, j)];
    if (s >= 0) return f[static_cast<std::size_t>(s)];
    if (s == kRefined) return subtree_average(f, l, i, j);
    i >>= 1;
    j >>= 1;
  }
  throw std::logic_error("virtual_value: uncovered position");
}

std::vector<double> Mesh::refinement_indicator(std::span<const double> f) const {
  static constexpr int kDirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  const int ndir = spec_.dim == 2 ? 4 : 1;
  std::vector<double> e(cells_.size(), 0.0);
  for (int c = 0; c < size(); ++c) {
    const auto [l, i, j] = cells_[static_cast<std::size_t>(c)];
    const double f0 = f[static_cast<std::size_t>(c)];
    double best = 0.0;
    for (int d = 0; d < ndir; ++d) {
      const double fm = virtual_value(f, l, i - kDirs[d][0], j - kDirs[d][1]);
      const double fp = virtual_value(f, l, i + kDirs[d][0], j + kDirs[d][1]);
      const double d2 = fm - 2.0 * f0 + fp;
      const double d1 = fp - fm;
      const double den = 0.3 * std::abs(f0) + std::abs(d1);
      if (den > 0.0) best = std::max(best, std::abs(d2) / den);
    }
    e[static_cast<std::size_t>(c)] = best;
  }
  return e;
}

std::vector<int> Mesh::flags_from_indicator(std::span<const double> e, double e_ref) const {
  std::vector<int> flags(e.size(), 0);
  for (std::size_t c = 0; c < e.size(); ++c) {
    if (e[c] > e_ref)
      flags[c] = 1;
    else if (e[c] < 0.5 * e_ref)
      flags[c] = -1;
  }
  return flags;
}

bool Mesh::refine_slot(int level, int i, int j) {
  if (level >= spec_.max_level) return false;
  slots_[static_cast<std::size_t>(level)][index(level, i, j)] = kRefined;
  const int cj_max = spec_.dim == 2 ? 1 : 0;
  for (int cj = 0; cj <= cj_max; ++cj)
    for (int ci = 0; ci <= 1; ++ci)
      slots_[static_cast<std::size_t>(level + 1)]
            [index(level + 1, 2 * i + ci, spec_.dim == 2 ? 2 * j + cj : 0)] = kLeafMark;
  return true;
}

void Mesh::balance() {
  const int dj_max = spec_.dim == 2 ? 1 : 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int l = spec_.max_level; l >= 2; --l) {
      const int nx = nx_at(l), ny = ny_at(l);
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
          if (slots_[static_cast<std::size_t>(l)][index(l, i, j)] < 0) continue;
          for (int dj = -dj_max; dj <= dj_max; ++dj) {
            for (int di = -1; di <= 1; ++di) {
              if (di == 0 && dj == 0) continue;
              int ni = i + di, nj = j + dj;
              if (!wrap(l, ni, nj)) continue;
              if (slots_[static_cast<std::size_t>(l)][index(l, ni, nj)] != kAbsent) continue;
              if (slots_[static_cast<std::size_t>(l - 1)][index(l - 1, ni >> 1, nj >> 1)] != kAbsent)
                continue;
              int al = l - 1, ai = ni >> 1, aj = nj >> 1;
              while (slots_[static_cast<std::size_t>(al)][index(al, ai, aj)] == kAbsent) {
                --al;
                ai >>= 1;
                aj >>= 1;
              }
              refine_slot(al, ai, aj);
              changed = true;
            }
          }
        }
      }
    }
  }
}

bool Mesh::is_balanced() const {
  const int dj_max = spec_.dim == 2 ? 1 : 0;
  for (const auto& [l, i, j] : cells_) {
    if (l < 2) continue;
    for (int dj = -dj_max; dj <= dj_max; ++dj)
      for (int di = -1; di <= 1; ++di) {
        int ni = i + di, nj = j + dj;
        if (!wrap(l, ni, nj)) continue;
        if (slot(l, ni, nj) == kAbsent && slot(l - 1, ni >> 1, nj >> 1) == kAbsent) return false;
      }
  }
  return true;
}

Remap Mesh::adapt(std::span<const int> flags) {
  if (flags.size() != cells_.size()) throw std::invalid_argument("adapt: flag count mismatch");
  const auto old_slots = slots_;
  const auto old_cells = cells_;
  const int cj_max = spec_.dim == 2 ? 1 : 0;
  const int dj_max = spec_.dim == 2 ? 1 : 0;

  // Coarsening: whole sibling groups, only where no same-level neighbor is refined.
  std::set<std::pair<int, std::size_t>> done;
  for (std::size_t c = 0; c < old_cells.size(); ++c) {
    const auto [l, i, j] = old_cells[c];
    if (l == 0 || flags[c] != -1) continue;
    const int pi = i >> 1, pj = j >> 1;
    if (!done.insert({l - 1, index(l - 1, pi, pj)}).second) continue;
    bool ok = true;
    for (int cj = 0; cj <= cj_max && ok; ++cj)
      for (int ci = 0; ci <= 1 && ok; ++ci) {
        const int ki = 2 * pi + ci, kj = spec_.dim == 2 ? 2 * pj + cj : 0;
        const int s = old_slots[static_cast<std::size_t>(l)][index(l, ki, kj)];
        if (s < 0 || flags[static_cast<std::size_t>(s)] != -1) ok = false;
        for (int dj = -dj_max; dj <= dj_max && ok; ++dj)
          for (int di = -1; di <= 1 && ok; ++di) {
            int ni = ki + di, nj = kj + dj;
            if (wrap(l, ni, nj) && slots_[static_cast<std::size_t>(l)][index(l, ni, nj)] == kRefined)
              ok = false;
          }
      }
    if (!ok) continue;
    for (int cj = 0; cj <= cj_max; ++cj)
      for (int ci = 0; ci <= 1; ++ci)
        slots_[static_cast<std::size_t>(l)][index(l, 2 * pi + ci, spec_.dim == 2 ? 2 * pj + cj : 0)] =
            kAbsent;
    slots_[static_cast<std::size_t>(l - 1)][index(l - 1, pi, pj)] = kLeafMark;
  }

  for (std::size_t c = 0; c < old_cells.size(); ++c) {
    const auto [l, i, j] = old_cells[c];
    if (flags[c] != 1 || l >= spec_.max_level) continue;
    if (slots_[static_cast<std::size_t>(l)][index(l, i, j)] < 0) continue;
    refine_slot(l, i, j);
  }
  balance();
  rebuild();

  const double child_frac = spec_.dim == 2 ? 0.25 : 0.5;
  Remap remap(cells_.size());
  std::function<void(int, int, int, double, std::vector<std::pair<int, double>>&)> collect =
      [&](int l, int i, int j, double w, std::vector<std::pair<int, double>>& out) {
        const int s = old_slots[static_cast<std::size_t>(l)][index(l, i, j)];
        if (s >= 0) {
          out.emplace_back(s, w);
          return;
        }
        for (int cj = 0; cj <= cj_max; ++cj)
          for (int ci = 0; ci <= 1; ++ci)
            collect(l + 1, 2 * i + ci, spec_.dim == 2 ? 2 * j + cj : 0, w * child_frac, out);
      };
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    auto [l, i, j] = cells_[c];
    const int s = old_slots[static_cast<std::size_t>(l)][index(l, i, j)];
    if (s == kRefined) {
      collect(l, i, j, 1.0, remap[c]);
      continue;
    }
    while (old_slots[static_cast<std::size_t>(l)][index(l, i, j)] == kAbsent) {
      --l;
      i >>= 1;
      j >>= 1;
    }
    remap[c].emplace_back(old_slots[static_cast<std::size_t>(l)][index(l, i, j)], 1.0);
  }
  return remap;
}

}  // namespace esdf
