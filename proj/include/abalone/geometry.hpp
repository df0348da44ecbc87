#pragma once

// Hexagonal (a,b,c) boards, cell adjacency and the board symmetry group.
//
// Cells use flat-topped hexes arranged in vertical columns.  A cell is
// addressed by its axial coordinate (q, r); its vertical position inside a
// column is h = 2r + q, measured in half-cell steps.  Scan order is columns
// left to right, bottom to top within a column, which is also the order of
// characters in the board notation.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace abalone {

using CellMask = std::uint64_t;
constexpr int kMaxCells = 64;
constexpr int kNumDirections = 6;

enum class Direction : std::uint8_t { N = 0, NE = 1, SE = 2, S = 3, SW = 4, NW = 5 };

constexpr Direction opposite(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 3) % 6);
}

constexpr int index_of(Direction d) { return static_cast<int>(d); }

inline const char* direction_name(Direction d) {
  static constexpr std::array<const char*, 6> kNames{"N", "NE", "SE", "S", "SW", "NW"};
  return kNames[index_of(d)];
}

inline Direction parse_direction(std::string_view s) {
  for (int d = 0; d < kNumDirections; ++d) {
    if (s == direction_name(static_cast<Direction>(d))) return static_cast<Direction>(d);
  }
  throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

// Axial step (dq, dr) for each direction.
constexpr std::array<std::pair<int, int>, 6> kAxialStep{{
    {0, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}}};

struct BoardShape {
  int a = 0;
  int b = 0;
  int c = 0;

  friend bool operator==(const BoardShape&, const BoardShape&) = default;

  // ab + bc + ca - a - b - c + 1
  [[nodiscard]] int expected_cell_count() const { return a * b + b * c + c * a - a - b - c + 1; }

  [[nodiscard]] std::string to_string() const {
    return std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c);
  }
};

inline BoardShape parse_shape(std::string_view text) {
  BoardShape s;
  std::array<int*, 3> out{&s.a, &s.b, &s.c};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    std::size_t end = text.find(',', pos);
    if ((i < 2) != (end != std::string_view::npos)) {
      throw std::invalid_argument("shape must look like a,b,c: '" + std::string(text) + "'");
    }
    std::string_view part = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    if (part.empty() || part.size() > 3 ||
        !std::all_of(part.begin(), part.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      throw std::invalid_argument("bad side length '" + std::string(part) + "'");
    }
    *out[i] = std::stoi(std::string(part));
    pos = end + 1;
  }
  return s;
}

struct CellCoord {
  int q = 0;
  int r = 0;
  [[nodiscard]] int height() const { return 2 * r + q; }
  friend auto operator<=>(const CellCoord&, const CellCoord&) = default;
};

// A cell permutation induced by a plane isometry that maps the board onto itself.
struct Symmetry {
  std::string name;
  bool is_rotation = true;
  std::vector<int> perm;             // perm[i] = image of cell i
  std::array<Direction, 6> direction_map{};  // image of each direction

  [[nodiscard]] int operator()(int cell) const { return perm[static_cast<std::size_t>(cell)]; }

  [[nodiscard]] CellMask apply(CellMask mask) const {
    CellMask out = 0;
    while (mask != 0) {
      int i = std::countr_zero(mask);
      mask &= mask - 1;
      out |= CellMask{1} << perm[static_cast<std::size_t>(i)];
    }
    return out;
  }
};

class Board {
 public:
  explicit Board(BoardShape shape) : shape_(shape) {
    if (shape.a < 1 || shape.b < 1 || shape.c < 1) {
      throw std::invalid_argument("side lengths must be positive: " + shape.to_string());
    }
    if (shape.expected_cell_count() > kMaxCells) {
      throw std::invalid_argument("board " + shape.to_string() + " has more than 64 cells");
    }
    auto [vertical, upper_left, upper_right] = orientation(shape);
    const int columns = upper_left + upper_right - 1;
    for (int q = 0; q < columns; ++q) {
      const int height = vertical + std::min(q, upper_left - 1) + std::min(q, upper_right - 1) - q;
      const int bottom = q <= upper_right - 1 ? -q : q - 2 * (upper_right - 1);
      for (int k = 0; k < height; ++k) {
        const int h = bottom + 2 * k;
        cells_.push_back(CellCoord{q, (h - q) / 2});
      }
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) index_[cells_[i]] = static_cast<int>(i);

    neighbors_.resize(cells_.size());
    neighbor_masks_.assign(cells_.size(), 0);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      for (int d = 0; d < kNumDirections; ++d) {
        const auto [dq, dr] = kAxialStep[static_cast<std::size_t>(d)];
        const int j = find({cells_[i].q + dq, cells_[i].r + dr});
        neighbors_[i][static_cast<std::size_t>(d)] = static_cast<std::int8_t>(j);
        if (j >= 0) neighbor_masks_[i] |= CellMask{1} << j;
      }
    }
    all_ = cells_.size() == 64 ? ~CellMask{0} : (CellMask{1} << cells_.size()) - 1;
    build_symmetries();
  }

  [[nodiscard]] const BoardShape& shape() const { return shape_; }
  [[nodiscard]] int cell_count() const { return static_cast<int>(cells_.size()); }
  [[nodiscard]] CellMask all_cells() const { return all_; }
  [[nodiscard]] const CellCoord& coord(int cell) const { return cells_[static_cast<std::size_t>(cell)]; }

  // Index of the cell at the given axial coordinate, or -1 if off-board.
  [[nodiscard]] int find(CellCoord c) const {
    auto it = index_.find(c);
    return it == index_.end() ? -1 : it->second;
  }

  // Neighbouring cell in direction d, or -1 if off-board.
  [[nodiscard]] int neighbor(int cell, Direction d) const {
    return neighbors_[static_cast<std::size_t>(cell)][static_cast<std::size_t>(index_of(d))];
  }
  [[nodiscard]] CellMask neighbor_mask(int cell) const { return neighbor_masks_[static_cast<std::size_t>(cell)]; }

  [[nodiscard]] const std::vector<Symmetry>& symmetries() const { return symmetries_; }

  // Letters a..z for the first 26 cells, then two-letter labels.
  [[nodiscard]] static std::string cell_label(int cell) {
    if (cell < 26) return std::string(1, static_cast<char>('a' + cell));
    return std::string{static_cast<char>('a' + cell / 26 - 1), static_cast<char>('a' + cell % 26)};
  }

  [[nodiscard]] int parse_cell_label(std::string_view label) const {
    for (int i = 0; i < cell_count(); ++i) {
      if (cell_label(i) == label) return i;
    }
    throw std::invalid_argument("unknown cell '" + std::string(label) + "'");
  }

  // True if three cells lie on one hex line.
  [[nodiscard]] bool collinear(int x, int y, int z) const {
    auto cube = [&](int i) {
      const auto& c = coord(i);
      return std::array<int, 3>{c.q, -c.q - c.r, c.r};
    };
    const auto p = cube(x), u = cube(y), v = cube(z);
    for (int axis = 0; axis < 3; ++axis) {
      if (p[static_cast<std::size_t>(axis)] == u[static_cast<std::size_t>(axis)] &&
          u[static_cast<std::size_t>(axis)] == v[static_cast<std::size_t>(axis)]) {
        return true;
      }
    }
    return false;
  }

 private:
  // Isosceles boards put the odd side vertical so that the board is mirror
  // symmetric about both axes; otherwise c is vertical.
  struct Orientation {
    int vertical, upper_left, upper_right;
  };
  static Orientation orientation(BoardShape s) {
    if (s.a == s.b) return {s.c, s.a, s.b};
    if (s.b == s.c) return {s.a, s.b, s.c};
    if (s.a == s.c) return {s.b, s.a, s.c};
    return {s.c, s.a, s.b};
  }

  void build_symmetries() {
    // Doubled cube coordinates relative to the board centre, which is a
    // half-lattice point because the board is centrally symmetric.
    int qmin = cells_.front().q, qmax = qmin, rmin = cells_.front().r, rmax = rmin;
    for (const auto& c : cells_) {
      qmin = std::min(qmin, c.q);
      qmax = std::max(qmax, c.q);
      rmin = std::min(rmin, c.r);
      rmax = std::max(rmax, c.r);
    }
    const int q2 = qmin + qmax;
    const int r2 = rmin + rmax;

    static constexpr std::array<std::array<int, 3>, 6> kPerms{{
        {0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
    for (int p = 0; p < 6; ++p) {
      for (int sign : {1, -1}) {
        const auto& perm = kPerms[static_cast<std::size_t>(p)];
        auto map_cube = [&](std::array<int, 3> v) {
          std::array<int, 3> out{};
          for (std::size_t k = 0; k < 3; ++k) out[k] = sign * v[static_cast<std::size_t>(perm[k])];
          return out;
        };
        Symmetry sym;
        sym.is_rotation = p < 3;
        sym.perm.resize(cells_.size());
        bool ok = true;
        for (std::size_t i = 0; i < cells_.size() && ok; ++i) {
          const int x = 2 * cells_[i].q - q2;
          const int z = 2 * cells_[i].r - r2;
          const auto img = map_cube({x, -x - z, z});
          if ((img[0] + q2) % 2 != 0 || (img[2] + r2) % 2 != 0) {
            ok = false;
            break;
          }
          const int j = find({(img[0] + q2) / 2, (img[2] + r2) / 2});
          if (j < 0) ok = false;
          sym.perm[i] = j;
        }
        if (!ok) continue;
        for (int d = 0; d < kNumDirections; ++d) {
          const auto [dq, dr] = kAxialStep[static_cast<std::size_t>(d)];
          const auto img = map_cube({dq, -dq - dr, dr});
          for (int e = 0; e < kNumDirections; ++e) {
            if (kAxialStep[static_cast<std::size_t>(e)] == std::pair{img[0], img[2]}) {
              sym.direction_map[static_cast<std::size_t>(d)] = static_cast<Direction>(e);
            }
          }
        }
        const int image_of_north = index_of(sym.direction_map[0]);
        sym.name = sym.is_rotation ? "rot" + std::to_string(60 * image_of_north)
                                   : "mirror" + std::to_string(image_of_north);
        symmetries_.push_back(std::move(sym));
      }
    }
    std::stable_sort(symmetries_.begin(), symmetries_.end(), [](const Symmetry& x, const Symmetry& y) {
      return x.is_rotation > y.is_rotation;
    });
  }

  BoardShape shape_;
  std::vector<CellCoord> cells_;
  std::map<CellCoord, int> index_;
  std::vector<std::array<std::int8_t, 6>> neighbors_;
  std::vector<CellMask> neighbor_masks_;
  CellMask all_ = 0;
  std::vector<Symmetry> symmetries_;
};

inline Board build_board(BoardShape shape) { return Board(shape); }

// Symmetries of the board: the subgroup of the hexagon's dihedral group that
// maps the cell set onto itself.  The identity is always first.
inline const std::vector<Symmetry>& symmetry_group(const Board& board) { return board.symmetries(); }

inline const Symmetry& identity_symmetry(const Board& board) { return board.symmetries().front(); }

inline const Symmetry* find_symmetry(const Board& board, std::string_view name) {
  for (const auto& s : board.symmetries()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

}  // namespace abalone
