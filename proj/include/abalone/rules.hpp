#pragma once

// Abalone move generation and application on any hexagonal board.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "abalone/geometry.hpp"

namespace abalone {

enum class Color : std::uint8_t { Black = 0, Gray = 1 };

constexpr Color other(Color c) { return c == Color::Black ? Color::Gray : Color::Black; }
constexpr int index_of(Color c) { return static_cast<int>(c); }

inline const char* color_name(Color c) { return c == Color::Black ? "black" : "gray"; }

inline Color parse_color(std::string_view s) {
  if (s == "black" || s == "Black" || s == "B" || s == "b") return Color::Black;
  if (s == "gray" || s == "Gray" || s == "G" || s == "g" || s == "grey") return Color::Gray;
  throw std::invalid_argument("unknown color '" + std::string(s) + "'");
}

enum class Piece : std::uint8_t { Empty = 0, Black = 1, Gray = 2 };

struct Constellation {
  CellMask black = 0;
  CellMask gray = 0;
  std::array<std::uint8_t, 2> lost{0, 0};  // indexed by Color

  [[nodiscard]] CellMask pieces(Color c) const { return c == Color::Black ? black : gray; }
  CellMask& pieces(Color c) { return c == Color::Black ? black : gray; }
  [[nodiscard]] CellMask occupied() const { return black | gray; }
  [[nodiscard]] int count(Color c) const { return std::popcount(pieces(c)); }
  [[nodiscard]] int lost_by(Color c) const { return lost[static_cast<std::size_t>(index_of(c))]; }

  [[nodiscard]] Piece at(int cell) const {
    const CellMask bit = CellMask{1} << cell;
    if ((black & bit) != 0) return Piece::Black;
    if ((gray & bit) != 0) return Piece::Gray;
    return Piece::Empty;
  }

  void set(int cell, Piece p) {
    const CellMask bit = CellMask{1} << cell;
    black &= ~bit;
    gray &= ~bit;
    if (p == Piece::Black) black |= bit;
    if (p == Piece::Gray) gray |= bit;
  }

  friend bool operator==(const Constellation&, const Constellation&) = default;
};

// ---------------------------------------------------------------------------
// Board notation: "<a>,<b>,<c>:<cells>", one of B/G/. per cell in scan order.

inline char piece_char(Piece p) {
  switch (p) {
    case Piece::Black: return 'B';
    case Piece::Gray: return 'G';
    case Piece::Empty: break;
  }
  return '.';
}

inline std::string cells_string(const Board& board, const Constellation& c) {
  std::string out(static_cast<std::size_t>(board.cell_count()), '.');
  for (int i = 0; i < board.cell_count(); ++i) out[static_cast<std::size_t>(i)] = piece_char(c.at(i));
  return out;
}

inline std::string to_notation(const Board& board, const Constellation& c) {
  return board.shape().to_string() + ":" + cells_string(board, c);
}

struct ParsedBoard {
  BoardShape shape;
  Constellation constellation;
};

inline ParsedBoard parse_notation(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("board notation needs a ':'");
  ParsedBoard out{parse_shape(text.substr(0, colon)), {}};
  const std::string_view cells = text.substr(colon + 1);
  if (static_cast<int>(cells.size()) != out.shape.expected_cell_count()) {
    throw std::invalid_argument("board " + out.shape.to_string() + " has " +
                                std::to_string(out.shape.expected_cell_count()) + " cells, notation gives " +
                                std::to_string(cells.size()));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    switch (cells[i]) {
      case 'B': out.constellation.set(static_cast<int>(i), Piece::Black); break;
      case 'G': out.constellation.set(static_cast<int>(i), Piece::Gray); break;
      case '.': break;
      default: throw std::invalid_argument(std::string("bad cell character '") + cells[i] + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

enum class Winner : std::uint8_t { None = 0, Black = 1, Gray = 2 };

inline const char* winner_name(Winner w) {
  switch (w) {
    case Winner::Black: return "black-wins";
    case Winner::Gray: return "gray-wins";
    case Winner::None: break;
  }
  return "none";
}

constexpr Winner winner_for(Color c) { return c == Color::Black ? Winner::Black : Winner::Gray; }

// A game variant: board, marbles to push off to win, starting position.
struct GameConfig {
  BoardShape shape;
  int k = 1;
  int marbles = 0;  // per side at the start
  Constellation initial;

  // Parses a board in this game's notation; lost counts follow from the
  // number of marbles missing from the board.
  [[nodiscard]] Constellation position(std::string_view notation) const {
    auto parsed = parse_notation(notation);
    if (!(parsed.shape == shape)) {
      throw std::invalid_argument("board shape " + parsed.shape.to_string() + " does not match game " +
                                  shape.to_string());
    }
    return with_lost_counts(parsed.constellation);
  }

  [[nodiscard]] Constellation with_lost_counts(Constellation c) const {
    for (Color col : {Color::Black, Color::Gray}) {
      const int missing = marbles - c.count(col);
      if (missing < 0) throw std::invalid_argument(std::string("too many ") + color_name(col) + " marbles");
      c.lost[static_cast<std::size_t>(index_of(col))] = static_cast<std::uint8_t>(missing);
    }
    return c;
  }
};

inline GameConfig make_config(BoardShape shape, int k, const Constellation& initial) {
  if (k < 1) throw std::invalid_argument("K must be at least 1");
  const int nb = initial.count(Color::Black) + initial.lost_by(Color::Black);
  const int ng = initial.count(Color::Gray) + initial.lost_by(Color::Gray);
  if (nb != ng) throw std::invalid_argument("both colours must start with the same number of marbles");
  if (shape.expected_cell_count() < nb + ng) throw std::invalid_argument("too many marbles for the board");
  return GameConfig{shape, k, nb, initial};
}

inline GameConfig make_config(std::string_view initial_notation, int k) {
  auto parsed = parse_notation(initial_notation);
  return make_config(parsed.shape, k, parsed.constellation);
}

inline Winner is_terminal(const Constellation& c, int k) {
  if (c.lost_by(Color::Gray) >= k) return Winner::Black;
  if (c.lost_by(Color::Black) >= k) return Winner::Gray;
  return Winner::None;
}

inline Winner is_terminal(const Constellation& c, const GameConfig& config) { return is_terminal(c, config.k); }

// ---------------------------------------------------------------------------

enum class MoveKind : std::uint8_t { InLine = 0, Broadside = 1 };

struct Move {
  Color mover = Color::Black;
  std::array<std::int8_t, 3> cells{-1, -1, -1};  // contiguous line, in line order
  std::uint8_t count = 0;
  Direction direction = Direction::N;
  MoveKind kind = MoveKind::InLine;
  std::uint8_t pushed = 0;  // opposing marbles displaced by a sumito
  bool ejects = false;      // the lead opposing marble leaves the board

  [[nodiscard]] bool is_sumito() const { return pushed > 0; }

  // Source cells in scan order.
  [[nodiscard]] std::array<std::int8_t, 3> sorted_cells() const {
    std::array<std::int8_t, 3> s = cells;
    std::sort(s.begin(), s.begin() + count);
    return s;
  }

  [[nodiscard]] CellMask source_mask() const {
    CellMask m = 0;
    for (int i = 0; i < count; ++i) m |= CellMask{1} << cells[static_cast<std::size_t>(i)];
    return m;
  }

  // Deterministic tie-break key: scan-order source cells, then direction.
  [[nodiscard]] std::array<int, 4> order_key() const {
    const auto s = sorted_cells();
    return {s[0], count > 1 ? s[1] : -1, count > 2 ? s[2] : -1, index_of(direction)};
  }

  friend bool operator==(const Move& x, const Move& y) {
    return x.mover == y.mover && x.count == y.count && x.direction == y.direction &&
           x.sorted_cells() == y.sorted_cells();
  }
};

// e.g. "fg-S": scan-order cell labels, a dash, the direction.
inline std::string move_notation(const Move& m) {
  std::string out;
  const auto s = m.sorted_cells();
  for (int i = 0; i < m.count; ++i) out += Board::cell_label(s[static_cast<std::size_t>(i)]);
  out += '-';
  out += direction_name(m.direction);
  return out;
}

inline std::string move_description(const Move& m) {
  if (m.is_sumito()) {
    return std::to_string(m.count) + " on " + std::to_string(m.pushed) + " push" + (m.ejects ? " (ejects)" : "");
  }
  if (m.kind == MoveKind::Broadside) return "broadside";
  return m.count == 1 ? "step" : "in-line";
}

namespace detail {

inline Constellation with_masks(const Constellation& c, Color mover, CellMask own, CellMask opp, bool ejects) {
  Constellation out = c;
  out.pieces(mover) = own;
  out.pieces(other(mover)) = opp;
  if (ejects) ++out.lost[static_cast<std::size_t>(index_of(other(mover)))];
  return out;
}

// Callbacks may return bool; false stops the enumeration.
template <class F>
bool keep_going(F& f, const Move& m, const Constellation& next) {
  if constexpr (std::is_same_v<std::invoke_result_t<F&, const Move&, const Constellation&>, bool>) {
    return f(m, next);
  } else {
    f(m, next);
    return true;
  }
}

}  // namespace detail

// Calls f(move, successor) for every legal move of `mover`.  Terminal
// positions are not checked here; the caller decides whether to ask.
// Returns false if the callback stopped the enumeration early.
template <class F>
bool for_each_move(const Board& board, const Constellation& c, Color mover, F&& f) {
  bool stopped = false;
  auto emit = [&](const Move& m, const Constellation& next) {
    if (!detail::keep_going(f, m, next)) stopped = true;
  };
  const CellMask own = c.pieces(mover);
  const CellMask opp = c.pieces(other(mover));
  const CellMask empty = board.all_cells() & ~(own | opp);
  auto bit = [](int cell) { return CellMask{1} << cell; };

  auto handle_line = [&](const std::array<std::int8_t, 3>& cells, int k, Direction axis) {
    Move m;
    m.mover = mover;
    m.cells = cells;
    m.count = static_cast<std::uint8_t>(k);
    const int first = cells[0];
    const int last = cells[static_cast<std::size_t>(k - 1)];

    // In-line, forward along the axis then backward.
    for (int pass = 0; pass < 2; ++pass) {
      const Direction dir = pass == 0 ? axis : opposite(axis);
      const int lead = pass == 0 ? last : first;
      const int tail = pass == 0 ? first : last;
      const int ahead = board.neighbor(lead, dir);
      if (ahead < 0 || stopped) continue;
      m.kind = MoveKind::InLine;
      m.direction = dir;
      if ((empty & bit(ahead)) != 0) {
        m.pushed = 0;
        m.ejects = false;
        emit(m, detail::with_masks(c, mover, own ^ bit(tail) ^ bit(ahead), opp, false));
      } else if ((opp & bit(ahead)) != 0) {
        int run = 0;
        int beyond = ahead;
        while (beyond >= 0 && (opp & bit(beyond)) != 0 && run < k) {
          ++run;
          beyond = board.neighbor(beyond, dir);
        }
        if (run >= k) continue;
        if (beyond >= 0 && (empty & bit(beyond)) == 0) continue;  // own marble behind the opposing line
        m.pushed = static_cast<std::uint8_t>(run);
        m.ejects = beyond < 0;
        const CellMask new_opp = opp ^ bit(ahead) ^ (beyond >= 0 ? bit(beyond) : 0);
        emit(m, detail::with_masks(c, mover, own ^ bit(tail) ^ bit(ahead), new_opp, m.ejects));
      }
    }

    // Broadside: every marble steps sideways into an empty cell.
    m.kind = MoveKind::Broadside;
    m.pushed = 0;
    m.ejects = false;
    for (int d = 0; d < kNumDirections; ++d) {
      const auto dir = static_cast<Direction>(d);
      if (stopped || dir == axis || dir == opposite(axis)) continue;
      CellMask from = 0;
      CellMask to = 0;
      bool ok = true;
      for (int i = 0; i < k && ok; ++i) {
        const int t = board.neighbor(cells[static_cast<std::size_t>(i)], dir);
        ok = t >= 0 && (empty & bit(t)) != 0;
        if (ok) {
          from |= bit(cells[static_cast<std::size_t>(i)]);
          to |= bit(t);
        }
      }
      if (!ok) continue;
      m.direction = dir;
      emit(m, detail::with_masks(c, mover, own ^ from ^ to, opp, false));
    }
  };

  for (CellMask rest = own; rest != 0 && !stopped; rest &= rest - 1) {
    const int p = std::countr_zero(rest);
    Move single;
    single.mover = mover;
    single.cells = {static_cast<std::int8_t>(p), -1, -1};
    single.count = 1;
    single.kind = MoveKind::InLine;
    for (int d = 0; d < kNumDirections; ++d) {
      const int t = board.neighbor(p, static_cast<Direction>(d));
      if (stopped || t < 0 || (empty & bit(t)) == 0) continue;
      single.direction = static_cast<Direction>(d);
      emit(single, detail::with_masks(c, mover, own ^ bit(p) ^ bit(t), opp, false));
    }
    for (Direction axis : {Direction::N, Direction::NE, Direction::SE}) {
      const int p1 = board.neighbor(p, axis);
      if (p1 < 0 || (own & bit(p1)) == 0) continue;
      handle_line({static_cast<std::int8_t>(p), static_cast<std::int8_t>(p1), -1}, 2, axis);
      const int p2 = board.neighbor(p1, axis);
      if (p2 < 0 || (own & bit(p2)) == 0) continue;
      handle_line({static_cast<std::int8_t>(p), static_cast<std::int8_t>(p1), static_cast<std::int8_t>(p2)}, 3,
                  axis);
    }
  }
  return !stopped;
}

inline std::vector<Move> legal_moves(const Board& board, const Constellation& c, Color mover) {
  std::vector<Move> moves;
  for_each_move(board, c, mover, [&](const Move& m, const Constellation&) { moves.push_back(m); });
  return moves;
}

inline std::vector<Move> legal_moves(const Board& board, const Constellation& c, Color mover,
                                     const GameConfig& config) {
  if (is_terminal(c, config) != Winner::None) throw std::logic_error("no moves in a finished game");
  return legal_moves(board, c, mover);
}

inline bool has_legal_move(const Board& board, const Constellation& c, Color mover) {
  const CellMask empty = board.all_cells() & ~c.occupied();
  for (CellMask rest = c.pieces(mover); rest != 0; rest &= rest - 1) {
    if ((board.neighbor_mask(std::countr_zero(rest)) & empty) != 0) return true;
  }
  // Every own marble is boxed in; only a sumito could still be possible.
  return !for_each_move(board, c, mover, [](const Move&, const Constellation&) { return false; });
}

// Applies a move that must be legal in `c`; throws std::logic_error otherwise.
inline Constellation apply_move(const Board& board, const Constellation& c, const Move& move) {
  std::optional<Constellation> result;
  for_each_move(board, c, move.mover, [&](const Move& m, const Constellation& next) {
    if (m == move) result = next;
    return !result;
  });
  if (!result) throw std::logic_error("illegal move " + move_notation(move));
  return *result;
}

// Finds the legal move written as e.g. "fg-S".
inline std::optional<Move> find_move(const Board& board, const Constellation& c, Color mover,
                                     std::string_view notation) {
  std::optional<Move> found;
  for_each_move(board, c, mover, [&](const Move& m, const Constellation&) {
    if (move_notation(m) == notation) found = m;
    return !found;
  });
  return found;
}

}  // namespace abalone
