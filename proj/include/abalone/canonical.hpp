#pragma once

// Isomorphism classes of constellations: negation, symmetry images,
// canonical forms, options up to isomorphism, orbit counting and
// sub-configuration patterns.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "abalone/geometry.hpp"
#include "abalone/rules.hpp"

namespace abalone {

inline Constellation negate(const Constellation& c) {
  Constellation out;
  out.black = c.gray;
  out.gray = c.black;
  out.lost = {c.lost[1], c.lost[0]};
  return out;
}

inline Constellation transform(const Constellation& c, const Symmetry& sym) {
  Constellation out = c;
  out.black = sym.apply(c.black);
  out.gray = sym.apply(c.gray);
  return out;
}

// Lexicographic comparison of scan-order strings with '.' < 'B' < 'G'.
inline bool scan_less(const Constellation& x, const Constellation& y) {
  const CellMask diff = (x.black ^ y.black) | (x.gray ^ y.gray);
  if (diff == 0) return false;
  const int i = std::countr_zero(diff);
  return static_cast<int>(x.at(i)) < static_cast<int>(y.at(i));
}

inline bool same_cells(const Constellation& x, const Constellation& y) {
  return x.black == y.black && x.gray == y.gray;
}

// Scan-order-minimal image over the symmetry orbit, and over the negated
// orbit as well when identify_negation is set.
inline Constellation canonical_representative(const Board& board, const Constellation& c,
                                              bool identify_negation = false) {
  Constellation best = c;
  for (const auto& sym : board.symmetries()) {
    const Constellation img = transform(c, sym);
    if (scan_less(img, best)) best = img;
    if (identify_negation) {
      const Constellation neg = negate(img);
      if (scan_less(neg, best)) best = neg;
    }
  }
  return best;
}

struct CanonicalForm {
  std::string cells;  // scan-order serialization of the minimal image

  friend auto operator<=>(const CanonicalForm&, const CanonicalForm&) = default;
};

inline CanonicalForm canonicalize(const Board& board, const Constellation& c, bool identify_negation = false) {
  return CanonicalForm{cells_string(board, canonical_representative(board, c, identify_negation))};
}

inline bool isomorphic(const Board& board, const Constellation& x, const Constellation& y) {
  return same_cells(canonical_representative(board, x), canonical_representative(board, y));
}

inline bool self_negative(const Board& board, const Constellation& c) { return isomorphic(board, c, negate(c)); }

// Canonical forms of the distinct successors of `c` for `mover`.
inline std::vector<CanonicalForm> options_up_to_isomorphism(const Board& board, const Constellation& c, Color mover,
                                                            const GameConfig& config) {
  if (is_terminal(c, config) != Winner::None) throw std::logic_error("no options in a finished game");
  std::set<CanonicalForm> forms;
  for_each_move(board, c, mover, [&](const Move&, const Constellation& next) {
    forms.insert(canonicalize(board, next));
  });
  return {forms.begin(), forms.end()};
}

// ---------------------------------------------------------------------------
// Orbit counting.

namespace detail {

// Calls f for every placement of `nb` black and `ng` gray marbles.
template <class F>
void for_each_placement(int cells, int nb, int ng, F&& f) {
  Constellation c;
  std::function<void(int, int, int)> rec = [&](int i, int b, int g) {
    const int remaining = cells - i;
    if (b + g > remaining) return;
    if (i == cells) {
      f(std::as_const(c));
      return;
    }
    const CellMask bit = CellMask{1} << i;
    if (b + g < remaining) rec(i + 1, b, g);
    if (b > 0) {
      c.black |= bit;
      rec(i + 1, b - 1, g);
      c.black &= ~bit;
    }
    if (g > 0) {
      c.gray |= bit;
      rec(i + 1, b, g - 1);
      c.gray &= ~bit;
    }
  };
  rec(0, nb, ng);
}

inline std::vector<int> cycle_lengths(const Symmetry& sym) {
  std::vector<int> lengths;
  std::vector<bool> seen(sym.perm.size(), false);
  for (std::size_t i = 0; i < sym.perm.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(sym.perm[j])) {
      seen[j] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  return lengths;
}

using Wide = unsigned __int128;

// Colourings with exactly nb black and ng gray cells fixed by the symmetry;
// with `swapped`, fixed by the symmetry composed with the colour swap.
inline Wide fixed_colourings(const std::vector<int>& cycles, int nb, int ng, bool swapped) {
  std::vector<std::vector<Wide>> dp(static_cast<std::size_t>(nb + 1), std::vector<Wide>(static_cast<std::size_t>(ng + 1), 0));
  dp[0][0] = 1;
  for (int len : cycles) {
    auto next = dp;  // the all-empty choice
    for (int b = 0; b <= nb; ++b) {
      for (int g = 0; g <= ng; ++g) {
        const Wide ways = dp[static_cast<std::size_t>(b)][static_cast<std::size_t>(g)];
        if (ways == 0) continue;
        auto add = [&](int db, int dg, Wide mult) {
          if (b + db <= nb && g + dg <= ng) {
            next[static_cast<std::size_t>(b + db)][static_cast<std::size_t>(g + dg)] += ways * mult;
          }
        };
        if (!swapped) {
          add(len, 0, 1);
          add(0, len, 1);
        } else if (len % 2 == 0) {
          add(len / 2, len / 2, 2);
        }
      }
    }
    dp = std::move(next);
  }
  return dp[static_cast<std::size_t>(nb)][static_cast<std::size_t>(ng)];
}

}  // namespace detail

// Number of isomorphism classes of placements with the given marble counts,
// by explicit canonicalisation.  With identify_negation the placements with
// the counts swapped are included and negation joins the group.  `each`
// receives every class representative (the fixed points of canonicalisation).
inline std::uint64_t enumerate_classes(const Board& board, int black_count, int gray_count, bool identify_negation,
                                       const std::function<void(const Constellation&)>& each = {}) {
  if (black_count < 0 || gray_count < 0 || black_count + gray_count > board.cell_count()) {
    throw std::invalid_argument("marble counts do not fit on the board");
  }
  std::uint64_t count = 0;
  auto visit = [&](const Constellation& c) {
    if (same_cells(canonical_representative(board, c, identify_negation), c)) {
      ++count;
      if (each) each(c);
    }
  };
  detail::for_each_placement(board.cell_count(), black_count, gray_count, visit);
  if (identify_negation && black_count != gray_count) {
    detail::for_each_placement(board.cell_count(), gray_count, black_count, visit);
  }
  return count;
}

// The same count via Burnside's lemma over the cycle structure of each
// symmetry (and each symmetry composed with negation when flagged).
inline std::uint64_t burnside_count(const Board& board, int black_count, int gray_count, bool identify_negation) {
  if (black_count < 0 || gray_count < 0 || black_count + gray_count > board.cell_count()) {
    throw std::invalid_argument("marble counts do not fit on the board");
  }
  detail::Wide total = 0;
  for (const auto& sym : board.symmetries()) {
    const auto cycles = detail::cycle_lengths(sym);
    total += detail::fixed_colourings(cycles, black_count, gray_count, false);
    if (!identify_negation) continue;
    if (black_count == gray_count) {
      total += detail::fixed_colourings(cycles, black_count, gray_count, true);
    } else {
      total += detail::fixed_colourings(cycles, gray_count, black_count, false);
    }
  }
  const auto group = static_cast<detail::Wide>(board.symmetries().size() * (identify_negation ? 2 : 1));
  if (total % group != 0) throw std::logic_error("Burnside sum not divisible by group order");
  const detail::Wide result = total / group;
  if (result > UINT64_MAX) throw std::overflow_error("class count exceeds 64 bits");
  return static_cast<std::uint64_t>(result);
}

// ---------------------------------------------------------------------------
// Patterns: partial constellations, written in board notation with '?' for
// cells that may hold anything.

struct Pattern {
  BoardShape shape;
  CellMask must_black = 0;
  CellMask must_gray = 0;
  CellMask must_empty = 0;

  [[nodiscard]] bool satisfied_by(const Constellation& c) const {
    return (c.black & must_black) == must_black && (c.gray & must_gray) == must_gray &&
           (c.occupied() & must_empty) == 0;
  }
};

inline Pattern parse_pattern(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("pattern needs a ':'");
  Pattern p;
  p.shape = parse_shape(text.substr(0, colon));
  const std::string_view cells = text.substr(colon + 1);
  if (static_cast<int>(cells.size()) != p.shape.expected_cell_count()) {
    throw std::invalid_argument("pattern length does not match board " + p.shape.to_string());
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const CellMask bit = CellMask{1} << i;
    switch (cells[i]) {
      case 'B': p.must_black |= bit; break;
      case 'G': p.must_gray |= bit; break;
      case '.': p.must_empty |= bit; break;
      case '?': break;
      default: throw std::invalid_argument(std::string("bad pattern character '") + cells[i] + "'");
    }
  }
  return p;
}

// True if some symmetry image of `c` satisfies the pattern.
inline bool match_pattern(const Board& board, const Constellation& c, const Pattern& pattern) {
  if (!(board.shape() == pattern.shape)) throw std::invalid_argument("pattern is for a different board");
  return std::any_of(board.symmetries().begin(), board.symmetries().end(),
                     [&](const Symmetry& sym) { return pattern.satisfied_by(transform(c, sym)); });
}

}  // namespace abalone
