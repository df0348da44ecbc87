#pragma once

// Un-move generation: the positions from which one legal move reaches a
// given constellation.

#include <bit>

#include "abalone/geometry.hpp"
#include "abalone/rules.hpp"

namespace abalone {

// Calls f(previous) for every constellation `previous` such that `mover`
// has a legal move from `previous` to `c`.  The same predecessor may be
// reported more than once.
//
// Non-pushing moves are their own inverses.  A sumito is undone by a
// "pull": the mover's line steps back into the empty cell behind it and
// drags the opposing marbles after it, restoring an ejected marble when the
// opposing line reaches the board edge.
template <class F>
void for_each_predecessor(const Board& board, const Constellation& c, Color mover, F&& f) {
  for_each_move(board, c, mover, [&](const Move& m, const Constellation& previous) {
    if (!m.is_sumito()) f(previous);
  });

  const Color opponent = other(mover);
  const CellMask own = c.pieces(mover);
  const CellMask opp = c.pieces(opponent);
  const CellMask empty = board.all_cells() & ~(own | opp);
  auto bit = [](int cell) { return CellMask{1} << cell; };

  for (CellMask rest = empty; rest != 0; rest &= rest - 1) {
    const int behind = std::countr_zero(rest);
    for (int d = 0; d < kNumDirections; ++d) {
      const auto dir = static_cast<Direction>(d);
      // The mover's line after the push: exactly 2 or 3 marbles starting next to `behind`.
      int run = 0;
      int lead = -1;
      int x = board.neighbor(behind, dir);
      while (x >= 0 && (own & bit(x)) != 0 && run < 4) {
        ++run;
        lead = x;
        x = board.neighbor(x, dir);
      }
      if (run < 2 || run > 3) continue;
      if (x >= 0 && (empty & bit(x)) != 0) continue;

      // Opposing marbles directly ahead of the line.
      int opp_run = 0;
      int y = x;
      std::array<int, 3> opp_cells{-1, -1, -1};
      while (y >= 0 && (opp & bit(y)) != 0) {
        if (opp_run < 3) opp_cells[static_cast<std::size_t>(opp_run)] = y;
        ++opp_run;
        y = board.neighbor(y, dir);
      }

      Constellation base = c;
      base.pieces(mover) = (own | bit(behind)) & ~bit(lead);
      base.pieces(opponent) = opp | bit(lead);

      // Pushed `pushed` marbles onto empty cells: the last of them was at opp_cells[pushed - 1].
      for (int pushed = 1; pushed < run && pushed <= opp_run; ++pushed) {
        Constellation previous = base;
        previous.pieces(opponent) &= ~bit(opp_cells[static_cast<std::size_t>(pushed - 1)]);
        f(previous);
      }
      // Pushed the whole opposing run plus one marble off the edge.
      if (y < 0 && opp_run + 1 < run && c.lost_by(opponent) >= 1) {
        Constellation previous = base;
        --previous.lost[static_cast<std::size_t>(index_of(opponent))];
        f(previous);
      }
    }
  }
}

}  // namespace abalone
