#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "abalone/fixtures.hpp"
#include "abalone/rules.hpp"
#include "abalone/store.hpp"
#include "support.hpp"

using namespace abalone;
using abalone::testing::fixture;
using abalone::testing::position;

namespace {

std::set<std::string> notations(const std::vector<Move>& moves) {
  std::set<std::string> out;
  for (const auto& m : moves) out.insert(move_notation(m));
  return out;
}

// Straightforward move generator on raw axial coordinates: every set of 1-3
// own marbles in a straight contiguous line, every direction, rules applied
// literally.  Returns (move notation, successor) pairs.
std::vector<std::pair<std::string, Constellation>> oracle_moves(const Board& board, const Constellation& c,
                                                                Color mover) {
  const Color opp = other(mover);
  auto cell_at = [&](int q, int r) { return board.find(CellCoord{q, r}); };
  auto owner = [&](int cell) -> int {
    if (cell < 0) return -1;
    if ((c.pieces(mover) >> cell) & 1U) return 1;
    if ((c.pieces(opp) >> cell) & 1U) return 2;
    return 0;
  };
  std::vector<std::vector<int>> groups;
  std::vector<int> own;
  for (int i = 0; i < board.cell_count(); ++i) {
    if (owner(i) == 1) own.push_back(i);
  }
  for (int x : own) {
    groups.push_back({x});
    for (int y : own) {
      if (y <= x) continue;
      const CellCoord a = board.coord(x), b = board.coord(y);
      const int dq = b.q - a.q, dr = b.r - a.r;
      const bool adjacent = std::any_of(kAxialStep.begin(), kAxialStep.end(),
                                        [&](auto s) { return s.first == dq && s.second == dr; });
      if (!adjacent) continue;
      groups.push_back({x, y});
      const int z = cell_at(b.q + dq, b.r + dr);
      if (owner(z) == 1) groups.push_back({x, y, z});
    }
  }
  std::vector<std::pair<std::string, Constellation>> out;
  for (auto group : groups) {
    std::sort(group.begin(), group.end());
    int axis_dq = 0, axis_dr = 0;
    if (group.size() > 1) {
      axis_dq = board.coord(group[1]).q - board.coord(group[0]).q;
      axis_dr = board.coord(group[1]).r - board.coord(group[0]).r;
    }
    for (int d = 0; d < 6; ++d) {
      const auto [dq, dr] = kAxialStep[static_cast<std::size_t>(d)];
      const bool inline_move = group.size() == 1 || (dq == axis_dq && dr == axis_dr) || (dq == -axis_dq && dr == -axis_dr);
      Constellation next = c;
      std::string name;
      for (int g : group) name += Board::cell_label(g);
      name += std::string("-") + direction_name(static_cast<Direction>(d));
      if (!inline_move) {
        bool ok = true;
        for (int g : group) ok = ok && owner(cell_at(board.coord(g).q + dq, board.coord(g).r + dr)) == 0;
        if (!ok) continue;
        for (int g : group) next.pieces(mover) &= ~(CellMask{1} << g);
        for (int g : group) next.pieces(mover) |= CellMask{1} << cell_at(board.coord(g).q + dq, board.coord(g).r + dr);
        out.emplace_back(name, next);
        continue;
      }
      // the lead marble is the one whose next cell is not part of the group
      int lead = -1;
      for (int g : group) {
        const int ahead = cell_at(board.coord(g).q + dq, board.coord(g).r + dr);
        if (std::find(group.begin(), group.end(), ahead) == group.end()) lead = g;
      }
      int q = board.coord(lead).q + dq, r = board.coord(lead).r + dr;
      const int target = cell_at(q, r);
      if (target < 0 || owner(target) == 1) continue;
      std::vector<int> pushed;
      int beyond = target;
      while (owner(beyond) == 2) {
        pushed.push_back(beyond);
        q += dq;
        r += dr;
        beyond = cell_at(q, r);
      }
      if (!pushed.empty() && (pushed.size() >= group.size() || owner(beyond) == 1)) continue;
      for (int g : group) next.pieces(mover) &= ~(CellMask{1} << g);
      for (int g : group) next.pieces(mover) |= CellMask{1} << cell_at(board.coord(g).q + dq, board.coord(g).r + dr);
      for (int p : pushed) next.pieces(opp) &= ~(CellMask{1} << p);
      for (int p : pushed) {
        const int to = cell_at(board.coord(p).q + dq, board.coord(p).r + dr);
        if (to >= 0) next.pieces(opp) |= CellMask{1} << to;
        else ++next.lost[static_cast<std::size_t>(index_of(opp))];
      }
      out.emplace_back(name, next);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

std::vector<std::pair<std::string, Constellation>> engine_moves(const Board& board, const Constellation& c,
                                                                Color mover) {
  std::vector<std::pair<std::string, Constellation>> out;
  for_each_move(board, c, mover, [&](const Move& m, const Constellation& next) {
    out.emplace_back(move_notation(m), next);
  });
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

Constellation random_position(const Board& board, int nb, int ng, std::mt19937_64& rng) {
  std::vector<int> cells(static_cast<std::size_t>(board.cell_count()));
  for (int i = 0; i < board.cell_count(); ++i) cells[static_cast<std::size_t>(i)] = i;
  std::shuffle(cells.begin(), cells.end(), rng);
  Constellation c;
  for (int i = 0; i < nb + ng; ++i) c.set(cells[static_cast<std::size_t>(i)], i < nb ? Piece::Black : Piece::Gray);
  return c;
}

}  // namespace

TEST(Rules, B0BlackHasSixMoves) {
  const Board board({2, 2, 2});
  const auto moves = legal_moves(board, fixture("B0"), Color::Black);
  EXPECT_EQ(moves.size(), 6U);
  EXPECT_EQ(notations(moves), (std::set<std::string>{"ab-NE", "ab-SE", "a-NE", "a-SE", "b-NE", "b-SE"}));
}

TEST(Rules, TwoOnOnePushDownward) {
  // black f,g above gray e in the centre column
  const Board board({2, 2, 3});
  const Constellation c = position("2,2,3:....GBB...", 3);
  const auto m = find_move(board, c, Color::Black, "fg-S");
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->pushed, 1);
  EXPECT_FALSE(m->ejects);
  EXPECT_EQ(move_description(*m), "2 on 1 push");
  const Constellation next = apply_move(board, c, *m);
  EXPECT_EQ(cells_string(board, next), "...GBB....");
  // gray cannot push back: one against two
  EXPECT_FALSE(find_move(board, c, Color::Gray, "e-N").has_value());
}

TEST(Rules, ForkOffersTwoEjections) {
  const Board board({2, 2, 3});
  const Constellation c = position("2,2,3:.B..BB.G.G", 3);
  std::set<std::string> ejections;
  for (const auto& m : legal_moves(board, c, Color::Black)) {
    if (m.ejects) ejections.insert(move_notation(m));
  }
  EXPECT_EQ(ejections, (std::set<std::string>{"bf-NE", "be-SE"}));
  const Constellation after = apply_move(board, c, *find_move(board, c, Color::Black, "bf-NE"));
  EXPECT_EQ(after.lost_by(Color::Gray), 2);
  EXPECT_EQ(after.at(9), Piece::Black);  // the pushing line now reaches j
  EXPECT_EQ(is_terminal(after, 1), Winner::Black);
}

TEST(Rules, SumitoNeedsStrictlyLongerLine) {
  // 3,3,3 columns hold 3,4,5,4,3 cells; the centre column is h..l.
  const Board board({3, 3, 3});
  const GameConfig g{board.shape(), 2, 4, {}};
  auto pos = [&](const std::string& centre) {
    return g.with_lost_counts(parse_notation("3,3,3:......." + centre + ".......").constellation);
  };
  EXPECT_FALSE(find_move(board, pos("BBGG."), Color::Black, "hi-N").has_value());  // 2 on 2
  EXPECT_FALSE(find_move(board, pos("BG..."), Color::Black, "h-N").has_value());   // 1 on 1
  EXPECT_FALSE(find_move(board, pos("BBGB."), Color::Black, "hi-N").has_value());  // own marble behind
  EXPECT_FALSE(find_move(board, pos("BBBGB"), Color::Black, "hij-N").has_value());

  auto m = find_move(board, pos("BBBGG"), Color::Black, "hij-N");  // 3 on 2 at the edge
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->pushed, 2);
  EXPECT_TRUE(m->ejects);
  Constellation next = apply_move(board, pos("BBBGG"), *m);
  EXPECT_EQ(next.lost_by(Color::Gray), pos("BBBGG").lost_by(Color::Gray) + 1);
  EXPECT_EQ(next.count(Color::Gray), 1);

  m = find_move(board, pos("BBBG."), Color::Black, "hij-N");  // 3 on 1
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->pushed, 1);
  EXPECT_FALSE(m->ejects);
  EXPECT_EQ(cells_string(board, apply_move(board, pos("BBBG."), *m)).substr(7, 5), ".BBBG");

  m = find_move(board, pos("BBG.G"), Color::Black, "hi-N");  // 2 on 1 into a gap
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(cells_string(board, apply_move(board, pos("BBG.G"), *m)).substr(7, 5), ".BBGG");
}

TEST(Rules, NoOwnMarbleLeavesTheBoard) {
  const Board board({2, 2, 2});
  const Constellation c = position("2,2,2:BB...GG", 2);
  EXPECT_FALSE(find_move(board, c, Color::Black, "a-S").has_value());
  EXPECT_FALSE(find_move(board, c, Color::Black, "ab-N").has_value());
  EXPECT_FALSE(find_move(board, c, Color::Black, "ab-S").has_value());
}

TEST(Rules, BroadsideNeverPushes) {
  const Board board({2, 2, 3});
  // black a,b side by side, gray d in front of a
  const Constellation c = position("2,2,3:BB.G......", 3);
  for (const auto& m : legal_moves(board, c, Color::Black)) {
    if (m.kind == MoveKind::Broadside) {
      EXPECT_EQ(m.pushed, 0);
      EXPECT_EQ(m.source_mask() & c.black, m.source_mask());
    }
  }
}

TEST(Rules, MatchesLiteralOracleOnEvery223Position) {
  const Board board({2, 2, 3});
  const StateSpace space(board.cell_count(), 3, 1);
  for (std::uint64_t r = 0; r < space.constellation_count(); ++r) {
    const Constellation c = space.unrank(r);
    for (Color mover : {Color::Black, Color::Gray}) {
      ASSERT_EQ(engine_moves(board, c, mover), oracle_moves(board, c, mover)) << to_notation(board, c);
    }
  }
}

TEST(Rules, MatchesLiteralOracleOnRandomLargerPositions) {
  std::mt19937_64 rng(7);
  for (BoardShape shape : {BoardShape{2, 3, 3}, BoardShape{3, 3, 3}, BoardShape{3, 4, 5}, BoardShape{5, 5, 5}}) {
    const Board board(shape);
    for (int trial = 0; trial < 400; ++trial) {
      const int nb = 1 + static_cast<int>(rng() % 8);
      const int ng = 1 + static_cast<int>(rng() % 8);
      if (nb + ng > board.cell_count()) continue;
      const Constellation c = random_position(board, nb, ng, rng);
      for (Color mover : {Color::Black, Color::Gray}) {
        ASSERT_EQ(engine_moves(board, c, mover), oracle_moves(board, c, mover)) << to_notation(board, c);
      }
    }
  }
}

TEST(Rules, ConservationAndDistinctSuccessors) {
  std::mt19937_64 rng(11);
  for (BoardShape shape : {BoardShape{2, 2, 3}, BoardShape{3, 3, 3}}) {
    const Board board(shape);
    for (int trial = 0; trial < 500; ++trial) {
      const Constellation c = random_position(board, 3 + static_cast<int>(rng() % 3), 3 + static_cast<int>(rng() % 3), rng);
      for (Color mover : {Color::Black, Color::Gray}) {
        std::set<std::pair<CellMask, CellMask>> seen;
        int moves = 0;
        for_each_move(board, c, mover, [&](const Move& m, const Constellation& next) {
          ++moves;
          seen.insert({next.black, next.gray});
          EXPECT_EQ(next.count(mover), c.count(mover));
          EXPECT_EQ(next.lost_by(mover), c.lost_by(mover));
          EXPECT_EQ(next.count(other(mover)) + next.lost_by(other(mover)),
                    c.count(other(mover)) + c.lost_by(other(mover)));
          EXPECT_EQ(next.lost_by(other(mover)) - c.lost_by(other(mover)), m.ejects ? 1 : 0);
          EXPECT_EQ(next.black & next.gray, 0U);
          if (m.is_sumito()) {
            EXPECT_GT(m.count, m.pushed);
            EXPECT_LE(m.pushed, 2);
            EXPECT_EQ(m.kind, MoveKind::InLine);
          }
        });
        EXPECT_EQ(static_cast<int>(seen.size()), moves) << to_notation(board, c);
      }
    }
  }
}

TEST(Rules, ApplyAndFindMove) {
  const Board board({2, 2, 2});
  const Constellation c = fixture("B0");
  EXPECT_FALSE(find_move(board, c, Color::Black, "a-S").has_value());
  Move bogus;
  bogus.mover = Color::Black;
  bogus.cells = {0, -1, -1};
  bogus.count = 1;
  bogus.direction = Direction::S;
  EXPECT_THROW(apply_move(board, c, bogus), std::logic_error);
  const auto m = find_move(board, c, Color::Black, "ab-NE");
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(apply_move(board, c, *m).black & c.black, 0U);
}

TEST(Rules, TerminalAndStalemate) {
  const GameConfig config = make_config("2,2,3:G.BG..BG.B", 1);
  Constellation c = config.position("2,2,3:G.BG..BG..");
  EXPECT_EQ(c.lost_by(Color::Black), 1);
  EXPECT_EQ(is_terminal(c, config), Winner::Gray);
  EXPECT_THROW(legal_moves(Board(config.shape), c, Color::Black, config), std::logic_error);
  // black boxed in the corner column by gray walls
  const Board board({2, 2, 2});
  const Constellation boxed = position("2,2,2:BGGG...", 3);
  EXPECT_EQ(has_legal_move(board, boxed, Color::Black), !legal_moves(board, boxed, Color::Black).empty());
}

TEST(Rules, NotationErrors) {
  EXPECT_THROW(parse_notation("2,2,2:BB..GG"), std::invalid_argument);
  EXPECT_THROW(parse_notation("2,2,2:BB...GX"), std::invalid_argument);
  EXPECT_THROW(parse_notation("2,2,2"), std::invalid_argument);
  EXPECT_THROW(make_config("2,2,2:BBB..GG", 1), std::invalid_argument);
  EXPECT_THROW(make_config("2,2,2:BB...GG", 0), std::invalid_argument);
  EXPECT_EQ(to_notation(Board({2, 2, 2}), parse_notation("2,2,2:GB...BG").constellation), "2,2,2:GB...BG");
}
