#pragma once

// Retrograde win/loss/draw solving over the full (constellation, side to
// move) graph, outcome classes, optimal moves and an independent audit.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "abalone/canonical.hpp"
#include "abalone/geometry.hpp"
#include "abalone/retrograde.hpp"
#include "abalone/rules.hpp"
#include "abalone/store.hpp"

namespace abalone {

enum class Result : std::uint8_t { Draw = 0, BlackWin = 1, GrayWin = 2 };

inline const char* result_name(Result r) {
  switch (r) {
    case Result::BlackWin: return "BlackWin";
    case Result::GrayWin: return "GrayWin";
    case Result::Draw: break;
  }
  return "Draw";
}

constexpr Result win_for(Color c) { return c == Color::Black ? Result::BlackWin : Result::GrayWin; }

constexpr Result colour_swap(Result r) {
  return r == Result::BlackWin ? Result::GrayWin : r == Result::GrayWin ? Result::BlackWin : Result::Draw;
}

struct GameValue {
  Result result = Result::Draw;
  std::optional<int> distance;  // plies to the end of the game, for wins only

  friend bool operator==(const GameValue&, const GameValue&) = default;
};

inline std::string to_string(const GameValue& v) {
  std::string s = result_name(v.result);
  if (v.distance) s += " in " + std::to_string(*v.distance);
  return s;
}

// The pair (value with Black to move, value with Gray to move), named.
enum class OutcomeClass : std::uint8_t { L, R, D, N, NHat, NCheck, XPrevWin, XGD, XDB };

inline OutcomeClass classify_pair(Result black_to_move, Result gray_to_move) {
  using enum Result;
  if (black_to_move == BlackWin && gray_to_move == BlackWin) return OutcomeClass::L;
  if (black_to_move == GrayWin && gray_to_move == GrayWin) return OutcomeClass::R;
  if (black_to_move == Draw && gray_to_move == Draw) return OutcomeClass::D;
  if (black_to_move == BlackWin && gray_to_move == GrayWin) return OutcomeClass::N;
  if (black_to_move == BlackWin && gray_to_move == Draw) return OutcomeClass::NHat;
  if (black_to_move == Draw && gray_to_move == GrayWin) return OutcomeClass::NCheck;
  if (black_to_move == GrayWin && gray_to_move == BlackWin) return OutcomeClass::XPrevWin;
  if (black_to_move == GrayWin && gray_to_move == Draw) return OutcomeClass::XGD;
  return OutcomeClass::XDB;
}

inline const char* outcome_name(OutcomeClass o) {
  switch (o) {
    case OutcomeClass::L: return "L";
    case OutcomeClass::R: return "R";
    case OutcomeClass::D: return "D";
    case OutcomeClass::N: return "N";
    case OutcomeClass::NHat: return "Nhat";
    case OutcomeClass::NCheck: return "Ncheck";
    case OutcomeClass::XPrevWin: return "X-PrevWin";
    case OutcomeClass::XGD: return "X-GD";
    case OutcomeClass::XDB: break;
  }
  return "X-DB";
}

inline bool is_named(OutcomeClass o) { return static_cast<int>(o) <= static_cast<int>(OutcomeClass::NCheck); }

// ---------------------------------------------------------------------------

struct SolveOptions {
  unsigned workers = 0;  // 0: all available cores
  bool keep_distances = true;
  std::function<void(const std::string&)> progress;
};

namespace detail {

inline unsigned worker_count(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

// Runs body(begin, end, worker) over [0, n) split into contiguous chunks.
template <class Body>
void parallel_for(std::uint64_t n, unsigned workers, Body&& body) {
  if (workers <= 1 || n < 1024) {
    body(std::uint64_t{0}, n, 0U);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = std::min(n, w * chunk);
    const std::uint64_t end = std::min(n, begin + chunk);
    pool.emplace_back([&body, begin, end, w] { body(begin, end, w); });
  }
  for (auto& t : pool) t.join();
}

inline std::vector<std::uint64_t> merge_sorted(std::vector<std::vector<std::uint64_t>>& parts) {
  std::vector<std::uint64_t> out;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  out.reserve(total);
  for (auto& p : parts) {
    out.insert(out.end(), p.begin(), p.end());
    std::vector<std::uint64_t>().swap(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Strongly solves every non-terminal state with each colour's lost count
// below K.  Layer n of the retrograde sweep holds the states decided in
// exactly n plies: even layers are losses for the side to move, odd layers
// wins.  Each state counts its successors not yet known to be wins for the
// opponent; it becomes a loss when that count reaches zero.  Unlabelled
// states are draws.
inline SolvedDatabase solve(const GameConfig& config, const SolveOptions& options = {}) {
  SolvedDatabase db = SolvedDatabase::empty_for(config.shape, config.k, config.marbles);
  const Board& board = *db.board;
  const StateSpace& space = db.space;
  const std::uint64_t n = space.size();
  const unsigned workers = detail::worker_count(options.workers);
  if (options.keep_distances) db.distances.assign(static_cast<std::size_t>(n), kNoDistance);
  std::vector<std::uint8_t> remaining(static_cast<std::size_t>(n), 0);
  auto report = [&](const std::string& msg) {
    if (options.progress) options.progress(msg);
  };

  auto label = [&](std::uint64_t index, ValueCode code, int layer) {
    if (!db.values.claim(index, code)) return false;
    if (options.keep_distances) {
      if (layer >= kNoDistance) throw std::overflow_error("distance exceeds 16 bits");
      db.distances[static_cast<std::size_t>(index)] = static_cast<std::uint16_t>(layer);
    }
    return true;
  };

  // Layer 0: stalemated states.  Layer 1 seeds: a move completes the K-th ejection.
  std::vector<std::vector<std::uint64_t>> losses0(workers), wins1(workers);
  std::vector<std::uint64_t> stalemate_counts(workers, 0);
  detail::parallel_for(space.constellation_count(), workers, [&](std::uint64_t begin, std::uint64_t end, unsigned w) {
    for (std::uint64_t r = begin; r < end; ++r) {
      const Constellation c = space.unrank(r);
      for (Color mover : {Color::Black, Color::Gray}) {
        const std::uint64_t index = 2 * r + static_cast<std::uint64_t>(index_of(mover));
        const bool can_finish = c.lost_by(other(mover)) + 1 >= config.k;
        int moves = 0;
        bool wins_now = false;
        for_each_move(board, c, mover, [&](const Move& m, const Constellation&) {
          ++moves;
          wins_now = wins_now || (can_finish && m.ejects);
        });
        if (moves > 255) throw std::overflow_error("more than 255 moves from one position");
        remaining[static_cast<std::size_t>(index)] = static_cast<std::uint8_t>(moves);
        if (moves == 0) {
          ++stalemate_counts[w];
          if (label(index, ValueCode::Loss, 0)) losses0[w].push_back(index);
        } else if (wins_now && label(index, ValueCode::Win, 1)) {
          wins1[w].push_back(index);
        }
      }
    }
  });
  for (auto s : stalemate_counts) db.stalemates += s;
  std::vector<std::uint64_t> frontier = detail::merge_sorted(losses0);
  std::vector<std::uint64_t> pending_wins = detail::merge_sorted(wins1);
  report("seeded: " + std::to_string(db.stalemates) + " stalemates, " + std::to_string(pending_wins.size()) +
         " immediate wins");

  for (int layer = 0; !frontier.empty() || !pending_wins.empty(); ++layer) {
    const bool losses = layer % 2 == 0;
    std::vector<std::vector<std::uint64_t>> found(workers);
    detail::parallel_for(frontier.size(), workers, [&](std::uint64_t begin, std::uint64_t end, unsigned w) {
      std::vector<std::uint64_t> preds;
      for (std::uint64_t i = begin; i < end; ++i) {
        const auto [c, to_move] = space.state(frontier[static_cast<std::size_t>(i)]);
        const Color mover = other(to_move);
        preds.clear();
        for_each_predecessor(board, c, mover, [&](const Constellation& previous) {
          preds.push_back(space.index(previous, mover));
        });
        // each edge must be counted once
        std::sort(preds.begin(), preds.end());
        preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
        for (const std::uint64_t index : preds) {
          if (db.values.load(index) != ValueCode::Draw) continue;
          if (losses) {
            if (label(index, ValueCode::Win, layer + 1)) found[w].push_back(index);
          } else if (std::atomic_ref<std::uint8_t>(remaining[static_cast<std::size_t>(index)]).fetch_sub(1) == 1) {
            if (label(index, ValueCode::Loss, layer + 1)) found[w].push_back(index);
          }
        }
      }
    });
    std::vector<std::uint64_t> next = detail::merge_sorted(found);
    if (losses && !pending_wins.empty()) {
      // Immediate wins belong to layer 1 alongside wins found from layer 0.
      next.insert(next.end(), pending_wins.begin(), pending_wins.end());
      std::vector<std::uint64_t>().swap(pending_wins);
      std::sort(next.begin(), next.end());
    }
    if (!next.empty()) report("layer " + std::to_string(layer + 1) + ": " + std::to_string(next.size()) + " states");
    frontier = std::move(next);
  }
  return db;
}

// ---------------------------------------------------------------------------

inline ValueCode stored_code(const SolvedDatabase& db, const Constellation& c, Color to_move) {
  if (!db.space.contains(c)) throw std::out_of_range("constellation is not in this database");
  return db.values.get(db.space.index(c, to_move));
}

inline GameValue value(const SolvedDatabase& db, const Constellation& c, Color to_move) {
  const Winner w = is_terminal(c, db.k);
  if (w != Winner::None) return {w == Winner::Black ? Result::BlackWin : Result::GrayWin, 0};
  if (!db.space.contains(c)) throw std::out_of_range("constellation is not in this database");
  const std::uint64_t index = db.space.index(c, to_move);
  const ValueCode code = db.values.get(index);
  GameValue v;
  if (code == ValueCode::Draw) return v;
  v.result = code == ValueCode::Win ? win_for(to_move) : win_for(other(to_move));
  if (db.has_distances()) v.distance = db.distances[static_cast<std::size_t>(index)];
  return v;
}

inline OutcomeClass outcome_class(const SolvedDatabase& db, const Constellation& c) {
  return classify_pair(value(db, c, Color::Black).result, value(db, c, Color::Gray).result);
}

struct RankedMove {
  Move move;
  Constellation result;
  GameValue value;  // of the successor, with the opponent to move
};

namespace detail {

// Higher is better for the mover: wins (sooner first), draws, losses (later first).
inline long move_score(const GameValue& v, Color mover) {
  const long d = v.distance.value_or(0);
  if (v.result == win_for(mover)) return 200000 - d;
  if (v.result == Result::Draw) return 0;
  return -200000 + d;
}

}  // namespace detail

// Every legal move with its successor's value, best first for the mover;
// equal values keep scan order of source cells, then direction.
inline std::vector<RankedMove> best_moves(const SolvedDatabase& db, const Constellation& c, Color to_move) {
  if (is_terminal(c, db.k) != Winner::None) throw std::logic_error("no moves in a finished game");
  std::vector<RankedMove> out;
  for_each_move(*db.board, c, to_move, [&](const Move& m, const Constellation& next) {
    out.push_back({m, next, value(db, next, other(to_move))});
  });
  std::stable_sort(out.begin(), out.end(), [&](const RankedMove& x, const RankedMove& y) {
    const long sx = detail::move_score(x.value, to_move);
    const long sy = detail::move_score(y.value, to_move);
    if (sx != sy) return sx > sy;
    return x.move.order_key() < y.move.order_key();
  });
  return out;
}

struct Census {
  std::map<OutcomeClass, std::uint64_t> counts;
  std::uint64_t total = 0;

  [[nodiscard]] std::uint64_t count(OutcomeClass o) const {
    auto it = counts.find(o);
    return it == counts.end() ? 0 : it->second;
  }
  [[nodiscard]] std::uint64_t unnamed() const {
    return count(OutcomeClass::XPrevWin) + count(OutcomeClass::XGD) + count(OutcomeClass::XDB);
  }
};

struct MarbleFilter {
  int black = -1;  // -1: any
  int gray = -1;
};

// Outcome classes over isomorphism classes (symmetry only) of the stored constellations.
inline Census class_census(const SolvedDatabase& db, MarbleFilter filter = {}) {
  Census census;
  for (std::uint64_t r = 0; r < db.space.constellation_count(); ++r) {
    const Constellation c = db.space.unrank(r);
    if (filter.black >= 0 && c.count(Color::Black) != filter.black) continue;
    if (filter.gray >= 0 && c.count(Color::Gray) != filter.gray) continue;
    if (!same_cells(canonical_representative(*db.board, c), c)) continue;
    ++census.counts[outcome_class(db, c)];
    ++census.total;
  }
  return census;
}

struct FixpointReport {
  std::uint64_t states = 0;
  std::uint64_t violations = 0;
  std::uint64_t draws = 0;
  std::uint64_t wins = 0;
  std::uint64_t losses = 0;
  std::vector<std::string> examples;  // first few violations
};

// Re-checks every stored label against its successors using forward move
// generation only.
inline FixpointReport verify_fixpoint(const SolvedDatabase& db) {
  FixpointReport report;
  const Board& board = *db.board;
  auto fail = [&](std::uint64_t index, const std::string& why) {
    ++report.violations;
    if (report.examples.size() < 10) {
      const auto [c, mover] = db.space.state(index);
      report.examples.push_back(to_notation(board, c) + " " + color_name(mover) + " to move: " + why);
    }
  };
  for (std::uint64_t index = 0; index < db.space.size(); ++index) {
    ++report.states;
    const auto [c, mover] = db.space.state(index);
    const ValueCode code = db.values.get(index);
    bool any_loss = false;
    bool any_draw = false;
    bool any_move = false;
    int min_loss = std::numeric_limits<int>::max();
    int max_win = -1;
    for_each_move(board, c, mover, [&](const Move&, const Constellation& next) {
      any_move = true;
      if (is_terminal(next, db.k) != Winner::None) {
        any_loss = true;
        min_loss = 0;
        return;
      }
      const std::uint64_t j = db.space.index(next, other(mover));
      const ValueCode succ = db.values.get(j);
      const int d = db.has_distances() ? db.distances[static_cast<std::size_t>(j)] : 0;
      if (succ == ValueCode::Loss) {
        any_loss = true;
        min_loss = std::min(min_loss, d);
      } else if (succ == ValueCode::Draw) {
        any_draw = true;
      } else {
        max_win = std::max(max_win, d);
      }
    });
    const int dist = db.has_distances() ? db.distances[static_cast<std::size_t>(index)] : 0;
    switch (code) {
      case ValueCode::Win:
        ++report.wins;
        if (!any_loss) fail(index, "win without a losing successor");
        else if (db.has_distances() && dist != min_loss + 1) fail(index, "win distance is not 1 + shortest loss");
        break;
      case ValueCode::Loss:
        ++report.losses;
        if (any_loss || any_draw) fail(index, "loss with a non-winning successor");
        else if (db.has_distances() && dist != (any_move ? max_win + 1 : 0)) fail(index, "loss distance mismatch");
        break;
      case ValueCode::Draw:
        ++report.draws;
        if (any_loss) fail(index, "draw with a losing successor");
        else if (!any_draw) fail(index, "draw without a drawing successor");
        break;
      default:
        fail(index, "invalid value code");
    }
  }
  return report;
}

}  // namespace abalone
