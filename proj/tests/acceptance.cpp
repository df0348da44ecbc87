// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   acceptance [--large]
//
// --large (or ABALONE_LARGE=1) adds the 3,3,3 K=2 solve to the reported
// larger-board runs.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

#include "abalone/canonical.hpp"
#include "abalone/fixtures.hpp"
#include "abalone/solver.hpp"
#include "abalone/store.hpp"
#include "oracle.hpp"

using namespace abalone;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// A criterion body appends to `why` and returns false on failure.
using Check = std::function<bool(std::ostringstream& why)>;

int failures = 0;

void criterion(const std::string& label, const Check& body) {
  std::ostringstream why;
  const auto t0 = Clock::now();
  bool ok = false;
  try {
    ok = body(why);
  } catch (const std::exception& e) {
    why << "exception: " << e.what();
  }
  std::ostringstream line;
  line << (ok ? "PASS " : "FAIL ") << label << " (" << std::fixed << std::setprecision(2) << seconds_since(t0) << " s)";
  if (!why.str().empty()) line << ": " << why.str();
  std::cout << line.str() << std::endl;
  if (!ok) ++failures;
}

Constellation fx(const std::string& name) { return FixtureSet::builtin().constellation(name); }

SolvedDatabase solve_with(BoardShape shape, int k, unsigned workers) {
  SolveOptions options;
  options.workers = workers;
  return solve(*default_config(shape, k), options);
}

std::string file_bytes(const SolvedDatabase& db) {
  const auto path = std::filesystem::temp_directory_path() / ("abalone_accept_" + std::to_string(::getpid()) + ".db");
  save(db, path.string());
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  std::filesystem::remove(path);
  return buf.str();
}

// Which side has a move from `from` to a position isomorphic to `to`.
std::optional<Color> mover_between(const Board& board, const Constellation& from, const Constellation& to) {
  for (Color m : {Color::Black, Color::Gray}) {
    bool found = false;
    for_each_move(board, from, m, [&](const Move&, const Constellation& next) {
      found = found || isomorphic(board, next, to);
      return !found;
    });
    if (found) return m;
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  bool large = std::getenv("ABALONE_LARGE") != nullptr && std::string(std::getenv("ABALONE_LARGE")) == "1";
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--large") large = true;
  }

  std::optional<SolvedDatabase> db222, db223;

  criterion("outcome table 2,2,2: 23 named boards, solved and classified under 1 s", [&](std::ostringstream& why) {
    const auto t0 = Clock::now();
    db222 = solve_with({2, 2, 2}, 1, 1);
    const std::map<std::string, OutcomeClass> expected{
        {"B0", OutcomeClass::N},      {"B4", OutcomeClass::N},      {"B1", OutcomeClass::D},
        {"B2", OutcomeClass::D},      {"B3", OutcomeClass::D},      {"B6", OutcomeClass::D},
        {"-B6", OutcomeClass::D},     {"B9", OutcomeClass::D},      {"-B9", OutcomeClass::D},
        {"B10", OutcomeClass::D},     {"-B10", OutcomeClass::D},    {"B13", OutcomeClass::D},
        {"-B13", OutcomeClass::D},    {"B5", OutcomeClass::NHat},   {"-B5", OutcomeClass::NCheck},
        {"B7", OutcomeClass::NHat},   {"-B7", OutcomeClass::NCheck}, {"B8", OutcomeClass::NHat},
        {"-B8", OutcomeClass::NCheck}, {"B12", OutcomeClass::NHat}, {"-B12", OutcomeClass::NCheck},
        {"B11", OutcomeClass::L},     {"-B11", OutcomeClass::R}};
    bool ok = expected.size() == 23;
    for (const auto& [name, want] : expected) {
      const OutcomeClass got = outcome_class(*db222, fx(name));
      if (got != want) {
        why << name << "=" << outcome_name(got) << " (want " << outcome_name(want) << ") ";
        ok = false;
      }
    }
    const double t = seconds_since(t0);
    if (t >= 1.0) {
      why << "took " << t << " s";
      ok = false;
    }
    return ok;
  });

  criterion("class census 2,2,2 is L1 R1 N2 D11 Nhat4 Ncheck4 with no unnamed classes", [&](std::ostringstream& why) {
    const auto t0 = Clock::now();
    const Census census = class_census(*db222, {2, 2});
    for (const auto& [o, n] : census.counts) why << outcome_name(o) << ":" << n << " ";
    why << "total " << census.total;
    const bool counts = census.total == 23 && census.count(OutcomeClass::L) == 1 && census.count(OutcomeClass::R) == 1 &&
                        census.count(OutcomeClass::N) == 2 && census.count(OutcomeClass::D) == 11 &&
                        census.count(OutcomeClass::NHat) == 4 && census.count(OutcomeClass::NCheck) == 4 &&
                        census.unnamed() == 0;
    return counts && seconds_since(t0) < 1.0;
  });

  criterion("2,2,3 start position C0 is a draw with either side to move, under 5 s", [&](std::ostringstream& why) {
    const auto t0 = Clock::now();
    db223 = solve_with({2, 2, 3}, 1, 1);
    const GameValue b = value(*db223, fx("C0"), Color::Black);
    const GameValue g = value(*db223, fx("C0"), Color::Gray);
    why << "black to move " << to_string(b) << ", gray to move " << to_string(g);
    return b.result == Result::Draw && g.result == Result::Draw && seconds_since(t0) < 5.0;
  });

  criterion("from C0 only moves to C1 keep the draw; every other Black move loses", [&](std::ostringstream& why) {
    const Board& board = *db223->board;
    int draws = 0;
    int losses = 0;
    bool ok = true;
    for_each_move(board, fx("C0"), Color::Black, [&](const Move& m, const Constellation& next) {
      const Result r = value(*db223, next, Color::Gray).result;
      const bool to_c1 = isomorphic(board, next, fx("C1"));
      if (to_c1 ? r != Result::Draw : r != Result::GrayWin) {
        why << move_notation(m) << "=" << result_name(r) << " ";
        ok = false;
      }
      (r == Result::Draw ? draws : losses) += 1;
    });
    why << draws << " drawing, " << losses << " losing";
    return ok && draws > 0;
  });

  criterion("from C1 Gray has 7 distinct options and only C2 and C3 keep the draw", [&](std::ostringstream& why) {
    const Board& board = *db223->board;
    const auto forms = options_up_to_isomorphism(board, fx("C1"), Color::Gray, *default_config({2, 2, 3}, 1));
    std::map<CanonicalForm, Constellation> representatives;
    for_each_move(board, fx("C1"), Color::Gray, [&](const Move&, const Constellation& next) {
      representatives.emplace(canonicalize(board, next), next);
    });
    std::vector<Constellation> options;
    for (const auto& [form, next] : representatives) options.push_back(next);
    bool ok = options.size() == 7 && forms.size() == 7;
    why << options.size() << " options";
    int draws = 0;
    for (const auto& next : options) {
      const Result r = value(*db223, next, Color::Black).result;
      const bool safe = isomorphic(board, next, fx("C2")) || isomorphic(board, next, fx("C3"));
      if ((r == Result::Draw) != safe) {
        why << "; " << to_notation(board, next) << "=" << result_name(r);
        ok = false;
      }
      draws += r == Result::Draw;
    }
    why << ", " << draws << " drawing";
    return ok && draws == 2;
  });

  criterion("Black on both middle cells: outcome L, or N exactly when the neutral pattern is present (and mirrored)",
            [&](std::ostringstream& why) {
              const Board& board = *db223->board;
              const Pattern& neutral = FixtureSet::builtin().pattern("neutral");
              const CellMask middle = (CellMask{1} << board.parse_cell_label("e")) | (CellMask{1} << board.parse_cell_label("f"));
              std::uint64_t checked = 0, bad = 0, as_n = 0;
              for (std::uint64_t r = 0; r < db223->space.constellation_count(); ++r) {
                const Constellation c = db223->space.unrank(r);
                if (c.count(Color::Black) != 3 || c.count(Color::Gray) != 3) continue;
                const OutcomeClass o = outcome_class(*db223, c);
                if ((c.black & middle) == middle) {
                  ++checked;
                  const bool has = match_pattern(board, c, neutral);
                  as_n += has;
                  if (o != (has ? OutcomeClass::N : OutcomeClass::L)) ++bad;
                }
                if ((c.gray & middle) == middle) {
                  ++checked;
                  const bool has = match_pattern(board, negate(c), neutral);
                  if (o != (has ? OutcomeClass::N : OutcomeClass::R)) ++bad;
                }
              }
              why << checked << " positions checked, " << as_n << " with the pattern, " << bad << " exceptions";
              return checked > 0 && bad == 0;
            });

  criterion("every listed safe option in the 2,2,3 draw cycle leads to a drawn position", [&](std::ostringstream& why) {
    const Board& board = *db223->board;
    const std::vector<std::pair<std::string, std::string>> edges{
        {"C0", "C1"}, {"C1", "C2"}, {"C1", "C3"}, {"C2", "C4"}, {"C2", "C5"}, {"C3", "C4"}, {"C4", "C6"},
        {"C5", "C7"}, {"C6", "C8"}, {"C7", "C6"}, {"C7", "C8"}, {"C6", "-C8"}, {"C8", "C2"}, {"C8", "C3"}};
    bool ok = true;
    int checked = 0;
    for (const auto& [from, to] : edges) {
      for (bool neg : {false, true}) {
        const auto name = [&](const std::string& n) {
          if (!neg) return n;
          return n.starts_with('-') ? n.substr(1) : "-" + n;
        };
        const Constellation a = fx(name(from));
        const Constellation b = fx(name(to));
        const auto mover = mover_between(board, a, b);
        if (!mover) {
          why << name(from) << "->" << name(to) << " is not a move; ";
          ok = false;
          continue;
        }
        ++checked;
        const Result r = value(*db223, b, other(*mover)).result;
        if (r != Result::Draw) {
          why << name(from) << "->" << name(to) << "=" << result_name(r) << "; ";
          ok = false;
        }
      }
    }
    why << checked << " edges";
    return ok;
  });

  criterion("class counts 23 (2,2,2) and 1080 / 555 with negation (2,2,3), explicit and Burnside agree",
            [&](std::ostringstream& why) {
              const Board small({2, 2, 2});
              const Board medium({2, 2, 3});
              const std::uint64_t a = enumerate_classes(small, 2, 2, false);
              const std::uint64_t a2 = burnside_count(small, 2, 2, false);
              const std::uint64_t b = enumerate_classes(medium, 3, 3, false);
              const std::uint64_t b2 = burnside_count(medium, 3, 3, false);
              const std::uint64_t c = enumerate_classes(medium, 3, 3, true);
              const std::uint64_t c2 = burnside_count(medium, 3, 3, true);
              why << a << "/" << a2 << ", " << b << "/" << b2 << ", " << c << "/" << c2;
              return a == 23 && a2 == 23 && b == 1080 && b2 == 1080 && c == 555 && c2 == 555;
            });

  criterion("negation identity and isomorphism invariance on every state of both solved games",
            [&](std::ostringstream& why) {
              std::uint64_t bad = 0, states = 0;
              for (const SolvedDatabase* db : {&*db222, &*db223}) {
                for (std::uint64_t r = 0; r < db->space.constellation_count(); ++r) {
                  const Constellation c = db->space.unrank(r);
                  for (Color t : {Color::Black, Color::Gray}) {
                    ++states;
                    const GameValue v = value(*db, c, t);
                    const GameValue n = value(*db, negate(c), other(t));
                    if (n.result != colour_swap(v.result) || n.distance != v.distance) ++bad;
                    for (const auto& g : db->board->symmetries()) {
                      if (value(*db, transform(c, g), t) != v) ++bad;
                    }
                  }
                }
              }
              why << states << " states, " << bad << " mismatches";
              return bad == 0;
            });

  criterion("solved values satisfy the win/loss/draw fixpoint everywhere", [&](std::ostringstream& why) {
    bool ok = true;
    for (const SolvedDatabase* db : {&*db222, &*db223}) {
      const FixpointReport rep = verify_fixpoint(*db);
      why << db->shape.to_string() << ": " << rep.states << " states " << rep.violations << " violations; ";
      ok = ok && rep.violations == 0 && rep.states == db->space.size();
    }
    return ok;
  });

  criterion("depth-6 minimax agrees with every state decided within 6 plies", [&](std::ostringstream& why) {
    constexpr int kHorizon = 6;
    std::uint64_t decided = 0, bad = 0;
    for (const SolvedDatabase* db : {&*db222, &*db223}) {
      abalone::testing::Minimax oracle(*db);
      for (std::uint64_t i = 0; i < db->space.size(); ++i) {
        const auto [c, mover] = db->space.state(i);
        const ValueCode stored = db->values.get(i);
        const int distance = db->distances[static_cast<std::size_t>(i)];
        const auto found = oracle.solve(c, mover, kHorizon);
        if (stored != ValueCode::Draw && distance <= kHorizon) {
          ++decided;
          if (!found || found->first != stored || found->second != distance) ++bad;
        } else if (found) {
          ++bad;
        }
      }
    }
    why << decided << " decided states, " << bad << " disagreements";
    return decided > 0 && bad == 0;
  });

  criterion("solves with 1 and 4 workers write byte-identical database files", [&](std::ostringstream& why) {
    bool ok = true;
    for (auto [shape, k] : {std::pair{BoardShape{2, 2, 2}, 1}, std::pair{BoardShape{2, 2, 3}, 1},
                            std::pair{BoardShape{2, 2, 3}, 2}, std::pair{BoardShape{2, 3, 3}, 2}}) {
      const bool same = file_bytes(solve_with(shape, k, 1)) == file_bytes(solve_with(shape, k, 4));
      why << shape.to_string() << " K=" << k << (same ? " same; " : " DIFFERENT; ");
      ok = ok && same;
    }
    return ok;
  });

  criterion(std::string("larger boards solved and start outcome reported (2,3,3 K=2") + (large ? ", 3,3,3 K=2)" : ")"),
            [&](std::ostringstream& why) {
              std::vector<std::pair<BoardShape, std::string>> runs{{{2, 3, 3}, "D0"}};
              if (large) runs.push_back({{3, 3, 3}, "E0"});
              bool ok = true;
              for (const auto& [shape, start] : runs) {
                const auto t0 = Clock::now();
                SolveOptions options;
                options.keep_distances = false;
                const SolvedDatabase db = solve(*default_config(shape, 2), options);
                const Constellation c = fx(start);
                const OutcomeClass o = outcome_class(db, c);
                std::cout << "CONJECTURE: o(" << start << ") on " << shape.to_string() << " K=2 = " << outcome_name(o)
                          << " [black to move: " << to_string(value(db, c, Color::Black))
                          << "; gray to move: " << to_string(value(db, c, Color::Gray)) << "] " << db.space.size()
                          << " states, " << std::fixed << std::setprecision(1) << seconds_since(t0) << " s"
                          << std::endl;
                why << start << "=" << outcome_name(o) << " ";
                ok = ok && db.space.size() > 0;
              }
              if (!large) why << "(3,3,3 run with --large)";
              return ok;
            });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
