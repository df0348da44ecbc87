// abalone: solve, count, classify and play small-board Abalone.

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "abalone/canonical.hpp"
#include "abalone/fixtures.hpp"
#include "abalone/geometry.hpp"
#include "abalone/rules.hpp"
#include "abalone/service.hpp"
#include "abalone/service_http.hpp"
#include "abalone/solver.hpp"
#include "abalone/store.hpp"

namespace {

using namespace abalone;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

FixtureSet fixtures_from(const std::string& path) {
  return path.empty() ? FixtureSet::builtin() : FixtureSet::load(path);
}

// Accepts a fixture name ("C0", "-B5") or board notation.
Constellation read_board(const SolvedDatabase& db, const std::string& text, const FixtureSet& fixtures) {
  if (text.find(':') == std::string::npos) {
    if (!fixtures.has_board(text)) throw UsageError("unknown board '" + text + "'");
    if (!(fixtures.board(text).shape == db.shape)) throw UsageError(text + " is not a " + db.shape.to_string() + " board");
    GameConfig config{db.shape, db.k, db.marbles, {}};
    return config.with_lost_counts(fixtures.constellation(text));
  }
  GameConfig config{db.shape, db.k, db.marbles, {}};
  return config.position(text);
}

std::string describe(const GameValue& v) { return to_string(v); }

// Draws the board column by column; each cell shows its label and contents.
std::string render(const Board& board, const Constellation& c) {
  int qmin = 1 << 20, qmax = -(1 << 20), hmin = 1 << 20, hmax = -(1 << 20);
  for (int i = 0; i < board.cell_count(); ++i) {
    const CellCoord x = board.coord(i);
    qmin = std::min(qmin, x.q);
    qmax = std::max(qmax, x.q);
    hmin = std::min(hmin, x.height());
    hmax = std::max(hmax, x.height());
  }
  const int width = 5 * (qmax - qmin) + 4;
  std::vector<std::string> rows(static_cast<std::size_t>(hmax - hmin + 1), std::string(static_cast<std::size_t>(width), ' '));
  for (int i = 0; i < board.cell_count(); ++i) {
    const CellCoord x = board.coord(i);
    auto& row = rows[static_cast<std::size_t>(hmax - x.height())];
    const std::string label = Board::cell_label(i);
    const std::string cell = label + (label.size() == 1 ? ":" : "") + piece_char(c.at(i));
    row.replace(static_cast<std::size_t>(5 * (x.q - qmin)), cell.size(), cell);
  }
  std::string out;
  for (auto& row : rows) {
    while (!row.empty() && row.back() == ' ') row.pop_back();
    out += "  " + row + "\n";
  }
  return out;
}

std::shared_ptr<const SolvedDatabase> open_db(const std::string& path) {
  return std::make_shared<const SolvedDatabase>(load(path));
}

// --- subcommands -------------------------------------------------------------

struct SolveArgs {
  std::string shape;
  int k = 1;
  std::string initial;
  std::string out;
  unsigned workers = 0;
  bool no_distances = false;
  bool quiet = false;
};

int cmd_solve(const SolveArgs& args) {
  const BoardShape shape = parse_shape(args.shape);
  const FixtureSet& fixtures = FixtureSet::builtin();
  std::string start_name;
  std::optional<GameConfig> config;
  if (!args.initial.empty()) {
    if (args.initial.find(':') == std::string::npos) {
      start_name = args.initial;
      config = make_config(shape, args.k, fixtures.constellation(args.initial));
      if (!(fixtures.board(args.initial).shape == shape)) throw UsageError(args.initial + " is not a " + args.shape + " board");
    } else {
      config = make_config(args.initial, args.k);
      if (!(config->shape == shape)) throw UsageError("--initial is not a " + args.shape + " board");
    }
  } else {
    const auto name = default_start(shape);
    if (!name) throw UsageError("no default starting position for " + args.shape + "; pass --initial");
    start_name = *name;
    config = default_config(shape, args.k);
  }

  SolveOptions options;
  options.workers = args.workers;
  options.keep_distances = !args.no_distances;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  if (!args.quiet) {
    options.progress = [&](const std::string& msg) {
      std::cerr << "[" << std::fixed << std::setprecision(1) << elapsed() << "s] " << msg << "\n";
    };
  }
  const SolvedDatabase db = solve(*config, options);
  const double seconds = elapsed();

  std::size_t wins = 0, losses = 0;
  for (std::uint64_t i = 0; i < db.space.size(); ++i) {
    const auto v = db.values.get(i);
    wins += v == ValueCode::Win;
    losses += v == ValueCode::Loss;
  }
  std::cout << "game " << shape.to_string() << " K=" << db.k << " marbles=" << db.marbles << "\n";
  std::cout << "states " << db.space.size() << " (wins " << wins << ", losses " << losses << ", draws "
            << db.space.size() - wins - losses << ", stalemates " << db.stalemates << ")\n";
  std::cout << "solve time " << std::fixed << std::setprecision(2) << seconds << " s\n";

  const Constellation& start = config->initial;
  const std::string label = start_name.empty() ? to_notation(*db.board, start) : start_name;
  const GameValue vb = value(db, start, Color::Black);
  const GameValue vg = value(db, start, Color::Gray);
  const std::string cls = outcome_name(outcome_class(db, start));
  const bool conjecture = args.k == 2 && (shape == BoardShape{2, 3, 3} || shape == BoardShape{3, 3, 3});
  const std::string prefix = conjecture ? "CONJECTURE: " : "";
  std::cout << prefix << "o(" << label << ") = " << cls << "  [black to move: " << describe(vb)
            << "; gray to move: " << describe(vg) << "]\n";
  if (conjecture && start_name == "D0") std::cout << "CONJECTURE: expected D for D0; computed " << cls << "\n";
  if (conjecture && start_name == "E0") std::cout << "CONJECTURE: expected N for E0; computed " << cls << "\n";

  if (!args.out.empty()) {
    save(db, args.out);
    std::cout << "wrote " << args.out << "\n";
  }
  return 0;
}

struct EnumerateArgs {
  std::string shape;
  int black = 0;
  int gray = 0;
  bool identify_negation = false;
  std::string method = "explicit";
  bool list = false;
};

int cmd_enumerate(const EnumerateArgs& args) {
  const Board board(parse_shape(args.shape));
  std::optional<std::uint64_t> explicit_count, burnside;
  if (args.method != "burnside") {
    std::function<void(const Constellation&)> each;
    if (args.list) each = [&](const Constellation& c) { std::cout << to_notation(board, c) << "\n"; };
    explicit_count = enumerate_classes(board, args.black, args.gray, args.identify_negation, each);
  }
  if (args.method != "explicit") burnside = burnside_count(board, args.black, args.gray, args.identify_negation);
  if (explicit_count && burnside) {
    std::cout << "explicit " << *explicit_count << "\nburnside " << *burnside << "\n";
    return *explicit_count == *burnside ? 0 : 1;
  }
  std::cout << (explicit_count ? *explicit_count : *burnside) << "\n";
  return 0;
}

int cmd_classify(const std::string& db_path, const std::string& board_text, bool verbose) {
  const auto db = open_db(db_path);
  const Constellation c = read_board(*db, board_text, FixtureSet::builtin());
  if (is_terminal(c, db->k) != Winner::None) {
    std::cout << "terminal: " << winner_name(is_terminal(c, db->k)) << "\n";
    return 0;
  }
  std::cout << outcome_name(outcome_class(*db, c)) << "\n";
  if (verbose) {
    std::cout << "black to move: " << describe(value(*db, c, Color::Black)) << "\n";
    std::cout << "gray to move: " << describe(value(*db, c, Color::Gray)) << "\n";
  }
  return 0;
}

int cmd_table(const std::string& db_path, const std::string& fixture_path, bool verify) {
  const FixtureSet fixtures = fixtures_from(fixture_path);
  if (verify) {
    const auto problems = verify_fixtures(fixtures);
    for (const auto& p : problems) std::cerr << "fixture problem: " << p << "\n";
    if (!problems.empty()) return 1;
    std::cerr << "fixtures verified\n";
  }
  const auto db = open_db(db_path);
  const auto names = fixtures.boards_on(db->shape);
  if (names.empty()) throw UsageError("no fixture boards for " + db->shape.to_string());
  std::cout << "board  o(C)    o(-C)\n";
  for (const auto& name : names) {
    const Constellation c = read_board(*db, name, fixtures);
    const std::string neg = self_negative(*db->board, c) ? "-" : outcome_name(outcome_class(*db, negate(c)));
    std::ostringstream line;
    line << std::left << std::setw(7) << name << std::setw(8) << outcome_name(outcome_class(*db, c)) << neg;
    std::cout << line.str() << "\n";
  }
  return 0;
}

int cmd_best(const std::string& db_path, const std::string& board_text, const std::string& to_move) {
  const auto db = open_db(db_path);
  const Constellation c = read_board(*db, board_text, FixtureSet::builtin());
  const Color mover = parse_color(to_move);
  std::cout << render(*db->board, c);
  std::cout << color_name(mover) << " to move: " << describe(value(*db, c, mover)) << "\n";
  for (const auto& rm : best_moves(*db, c, mover)) {
    std::ostringstream line;
    line << "  " << std::left << std::setw(8) << move_notation(rm.move) << std::setw(20) << move_description(rm.move)
         << describe(rm.value);
    std::cout << line.str() << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& db_path) {
  const auto db = open_db(db_path);
  const auto report = verify_fixpoint(*db);
  std::cout << "states " << report.states << " wins " << report.wins << " losses " << report.losses << " draws "
            << report.draws << "\n";
  for (const auto& e : report.examples) std::cout << "  " << e << "\n";
  std::cout << "violations " << report.violations << "\n";
  return report.violations == 0 ? 0 : 1;
}

int cmd_census(const std::string& db_path, int black, int gray) {
  const auto db = open_db(db_path);
  const Census census = class_census(*db, {black, gray});
  for (auto o : {OutcomeClass::L, OutcomeClass::R, OutcomeClass::D, OutcomeClass::N, OutcomeClass::NHat,
                 OutcomeClass::NCheck, OutcomeClass::XPrevWin, OutcomeClass::XGD, OutcomeClass::XDB}) {
    std::cout << std::left << std::setw(10) << outcome_name(o) << census.count(o) << "\n";
  }
  std::cout << std::left << std::setw(10) << "total" << census.total << "\n";
  return 0;
}

struct PlayArgs {
  std::string db;
  std::string board;
  std::string human = "black";
  std::string to_move = "black";
  int ply_cap = 200;
  bool blind = false;
};

// Text-mode game against the database.  Only legal moves are offered; the
// outcome class is announced after every ply.
int cmd_play(const PlayArgs& args) {
  const auto db = open_db(args.db);
  Constellation c;
  if (!args.board.empty()) {
    c = read_board(*db, args.board, FixtureSet::builtin());
  } else {
    const auto config = default_config(db->shape, db->k);
    if (!config) throw UsageError("no default start for " + db->shape.to_string() + "; pass --board");
    c = config->initial;
  }
  const std::optional<Color> human = args.human == "none" ? std::nullopt : std::optional(parse_color(args.human));
  Color mover = parse_color(args.to_move);
  auto announce = [&] {
    std::cout << render(*db->board, c);
    if (is_terminal(c, db->k) == Winner::None) {
      std::cout << "outcome class: " << outcome_name(outcome_class(*db, c)) << "\n";
    }
  };
  announce();
  for (int ply = 0;; ++ply) {
    const Winner w = is_terminal(c, db->k);
    if (w != Winner::None) {
      std::cout << "game over: " << winner_name(w) << "\n";
      return 0;
    }
    if (!has_legal_move(*db->board, c, mover)) {
      std::cout << color_name(mover) << " has no legal move\ngame over: " << winner_name(winner_for(other(mover))) << "\n";
      return 0;
    }
    if (ply >= args.ply_cap) {
      std::cout << "game over: draw-by-cap after " << ply << " plies\n";
      return 0;
    }
    Move chosen;
    if (human && *human == mover) {
      auto moves = legal_moves(*db->board, c, mover);
      std::sort(moves.begin(), moves.end(), [](const Move& x, const Move& y) { return x.order_key() < y.order_key(); });
      std::cout << color_name(mover) << " to move. Legal moves:\n";
      for (std::size_t i = 0; i < moves.size(); ++i) {
        std::cout << "  " << std::setw(2) << i + 1 << ") " << std::left << std::setw(8) << move_notation(moves[i])
                  << std::setw(20) << move_description(moves[i]);
        if (!args.blind) std::cout << describe(value(*db, apply_move(*db->board, c, moves[i]), other(mover)));
        std::cout << std::right << "\n";
      }
      for (;;) {
        std::cout << "> " << std::flush;
        std::string input;
        if (!std::getline(std::cin, input) || input == "quit" || input == "q") {
          std::cout << "\n";
          return 0;
        }
        const auto found = std::find_if(moves.begin(), moves.end(), [&](const Move& m) {
          return move_notation(m) == input || std::to_string(&m - moves.data() + 1) == input;
        });
        if (found != moves.end()) {
          chosen = *found;
          break;
        }
        std::cout << "not a legal move; enter a number or a move such as " << move_notation(moves.front()) << "\n";
      }
    } else {
      chosen = best_moves(*db, c, mover).front().move;
      std::cout << color_name(mover) << " (engine) plays " << move_notation(chosen) << "\n";
    }
    c = apply_move(*db->board, c, chosen);
    mover = other(mover);
    announce();
  }
}

struct ServeArgs {
  std::vector<std::string> dbs;
  std::string host = "127.0.0.1";
  int port = 8080;
  int ply_cap = 200;
  std::string snapshot;
};

int cmd_serve(const ServeArgs& args) {
  std::vector<std::shared_ptr<const SolvedDatabase>> dbs;
  for (const auto& path : args.dbs) {
    dbs.push_back(open_db(path));
    std::cerr << "loaded " << path << " (" << dbs.back()->shape.to_string() << " K=" << dbs.back()->k << ")\n";
  }
  ServiceOptions options;
  options.ply_cap = args.ply_cap;
  if (!args.snapshot.empty()) options.snapshot = args.snapshot;
  Service service(std::move(dbs), options);
  httplib::Server server;
  bind_http(server, service);
  std::cerr << "listening on http://" << args.host << ":" << args.port << "\n";
  if (!server.listen(args.host, args.port)) {
    std::cerr << "cannot listen on " << args.host << ":" << args.port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exhaustive solver for small-board Abalone"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Strongly solve a board and report the start position");
  solve_cmd->add_option("--shape", solve_args.shape, "Side lengths a,b,c")->required();
  solve_cmd->add_option("--k", solve_args.k, "Marbles to push off to win")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--initial", solve_args.initial, "Start position: fixture name or board notation");
  solve_cmd->add_option("--out", solve_args.out, "Database file to write");
  solve_cmd->add_option("--workers", solve_args.workers, "Worker threads (0 = all cores)");
  solve_cmd->add_flag("--no-distances", solve_args.no_distances, "Do not keep distance-to-end");
  solve_cmd->add_flag("--quiet", solve_args.quiet, "No progress output");

  EnumerateArgs enum_args;
  auto* enum_cmd = app.add_subcommand("enumerate", "Count nonisomorphic placements");
  enum_cmd->add_option("--shape", enum_args.shape, "Side lengths a,b,c")->required();
  enum_cmd->add_option("--black", enum_args.black, "Black marbles")->required()->check(CLI::NonNegativeNumber);
  enum_cmd->add_option("--gray", enum_args.gray, "Gray marbles")->required()->check(CLI::NonNegativeNumber);
  enum_cmd->add_flag("--identify-negation", enum_args.identify_negation, "Also identify C with -C");
  enum_cmd->add_option("--method", enum_args.method, "explicit, burnside or both")
      ->check(CLI::IsMember({"explicit", "burnside", "both"}));
  enum_cmd->add_flag("--list", enum_args.list, "Print each class representative");

  std::string db_path, board_text, fixture_path, to_move = "black";
  bool verbose = false, verify_fix = false;
  auto* classify_cmd = app.add_subcommand("classify", "Outcome class of a board");
  classify_cmd->add_option("--db", db_path, "Solved database")->required();
  classify_cmd->add_option("--board", board_text, "Board notation or fixture name")->required();
  classify_cmd->add_flag("--verbose", verbose, "Also print both values");

  auto* table_cmd = app.add_subcommand("table", "Outcome classes of the fixture boards on the database's shape");
  table_cmd->add_option("--db", db_path, "Solved database")->required();
  table_cmd->add_option("--fixtures", fixture_path, "Fixture file (default: built-in)");
  table_cmd->add_flag("--verify-fixtures", verify_fix, "Re-check the fixtures' known properties first");

  auto* best_cmd = app.add_subcommand("best", "Rank every legal move");
  best_cmd->add_option("--db", db_path, "Solved database")->required();
  best_cmd->add_option("--board", board_text, "Board notation or fixture name")->required();
  best_cmd->add_option("--to-move", to_move, "black or gray");

  auto* verify_cmd = app.add_subcommand("verify", "Audit a database against its own successors");
  verify_cmd->add_option("--db", db_path, "Solved database")->required();

  int census_black = -1, census_gray = -1;
  auto* census_cmd = app.add_subcommand("census", "Outcome classes over isomorphism classes");
  census_cmd->add_option("--db", db_path, "Solved database")->required();
  census_cmd->add_option("--black", census_black, "Only boards with this many black marbles");
  census_cmd->add_option("--gray", census_gray, "Only boards with this many gray marbles");

  PlayArgs play_args;
  auto* play_cmd = app.add_subcommand("play", "Text-mode game against the database");
  play_cmd->add_option("--db", play_args.db, "Solved database")->required();
  play_cmd->add_option("--board", play_args.board, "Start position (default: the shape's usual start)");
  play_cmd->add_option("--human", play_args.human, "black, gray or none")
      ->check(CLI::IsMember({"black", "gray", "none"}));
  play_cmd->add_option("--to-move", play_args.to_move, "Side to move first")->check(CLI::IsMember({"black", "gray"}));
  play_cmd->add_option("--ply-cap", play_args.ply_cap, "Plies before the game is declared drawn")->check(CLI::PositiveNumber);
  play_cmd->add_flag("--blind", play_args.blind, "Hide move values");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP play service");
  serve_cmd->add_option("--db", serve_args.dbs, "Solved database (repeatable)")->required();
  serve_cmd->add_option("--host", serve_args.host, "Address to bind");
  serve_cmd->add_option("--port", serve_args.port, "Port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--ply-cap", serve_args.ply_cap, "Plies per session before draw-by-cap")->check(CLI::PositiveNumber);
  serve_cmd->add_option("--snapshot", serve_args.snapshot, "JSON file to persist sessions in");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return cmd_solve(solve_args);
    if (*enum_cmd) return cmd_enumerate(enum_args);
    if (*classify_cmd) return cmd_classify(db_path, board_text, verbose);
    if (*table_cmd) return cmd_table(db_path, fixture_path, verify_fix);
    if (*best_cmd) return cmd_best(db_path, board_text, to_move);
    if (*verify_cmd) return cmd_verify(db_path);
    if (*census_cmd) return cmd_census(db_path, census_black, census_gray);
    if (*play_cmd) return cmd_play(play_args);
    if (*serve_cmd) return cmd_serve(serve_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
