#pragma once

// Play sessions over solved databases, exposed as JSON request handling.
// The HTTP binding lives in service_http.hpp; everything here is callable
// without a socket.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "abalone/fixtures.hpp"
#include "abalone/rules.hpp"
#include "abalone/solver.hpp"
#include "abalone/store.hpp"

namespace abalone {

using json = nlohmann::json;

struct Response {
  int status = 200;
  json body;
};

struct ServiceOptions {
  int ply_cap = 200;                       // plies before a session ends as draw-by-cap
  std::optional<std::string> snapshot;     // JSON file holding the sessions, rewritten after each change
};

struct Session {
  std::string id;
  std::shared_ptr<const SolvedDatabase> db;
  GameConfig config;
  Constellation start;
  Color start_to_move = Color::Black;
  Constellation current;
  Color to_move = Color::Black;
  Color human = Color::Black;
  std::vector<std::string> history;  // move notations from `start`
};

namespace detail {

inline json value_json(const GameValue& v) {
  json out{{"result", result_name(v.result)}, {"distance", nullptr}};
  if (v.distance) out["distance"] = *v.distance;
  return out;
}

inline json layout_json(const Board& board) {
  json cells = json::array();
  for (int i = 0; i < board.cell_count(); ++i) {
    const CellCoord c = board.coord(i);
    cells.push_back({{"label", Board::cell_label(i)}, {"q", c.q}, {"r", c.r}});
  }
  return cells;
}

inline json move_json(const Board& board, const Move& m) {
  json cells = json::array();
  json targets = json::array();
  const auto sorted = m.sorted_cells();
  for (int i = 0; i < m.count; ++i) {
    const int cell = sorted[static_cast<std::size_t>(i)];
    cells.push_back(Board::cell_label(cell));
    const int to = board.neighbor(cell, m.direction);
    if (to >= 0) targets.push_back(Board::cell_label(to));
  }
  return {{"move", move_notation(m)},
          {"cells", cells},
          {"targets", targets},
          {"direction", direction_name(m.direction)},
          {"kind", m.kind == MoveKind::Broadside ? "broadside" : "in-line"},
          {"description", move_description(m)},
          {"pushed", m.pushed},
          {"ejects", m.ejects}};
}

}  // namespace detail

class Service {
 public:
  explicit Service(std::vector<std::shared_ptr<const SolvedDatabase>> dbs, ServiceOptions options = {})
      : options_(std::move(options)) {
    if (options_.ply_cap < 1) throw std::invalid_argument("ply cap must be positive");
    for (auto& db : dbs) databases_[key(db->shape, db->k)] = std::move(db);
    if (options_.snapshot && std::filesystem::exists(*options_.snapshot)) restore(*options_.snapshot);
  }

  Response handle(std::string_view method, std::string_view path, std::string_view body = {}) {
    try {
      return route(method, split(path), body);
    } catch (const json::exception& e) {
      return error(400, std::string("bad JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
      return error(400, e.what());
    }
  }

  [[nodiscard]] std::size_t session_count() const {
    std::lock_guard lock(sessions_mutex_);
    return sessions_.size();
  }

  // Copy of a session, for tests and tools.
  [[nodiscard]] std::optional<Session> session(const std::string& id) const {
    auto slot = find(id);
    if (!slot) return std::nullopt;
    std::lock_guard lock(slot->mutex);
    return slot->session;
  }

 private:
  struct Slot {
    std::mutex mutex;
    Session session;
  };

  static std::string key(BoardShape shape, int k) { return shape.to_string() + "/" + std::to_string(k); }

  static std::vector<std::string> split(std::string_view path) {
    if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
      while (i < path.size() && path[i] == '/') ++i;
      const std::size_t j = path.find('/', i);
      const std::size_t end = j == std::string_view::npos ? path.size() : j;
      if (end > i) parts.emplace_back(path.substr(i, end - i));
      i = end;
    }
    return parts;
  }

  static Response error(int status, const std::string& message) { return {status, json{{"error", message}}}; }

  Response route(std::string_view method, const std::vector<std::string>& parts, std::string_view body) {
    if (parts.size() == 1 && parts[0] == "databases" && method == "GET") return list_databases();
    if (parts.empty() || parts[0] != "sessions") return error(404, "no such endpoint");
    if (parts.size() == 1) {
      if (method == "POST") return create(body);
      return error(405, "use POST /sessions");
    }
    auto slot = find(parts[1]);
    if (!slot) return error(404, "unknown session " + parts[1]);
    if (parts.size() == 2 && method == "GET") return locked(*slot, [&](Session& s) { return Response{200, state_json(s)}; });
    if (parts.size() == 3 && parts[2] == "moves" && method == "GET") {
      return locked(*slot, [&](Session& s) { return Response{200, moves_json(s)}; });
    }
    if (parts.size() == 3 && parts[2] == "moves" && method == "POST") {
      const json request = body.empty() ? json::object() : json::parse(body);
      if (!request.contains("move") || !request["move"].is_string()) throw std::invalid_argument("body needs a \"move\" string");
      return mutate(*slot, [&](Session& s) { return human_move(s, request["move"].get<std::string>()); });
    }
    if (parts.size() == 3 && parts[2] == "engine-move" && method == "POST") {
      return mutate(*slot, [&](Session& s) { return engine_move(s); });
    }
    return error(404, "no such endpoint");
  }

  template <class F>
  Response locked(Slot& slot, F&& f) {
    std::lock_guard lock(slot.mutex);
    return f(slot.session);
  }

  template <class F>
  Response mutate(Slot& slot, F&& f) {
    Response r = locked(slot, f);
    if (r.status < 300) persist();
    return r;
  }

  std::shared_ptr<Slot> find(const std::string& id) const {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  Response list_databases() const {
    json out = json::array();
    for (const auto& [name, db] : databases_) {
      out.push_back({{"shape", db->shape.to_string()}, {"k", db->k}, {"marbles", db->marbles},
                     {"states", db->space.size()}, {"distances", db->has_distances()}});
    }
    return {200, json{{"databases", out}}};
  }

  Response create(std::string_view body) {
    const json request = body.empty() ? json::object() : json::parse(body);
    std::optional<BoardShape> shape;
    std::optional<ParsedBoard> board;
    if (request.contains("board")) {
      board = parse_notation(request.at("board").get<std::string>());
      shape = board->shape;
    }
    if (request.contains("shape")) {
      const BoardShape s = parse_shape(request.at("shape").get<std::string>());
      if (shape && !(*shape == s)) throw std::invalid_argument("board does not match shape");
      shape = s;
    }
    if (!shape) throw std::invalid_argument("body needs \"shape\" or \"board\"");
    const int k = request.value("k", 1);
    auto it = databases_.find(key(*shape, k));
    if (it == databases_.end()) return error(503, "no database loaded for " + shape->to_string() + " K=" + std::to_string(k));

    Session s;
    s.db = it->second;
    if (board) {
      s.start = board->constellation;
    } else {
      const auto name = default_start(*shape);
      if (!name) throw std::invalid_argument("no default start for " + shape->to_string() + "; give \"board\"");
      s.start = FixtureSet::builtin().constellation(*name);
    }
    s.config = make_config(*shape, k, s.start);
    if (s.config.marbles != s.db->marbles) {
      // The stored space fixes the starting marble count; missing marbles count as lost.
      s.config.marbles = s.db->marbles;
      s.start = s.config.with_lost_counts(s.start);
      s.config.initial = s.start;
    }
    if (is_terminal(s.start, k) == Winner::None && !s.db->space.contains(s.start)) {
      throw std::invalid_argument("position is not covered by the loaded database");
    }
    s.start_to_move = parse_color(request.value("to_move", std::string("black")));
    s.human = parse_color(request.value("human", std::string("black")));
    s.current = s.start;
    s.to_move = s.start_to_move;

    json state;
    {
      std::lock_guard lock(sessions_mutex_);
      s.id = std::to_string(++next_id_);
      auto slot = std::make_shared<Slot>();
      slot->session = std::move(s);
      state = state_json(slot->session);
      sessions_.emplace(slot->session.id, slot);
    }
    persist();
    return {201, state};
  }

  // in-progress, black-wins, gray-wins or draw-by-cap.
  [[nodiscard]] std::string status(const Session& s) const {
    const Winner w = is_terminal(s.current, s.config.k);
    if (w != Winner::None) return winner_name(w);
    if (!has_legal_move(*s.db->board, s.current, s.to_move)) return winner_name(winner_for(other(s.to_move)));
    if (static_cast<int>(s.history.size()) >= options_.ply_cap) return "draw-by-cap";
    return "in-progress";
  }

  json state_json(const Session& s) const {
    const Board& board = *s.db->board;
    const std::string st = status(s);
    json out{{"id", s.id},
             {"shape", s.config.shape.to_string()},
             {"k", s.config.k},
             {"board", to_notation(board, s.current)},
             {"start", to_notation(board, s.start)},
             {"layout", detail::layout_json(board)},
             {"to_move", color_name(s.to_move)},
             {"human", color_name(s.human)},
             {"lost", {{"black", s.current.lost_by(Color::Black)}, {"gray", s.current.lost_by(Color::Gray)}}},
             {"ply", s.history.size()},
             {"ply_cap", options_.ply_cap},
             {"status", st},
             {"terminal", st != "in-progress"},
             {"history", s.history},
             {"value", detail::value_json(value(*s.db, s.current, s.to_move))},
             {"outcome_class", nullptr}};
    if (is_terminal(s.current, s.config.k) == Winner::None) out["outcome_class"] = outcome_name(outcome_class(*s.db, s.current));
    return out;
  }

  json moves_json(const Session& s) const {
    json moves = json::array();
    if (status(s) == "in-progress") {
      std::vector<std::pair<Move, Constellation>> all;
      for_each_move(*s.db->board, s.current, s.to_move, [&](const Move& m, const Constellation& next) {
        all.emplace_back(m, next);
      });
      std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first.order_key() < y.first.order_key(); });
      for (const auto& [m, next] : all) {
        json entry = detail::move_json(*s.db->board, m);
        entry["result"] = to_notation(*s.db->board, next);
        entry["value"] = detail::value_json(value(*s.db, next, other(s.to_move)));
        moves.push_back(std::move(entry));
      }
    }
    return {{"id", s.id}, {"to_move", color_name(s.to_move)}, {"status", status(s)}, {"moves", moves}};
  }

  void play(Session& s, const Move& m) {
    s.current = apply_move(*s.db->board, s.current, m);
    s.history.push_back(move_notation(m));
    s.to_move = other(s.to_move);
  }

  Response human_move(Session& s, const std::string& notation) {
    if (status(s) != "in-progress") return error(409, "game is over (" + status(s) + ")");
    if (s.to_move != s.human) return error(409, "it is the engine's turn");
    const auto m = find_move(*s.db->board, s.current, s.to_move, notation);
    if (!m) return error(409, "illegal move " + notation);
    play(s, *m);
    return {200, state_json(s)};
  }

  Response engine_move(Session& s) {
    if (status(s) != "in-progress") return error(409, "game is over (" + status(s) + ")");
    if (s.to_move == s.human) return error(409, "it is the human's turn");
    const auto ranked = best_moves(*s.db, s.current, s.to_move);
    const Move chosen = ranked.front().move;
    play(s, chosen);
    json out = state_json(s);
    out["engine_move"] = detail::move_json(*s.db->board, chosen);
    return {200, out};
  }

  // --- snapshots -----------------------------------------------------------

  void persist() {
    if (!options_.snapshot) return;
    json sessions = json::array();
    std::uint64_t next_id = 0;
    std::vector<std::shared_ptr<Slot>> slots;
    {
      std::lock_guard lock(sessions_mutex_);
      next_id = next_id_;
      for (const auto& [id, slot] : sessions_) slots.push_back(slot);
    }
    for (const auto& slot : slots) {
      std::lock_guard lock(slot->mutex);
      const Session& s = slot->session;
      sessions.push_back({{"id", s.id},
                          {"shape", s.config.shape.to_string()},
                          {"k", s.config.k},
                          {"start", to_notation(*s.db->board, s.start)},
                          {"to_move", color_name(s.start_to_move)},
                          {"human", color_name(s.human)},
                          {"history", s.history}});
    }
    std::lock_guard lock(snapshot_mutex_);
    const std::string tmp = *options_.snapshot + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << json{{"next_id", next_id}, {"sessions", sessions}}.dump(2) << "\n";
      if (!out) throw std::runtime_error("cannot write snapshot " + tmp);
    }
    std::filesystem::rename(tmp, *options_.snapshot);
  }

  // Rebuilds sessions by replaying their histories, so a snapshot can never
  // smuggle in an illegal position.
  void restore(const std::string& path) {
    std::ifstream in(path);
    const json snap = json::parse(in);
    for (const auto& entry : snap.at("sessions")) {
      const BoardShape shape = parse_shape(entry.at("shape").get<std::string>());
      const int k = entry.at("k").get<int>();
      auto it = databases_.find(key(shape, k));
      if (it == databases_.end()) continue;  // database not loaded this time
      Session s;
      s.id = entry.at("id").get<std::string>();
      s.db = it->second;
      s.config = make_config(shape, k, parse_notation(entry.at("start").get<std::string>()).constellation);
      s.config.marbles = s.db->marbles;
      s.start = s.config.with_lost_counts(s.config.initial);
      s.config.initial = s.start;
      s.start_to_move = parse_color(entry.at("to_move").get<std::string>());
      s.human = parse_color(entry.at("human").get<std::string>());
      s.current = s.start;
      s.to_move = s.start_to_move;
      for (const auto& notation : entry.at("history")) {
        const auto m = find_move(*s.db->board, s.current, s.to_move, notation.get<std::string>());
        if (!m) throw std::runtime_error("snapshot session " + s.id + " replays an illegal move");
        play(s, *m);
      }
      auto slot = std::make_shared<Slot>();
      slot->session = std::move(s);
      sessions_.emplace(slot->session.id, slot);
    }
    next_id_ = snap.value("next_id", std::uint64_t{0});
  }

  ServiceOptions options_;
  std::map<std::string, std::shared_ptr<const SolvedDatabase>> databases_;
  mutable std::mutex sessions_mutex_;
  std::mutex snapshot_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_id_ = 0;
};

}  // namespace abalone
