#pragma once

// Named boards and patterns used by the table, the tests and the service.
//
// File format, one entry per line, '#' starts a comment:
//   board   <name> <notation>
//   pattern <name> <pattern notation>
// A name prefixed with '-' (e.g. "-B5") resolves to the negative of the
// named board.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "abalone/canonical.hpp"
#include "abalone/geometry.hpp"
#include "abalone/rules.hpp"

namespace abalone {

inline constexpr std::string_view kDefaultFixtures = R"(# 2x2x2 boards, scan order L1 L2 M1 M2 M3 R1 R2
board B0  2,2,2:BB...GG
board B1  2,2,2:GB...BG
board B2  2,2,2:GB...GB
board B3  2,2,2:GBB.G..
board B4  2,2,2:GBG.B..
board B5  2,2,2:GGB.B..
board B6  2,2,2:GB..GB.
board B7  2,2,2:GG..BB.
board B8  2,2,2:.BGB.G.
board B9  2,2,2:.BGB..G
board B10 2,2,2:GB.B..G
board B11 2,2,2:GBGB...
board B12 2,2,2:GB.B.G.
board B13 2,2,2:GB.BG..

# 2x2x3 boards, scan order a..j
board C0  2,2,3:G.BG..BG.B
board C1  2,2,3:G.BG.BBG..
board C2  2,2,3:G.BGGBB...
board C3  2,2,3:..BGGBBG..
board C4  2,2,3:GB.GGBB...
board C5  2,2,3:GBBGG.B...
board C6  2,2,3:.B.GGBB.G.
board C7  2,2,3:.BBGG.B.G.
board C8  2,2,3:..BGGBB.G.

# larger starting positions
board D0  2,3,3:BBBBB....GGGGG
board E0  3,3,3:.GGB.G.BB.BB.G.BGG.

# 2x2x3 sub-configurations
pattern neutral  2,2,3:GGB?BB????
pattern triangle 2,2,3:?B??BB????
)";

class FixtureSet {
 public:
  static FixtureSet parse(std::string_view text) {
    FixtureSet set;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream fields(line);
      std::string kind, name, notation, extra;
      if (!(fields >> kind)) continue;
      if (!(fields >> name >> notation) || (fields >> extra)) {
        throw std::invalid_argument("fixture line " + std::to_string(line_no) + ": expected '<kind> <name> <notation>'");
      }
      try {
        if (kind == "board") {
          if (name.starts_with('-')) throw std::invalid_argument("board names may not start with '-'");
          set.order_.push_back(name);
          set.boards_[name] = parse_notation(notation);
        } else if (kind == "pattern") {
          set.patterns_.emplace(name, parse_pattern(notation));
        } else {
          throw std::invalid_argument("unknown kind '" + kind + "'");
        }
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("fixture line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    return set;
  }

  static FixtureSet load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  static const FixtureSet& builtin() {
    static const FixtureSet set = parse(kDefaultFixtures);
    return set;
  }

  [[nodiscard]] bool has_board(std::string_view name) const {
    if (name.starts_with('-')) name.remove_prefix(1);
    return boards_.contains(std::string(name));
  }

  // Board by name; "-X" is the negative of X.
  [[nodiscard]] const ParsedBoard& board(std::string_view name) const {
    auto it = boards_.find(std::string(name.starts_with('-') ? name.substr(1) : name));
    if (it == boards_.end()) throw std::out_of_range("unknown fixture board '" + std::string(name) + "'");
    return it->second;
  }

  [[nodiscard]] Constellation constellation(std::string_view name) const {
    const Constellation& c = board(name).constellation;
    return name.starts_with('-') ? negate(c) : c;
  }

  [[nodiscard]] const Pattern& pattern(std::string_view name) const {
    auto it = patterns_.find(std::string(name));
    if (it == patterns_.end()) throw std::out_of_range("unknown fixture pattern '" + std::string(name) + "'");
    return it->second;
  }

  [[nodiscard]] const std::vector<std::string>& board_names() const { return order_; }

  // Names of boards on the given shape, in file order.
  [[nodiscard]] std::vector<std::string> boards_on(BoardShape shape) const {
    std::vector<std::string> out;
    for (const auto& name : order_) {
      if (boards_.at(name).shape == shape) out.push_back(name);
    }
    return out;
  }

 private:
  std::vector<std::string> order_;
  std::map<std::string, ParsedBoard> boards_;
  std::map<std::string, Pattern> patterns_;
};

// Conventional starting position for the shapes that have one.
inline std::optional<std::string> default_start(BoardShape shape) {
  static const std::map<std::string, std::string> kStarts{
      {"2,2,2", "B1"}, {"2,2,3", "C0"}, {"2,3,3", "D0"}, {"3,3,3", "E0"}};
  auto it = kStarts.find(shape.to_string());
  if (it == kStarts.end()) return std::nullopt;
  return it->second;
}

inline std::optional<GameConfig> default_config(BoardShape shape, int k) {
  const auto name = default_start(shape);
  if (!name) return std::nullopt;
  return make_config(shape, k, FixtureSet::builtin().constellation(*name));
}

// Re-checks properties the named boards are known to have:
// B0-B4 self-negative, B5-B13 not, the 23 boards pairwise non-isomorphic,
// 4 Black options from C0 and 7 Gray options from C1.  Returns problems found.
inline std::vector<std::string> verify_fixtures(const FixtureSet& set) {
  std::vector<std::string> problems;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  for (const auto& name : set.board_names()) {
    const auto& b = set.board(name);
    need(b.constellation.count(Color::Black) == b.constellation.count(Color::Gray),
         name + " has unequal marble counts");
  }
  const BoardShape small{2, 2, 2};
  const Board board222(small);
  std::vector<std::pair<std::string, Constellation>> classes;
  for (int i = 0; i <= 13; ++i) {
    const std::string name = "B" + std::to_string(i);
    if (!set.has_board(name)) {
      problems.push_back("missing " + name);
      continue;
    }
    need(set.board(name).shape == small, name + " is not a 2,2,2 board");
    const Constellation c = set.constellation(name);
    const bool selfneg = self_negative(board222, c);
    need(selfneg == (i <= 4), name + (i <= 4 ? " should be self-negative" : " should not be self-negative"));
    classes.emplace_back(name, c);
    if (i >= 5) classes.emplace_back("-" + name, negate(c));
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      need(!isomorphic(board222, classes[i].second, classes[j].second),
           classes[i].first + " and " + classes[j].first + " are isomorphic");
    }
  }
  if (set.has_board("C0") && set.has_board("C1")) {
    const auto config = make_config(BoardShape{2, 2, 3}, 1, set.constellation("C0"));
    const Board board223(config.shape);
    need(options_up_to_isomorphism(board223, set.constellation("C0"), Color::Black, config).size() == 4,
         "C0 should give Black 4 non-isomorphic options");
    need(options_up_to_isomorphism(board223, set.constellation("C1"), Color::Gray, config).size() == 7,
         "C1 should give Gray 7 non-isomorphic options");
  } else {
    problems.push_back("missing C0 or C1");
  }
  return problems;
}

}  // namespace abalone
