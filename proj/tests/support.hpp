#pragma once

#include <memory>

#include "abalone/fixtures.hpp"
#include "abalone/solver.hpp"

namespace abalone::testing {

// Solved once per test binary.
inline const SolvedDatabase& solved(BoardShape shape, int k = 1) {
  static std::map<std::string, std::unique_ptr<SolvedDatabase>> cache;
  auto& slot = cache[shape.to_string() + "/" + std::to_string(k)];
  if (!slot) {
    SolveOptions options;
    options.workers = 1;
    slot = std::make_unique<SolvedDatabase>(solve(*default_config(shape, k), options));
  }
  return *slot;
}

inline const SolvedDatabase& db222() { return solved({2, 2, 2}); }
inline const SolvedDatabase& db223() { return solved({2, 2, 3}); }

inline Constellation fixture(const std::string& name) { return FixtureSet::builtin().constellation(name); }

// Position on a game with `marbles` per side; missing marbles count as lost.
inline Constellation position(std::string_view notation, int marbles) {
  GameConfig config{parse_notation(notation).shape, 1, marbles, {}};
  return config.position(notation);
}

}  // namespace abalone::testing
