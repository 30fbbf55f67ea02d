#pragma once

#include <stdexcept>
#include <string>

#include "smg/game.hpp"

namespace smg {

struct SpecParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strict parse: unknown keys, missing keys, unresolved labels and malformed
// sojourn records all throw SpecParseError naming the offending location.
// Semantic checks (probability sums, cost signs) are validate_spec's job.
GameSpec load_game_spec(const std::string& path);
GameSpec parse_game_spec(const std::string& text);

std::string game_spec_to_json(const GameSpec& spec);

// FNV-1a over the canonical serialization; ties solution files to the
// exact spec they were computed from.
std::string spec_digest(const GameSpec& spec);

}  // namespace smg
