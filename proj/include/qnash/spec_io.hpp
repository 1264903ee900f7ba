#pragma once

// JSON input formats.
//
// Game:
//   { "players": [{"name": "A", "strategies": ["0", "1"]}, ...],
//     "payoffs": {"A": [N reals in path order], ...},
//     "discount": D }
// Economy:
//   { "agents": [{"gamma", "beta", "lambda", "beliefs": [N reals] | "rational"}],
//     "aggregate_c0": C0, "aggregate_c": [N reals] }
// Securities:
//   { "securities": [{"name", "payoffs": [N reals]} |
//                    {"name", "game_position": index | player name, "theta"}],
//     "prices": "pv" | [m reals],
//     "agents": [{"gamma", "beta", "e0", "shares": [m reals],
//                 "beliefs": [N reals] | "rational"}] }     (optional)
//
// Problems surface as Error(kParseError) for malformed JSON and
// Error(kValidationError) with a field path for schema violations.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnash/economy.hpp"
#include "qnash/game.hpp"
#include "qnash/securities.hpp"

namespace qnash {

nlohmann::json read_json_file(const std::string& path);

GameSpec parse_game(const nlohmann::json& doc);
nlohmann::json game_to_json(const GameSpec& spec);

struct EconomyInput {
  struct Agent {
    UtilitySpec utility;
    double weight = 1.0;
    std::optional<std::vector<double>> beliefs;  // empty means rational
  };
  std::vector<Agent> agents;
  double aggregate_c0 = 0.0;
  std::vector<double> aggregate_c;

  // Fills rational beliefs and validates against the state count.
  EconomySpec resolve(const std::vector<double>& rational) const;
};

EconomyInput parse_economy(const nlohmann::json& doc);

struct SecuritiesInput {
  struct Agent {
    PortfolioAgent agent;
    std::optional<std::vector<double>> beliefs;  // empty means rational
  };
  SecuritySet securities;
  std::optional<MarketPrices> prices;  // empty means present-value prices
  std::vector<Agent> agents;
};

// The game resolves game_position entries and fixes the state count.
SecuritiesInput parse_securities(const nlohmann::json& doc, const GameSpec& game);

}  // namespace qnash
