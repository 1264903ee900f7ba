#include "qnash/spec_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "qnash/error.hpp"

namespace qnash {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kValidationError, why, field);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) invalid(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) invalid(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) invalid(join(path, key), "unknown field");
  }
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) invalid(field, "expected a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) invalid(field, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_numbers(const json& v, const std::string& field) {
  if (!v.is_array()) invalid(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(as_number(v[k], field + "[" + std::to_string(k) + "]"));
  }
  return out;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, join(path, key));
}

std::optional<std::vector<double>> beliefs_field(const json& obj, const std::string& path) {
  const auto it = obj.find("beliefs");
  if (it == obj.end()) return std::nullopt;
  if (it->is_string()) {
    if (it->get<std::string>() != "rational") invalid(join(path, "beliefs"), "expected \"rational\"");
    return std::nullopt;
  }
  return as_numbers(*it, join(path, "beliefs"));
}

UtilitySpec utility_fields(const json& obj, const std::string& path) {
  UtilitySpec u;
  u.gamma = as_number(require(obj, "gamma", path), join(path, "gamma"));
  u.beta = number_or(obj, "beta", 1.0, path);
  if (!(u.gamma > 0.0)) invalid(join(path, "gamma"), "must be positive");
  if (!(u.beta > 0.0)) invalid(join(path, "beta"), "must be positive");
  return u;
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

GameSpec parse_game(const json& doc) {
  if (!doc.is_object()) invalid("", "game specification must be an object");
  reject_unknown(doc, {"players", "payoffs", "discount"}, "");
  const json& players = require(doc, "players", "");
  if (!players.is_array() || players.empty()) invalid("players", "expected a non-empty array");

  std::vector<Player> parsed;
  std::set<std::string> names;
  for (std::size_t i = 0; i < players.size(); ++i) {
    const std::string path = "players[" + std::to_string(i) + "]";
    const json& p = players[i];
    if (!p.is_object()) invalid(path, "expected an object");
    reject_unknown(p, {"name", "strategies"}, path);
    Player player;
    player.name = as_string(require(p, "name", path), path + ".name");
    if (!names.insert(player.name).second) invalid(path + ".name", "duplicate player name");
    const json& strategies = require(p, "strategies", path);
    if (!strategies.is_array() || strategies.empty()) {
      invalid(path + ".strategies", "expected a non-empty array");
    }
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      player.strategies.push_back(
          as_string(strategies[s], path + ".strategies[" + std::to_string(s) + "]"));
    }
    parsed.push_back(std::move(player));
  }

  const json& payoffs = require(doc, "payoffs", "");
  if (!payoffs.is_object()) invalid("payoffs", "expected an object keyed by player name");
  for (const auto& [key, _] : payoffs.items()) {
    if (!names.count(key)) invalid("payoffs." + key, "no such player");
  }
  std::vector<std::vector<double>> tensors;
  for (const auto& p : parsed) {
    const std::string field = "payoffs." + p.name;
    const auto it = payoffs.find(p.name);
    if (it == payoffs.end()) invalid(field, "missing field");
    tensors.push_back(as_numbers(*it, field));
  }
  const double discount = as_number(require(doc, "discount", ""), "discount");
  return GameSpec(std::move(parsed), std::move(tensors), discount);
}

json game_to_json(const GameSpec& spec) {
  json doc;
  doc["players"] = json::array();
  doc["payoffs"] = json::object();
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    const auto& p = spec.player(i);
    doc["players"].push_back({{"name", p.name}, {"strategies", p.strategies}});
    const auto pay = spec.payoffs(i);
    doc["payoffs"][p.name] = std::vector<double>(pay.begin(), pay.end());
  }
  doc["discount"] = spec.discount();
  return doc;
}

EconomySpec EconomyInput::resolve(const std::vector<double>& rational) const {
  EconomySpec spec;
  spec.aggregate_c0 = aggregate_c0;
  spec.aggregate_c = aggregate_c;
  if (aggregate_c.size() != rational.size()) {
    invalid("aggregate_c", "expected " + std::to_string(rational.size()) + " entries, got " +
                               std::to_string(aggregate_c.size()));
  }
  for (const auto& a : agents) {
    spec.agents.push_back({a.utility, a.weight, a.beliefs.value_or(rational)});
  }
  spec.validate();
  return spec;
}

EconomyInput parse_economy(const json& doc) {
  if (!doc.is_object()) invalid("", "economy specification must be an object");
  reject_unknown(doc, {"agents", "aggregate_c0", "aggregate_c"}, "");
  EconomyInput in;
  const json& agents = require(doc, "agents", "");
  if (!agents.is_array() || agents.empty()) invalid("agents", "expected a non-empty array");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string path = "agents[" + std::to_string(i) + "]";
    const json& a = agents[i];
    if (!a.is_object()) invalid(path, "expected an object");
    reject_unknown(a, {"gamma", "beta", "lambda", "beliefs"}, path);
    EconomyInput::Agent agent;
    agent.utility = utility_fields(a, path);
    agent.weight = number_or(a, "lambda", 1.0, path);
    if (!(agent.weight > 0.0)) invalid(path + ".lambda", "must be positive");
    agent.beliefs = beliefs_field(a, path);
    in.agents.push_back(std::move(agent));
  }
  in.aggregate_c0 = as_number(require(doc, "aggregate_c0", ""), "aggregate_c0");
  if (!(in.aggregate_c0 > 0.0)) invalid("aggregate_c0", "must be positive");
  in.aggregate_c = as_numbers(require(doc, "aggregate_c", ""), "aggregate_c");
  for (std::size_t w = 0; w < in.aggregate_c.size(); ++w) {
    if (!(in.aggregate_c[w] > 0.0)) invalid("aggregate_c[" + std::to_string(w) + "]", "must be positive");
  }
  return in;
}

SecuritiesInput parse_securities(const json& doc, const GameSpec& game) {
  if (!doc.is_object()) invalid("", "securities specification must be an object");
  reject_unknown(doc, {"securities", "prices", "agents"}, "");
  SecuritiesInput in;
  const std::size_t states = game.path_count();

  const json& list = require(doc, "securities", "");
  if (!list.is_array() || list.empty()) invalid("securities", "expected a non-empty array");
  for (std::size_t j = 0; j < list.size(); ++j) {
    const std::string path = "securities[" + std::to_string(j) + "]";
    const json& s = list[j];
    if (!s.is_object()) invalid(path, "expected an object");
    reject_unknown(s, {"name", "payoffs", "game_position", "theta"}, path);
    Security sec;
    sec.name = as_string(require(s, "name", path), path + ".name");
    const bool has_payoffs = s.contains("payoffs");
    const bool has_position = s.contains("game_position");
    if (has_payoffs == has_position) {
      invalid(path, "exactly one of 'payoffs' or 'game_position' is required");
    }
    if (has_payoffs) {
      if (s.contains("theta")) invalid(path + ".theta", "only valid with game_position");
      sec.payoffs = as_numbers(s["payoffs"], path + ".payoffs");
      if (sec.payoffs.size() != states) {
        invalid(path + ".payoffs", "expected " + std::to_string(states) + " entries, got " +
                                       std::to_string(sec.payoffs.size()));
      }
    } else {
      const json& pos = s["game_position"];
      std::size_t player = game.player_count();
      if (pos.is_number_unsigned()) {
        player = pos.get<std::size_t>();
      } else if (pos.is_string()) {
        player = game.find_player(pos.get<std::string>());
      }
      if (player >= game.player_count()) invalid(path + ".game_position", "no such player");
      const double theta = as_number(require(s, "theta", path), path + ".theta");
      if (!(theta > 0.0)) invalid(path + ".theta", "must be positive");
      for (double p : game.payoffs(player)) sec.payoffs.push_back(theta * p);
      sec.position = GamePosition{player, theta};
    }
    in.securities.securities.push_back(std::move(sec));
  }

  if (const auto it = doc.find("prices"); it != doc.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "pv") invalid("prices", "expected \"pv\" or an array");
    } else {
      auto prices = as_numbers(*it, "prices");
      if (prices.size() != in.securities.size()) {
        invalid("prices", "expected one price per security");
      }
      in.prices = std::move(prices);
    }
  }

  if (const auto it = doc.find("agents"); it != doc.end()) {
    if (!it->is_array()) invalid("agents", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "agents[" + std::to_string(i) + "]";
      const json& a = (*it)[i];
      if (!a.is_object()) invalid(path, "expected an object");
      reject_unknown(a, {"gamma", "beta", "e0", "shares", "beliefs"}, path);
      SecuritiesInput::Agent agent;
      agent.agent.utility = utility_fields(a, path);
      agent.agent.endowment_c0 = number_or(a, "e0", 0.0, path);
      if (const auto sh = a.find("shares"); sh != a.end()) {
        agent.agent.endowment_shares = as_numbers(*sh, path + ".shares");
        if (agent.agent.endowment_shares.size() != in.securities.size()) {
          invalid(path + ".shares", "expected one entry per security");
        }
      } else {
        agent.agent.endowment_shares.assign(in.securities.size(), 0.0);
      }
      agent.beliefs = beliefs_field(a, path);
      if (agent.beliefs && agent.beliefs->size() != states) {
        invalid(path + ".beliefs", "expected " + std::to_string(states) + " entries");
      }
      in.agents.push_back(std::move(agent));
    }
  }
  in.securities.validate(states, &game);
  return in;
}

}  // namespace qnash
