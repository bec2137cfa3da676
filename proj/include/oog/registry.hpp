#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "oog/clubfilter.hpp"

namespace oog {

struct StrategyInfo {
  std::string name;
  std::string seat;    // "I" or "II"
  std::string spaces;  // where it applies
  std::string summary;
};

inline const std::vector<StrategyInfo>& strategy_catalog() {
  static const std::vector<StrategyInfo> list{
      {"cantor-p1", "I", "cantor, product(...)", "play every cylinder over J_n; fails past the |J_n| cap"},
      {"cantor-p1:<k>", "I", "cantor, product(...)", "as cantor-p1 with J_n cut to its k smallest coordinates"},
      {"club-p1:<filter>", "I", "cantor, product(...), exp(cantor)", "strategy compiled from a club filter source"},
      {"diagonal-p2", "II", "cantor", "refine inside W_{a->1} for a coordinate unused by a scripted Player I"},
      {"measure-p2", "II", "cantor", "keep mu(union B_n) below 2^-(n+2)"},
      {"measure-p2:<offset>", "II", "cantor", "keep mu(union B_n) below 2^-(n+offset)"},
      {"sum-p2", "II", "sum(n,...)", "stay inside finitely many summands"},
      {"random-p2:<k>", "II", "all", "seeded random refinements extending at most k coordinates"},
      {"canonical-p2", "II", "all", "canonical base set inside each U"},
      {"scripted:<path>", "I, II", "all", "replay families from a JSON file"},
  };
  return list;
}

inline bool is_randomized(const std::string& name) { return name.rfind("random-p2", 0) == 0; }

namespace detail {

inline std::string strategy_arg(const std::string& name, const std::string& prefix) {
  return name.size() > prefix.size() ? name.substr(prefix.size()) : std::string{};
}

inline bool has_prefix(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

}  // namespace detail

/// Builds the strategy `name` for `space` in `seat`. `opponent_script` is the
/// scripted Player I sequence, needed only by diagonal-p2.
template <Space S>
std::unique_ptr<Strategy<S>> make_strategy(const S& space, const std::string& name, Player seat,
                                           const Limits& limits = {},
                                           const std::vector<std::vector<Region<S>>>* opponent_script = nullptr) {
  using detail::has_prefix;
  auto wrong_seat = [&](Player needed) {
    if (seat != needed)
      throw ConfigError("strategy " + name + " plays for Player " + to_string(needed) + ", not Player " +
                        to_string(seat));
  };
  auto unsupported = [&]() -> std::unique_ptr<Strategy<S>> {
    throw ConfigError("strategy " + name + " does not apply to space " + space.descriptor());
  };

  if (has_prefix(name, "scripted:")) return ScriptedStrategy<S>::load(space, name.substr(9));
  if (has_prefix(name, "random-p2:")) {
    wrong_seat(Player::two);
    return std::make_unique<RandomPlayerTwo<S>>(
        static_cast<int>(detail::parse_count(detail::strategy_arg(name, "random-p2:"), name)));
  }
  if (name == "canonical-p2") {
    wrong_seat(Player::two);
    return std::make_unique<CanonicalPlayerTwo<S>>();
  }
  if (name == "cantor-p1" || has_prefix(name, "cantor-p1:")) {
    wrong_seat(Player::one);
    if constexpr (std::is_same_v<S, CantorCube>) return make_sigma(name, limits);
    return unsupported();
  }
  if (has_prefix(name, "club-p1:")) {
    wrong_seat(Player::one);
    const std::string filter = name.substr(8);
    if constexpr (std::is_same_v<S, CantorCube>)
      return std::make_unique<BbbStrategy<CantorCube>>(make_cantor_source(filter, limits), limits);
    if constexpr (std::is_same_v<S, Hyperspace<CantorCube>>)
      return std::make_unique<BbbStrategy<Hyperspace<CantorCube>>>(make_hyperspace_source(filter, limits), limits);
    return unsupported();
  }
  if (name == "diagonal-p2") {
    wrong_seat(Player::two);
    if constexpr (std::is_same_v<S, CantorCube>) {
      if (!opponent_script) throw ConfigError("diagonal-p2 needs a scripted Player I (p1 = scripted:<path>)");
      return std::make_unique<DiagonalPlayerTwo>(*opponent_script);
    }
    return unsupported();
  }
  if (name == "measure-p2" || has_prefix(name, "measure-p2:")) {
    wrong_seat(Player::two);
    if constexpr (std::is_same_v<S, CantorCube>) {
      const int offset = name == "measure-p2" ? 2
                                              : static_cast<int>(detail::parse_count(name.substr(11), name));
      return std::make_unique<MeasurePlayerTwo>(offset, limits);
    }
    return unsupported();
  }
  if (name == "sum-p2") {
    wrong_seat(Player::two);
    if constexpr (std::is_same_v<S, SumSpace<CantorCube>> || std::is_same_v<S, SumSpace<FiniteSpace>>)
      return std::make_unique<SumPlayerTwo<typename std::remove_cvref_t<decltype(space.inner())>>>();
    return unsupported();
  }
  throw ConfigError("unknown strategy: " + name);
}

template <Space S>
struct StrategyPair {
  std::unique_ptr<Strategy<S>> one;
  std::unique_ptr<Strategy<S>> two;
};

/// Both seats, wiring a scripted Player I's families into diagonal-p2.
template <Space S>
StrategyPair<S> make_strategies(const S& space, const std::string& p1, const std::string& p2,
                                const Limits& limits = {}) {
  StrategyPair<S> out;
  out.one = make_strategy(space, p1, Player::one, limits);
  const std::vector<std::vector<Region<S>>>* script = nullptr;
  if (auto* s = dynamic_cast<ScriptedStrategy<S>*>(out.one.get())) script = &s->moves();
  out.two = make_strategy(space, p2, Player::two, limits, script);
  return out;
}

}  // namespace oog
