#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "oog/registry.hpp"

namespace oog {

inline std::string error_kind(ErrorCode c) {
  switch (c) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::config: return "config";
    case ErrorCode::contract: return "contract";
    case ErrorCode::verification: return "verification";
  }
  return "unknown";
}

inline json error_payload(ErrorCode code, const std::string& message) {
  return json{{"error", {{"code", static_cast<int>(code)}, {"kind", error_kind(code)}, {"message", message}}}};
}

/// Per-round and total μ of Player II's sets on a Cantor cube.
inline json measure_summary(const Transcript<CantorCube>& t) {
  json rounds = json::array();
  for (std::size_t n = 0; n < t.completed_rounds(); ++n)
    rounds.push_back(to_string(measure(unite(std::span<const ClopenSet>(t.b(n).sets)))));
  json out{{"perRound", std::move(rounds)}, {"total", to_string(played_measure(t))}};
  if (t.completed_rounds() > 0)
    if (auto w = complement_witness(t)) out["complementWitness"] = encode_cylinder(*w);
  return out;
}

template <Space S>
json coverage_to_json(const std::vector<std::vector<bool>>& cov) {
  json out = json::array();
  for (const auto& row : cov) out.push_back(row);
  return out;
}

/// One interactive game: a human in one seat, an engine strategy in the other.
class Session {
 public:
  virtual ~Session() = default;
  virtual json state() const = 0;
  virtual json apply_move(const json& payload) = 0;
  virtual json hint() const = 0;
  virtual json preview(const json& payload) const = 0;
  virtual json transcript() const = 0;
};

template <Space S>
class GameSession : public Session {
 public:
  GameSession(std::string id, S space, Player human, std::string engine_name, int rounds_n, const std::string& tf,
              std::uint64_t seed, const Limits& limits)
      : id_(std::move(id)), space_(std::move(space)), human_(human), limits_(limits) {
    if (rounds_n < 1) throw ConfigError("roundsN must be at least 1");
    const Player engine_seat = human == Player::one ? Player::two : Player::one;
    engine_ = make_strategy(space_, engine_name, engine_seat, limits_);
    tf_ = make_test_family(space_, tf);
    t_.space = space_.descriptor();
    t_.seed = seed;
    t_.rounds_n = rounds_n;
    t_.test_family = tf;
    (human == Player::one ? t_.p1 : t_.p2) = "human";
    (human == Player::one ? t_.p2 : t_.p1) = engine_->name();
    engine_->prepare(space_, rounds_n);
    advance();
  }

  json state() const override {
    json j{{"id", id_},
           {"space", space_.descriptor()},
           {"human", to_string(human_)},
           {"engine", engine_->name()},
           {"roundsN", t_.rounds_n},
           {"round", t_.current_round()},
           {"status", status_},
           {"toMove", finished() ? json(nullptr) : json(to_string(t_.to_move()))},
           {"testFamily", tf_.descriptor},
           {"testRegions", encode_all(tf_.regions)},
           {"transcript", transcript_to_json(space_, t_)},
           {"coverage", coverage_to_json<S>(coverage(space_, t_, tf_))}};
    if (!engine_error_.empty()) j["engineError"] = engine_error_;
    if constexpr (std::is_same_v<S, CantorCube>) j["measure"] = measure_summary(t_);
    return j;
  }

  json apply_move(const json& payload) override {
    if (finished()) throw ContractViolation("session " + id_ + " is finished");
    if (t_.to_move() != human_) throw ContractViolation("it is not the human's turn");
    auto f = decode_family(payload);
    append_move(space_, t_, std::move(f));
    advance();
    return state();
  }

  json hint() const override {
    if (finished()) throw ContractViolation("session " + id_ + " is finished");
    if (t_.to_move() != human_) throw ContractViolation("it is not the human's turn");
    MoveFamily<Region<S>> f{human_, {}};
    if (human_ == Player::one) {
      f.sets.push_back(space_.whole());
    } else {
      for (const auto& u : t_.rounds.back().sets) f.sets.push_back(space_.canonical_refinement(u));
      f = make_family(Player::two, std::move(f.sets));
    }
    Transcript<S> probe = t_;
    append_move(space_, probe, f);
    return json{{"sets", encode_all(f.sets)}};
  }

  /// Coverage after the candidate move, without committing or asking the
  /// engine.
  json preview(const json& payload) const override {
    if (finished()) throw ContractViolation("session " + id_ + " is finished");
    if (t_.to_move() != human_) throw ContractViolation("it is not the human's turn");
    Transcript<S> probe = t_;
    append_move(space_, probe, decode_family(payload));
    const auto before = coverage(space_, t_, tf_);
    const auto after = coverage(space_, probe, tf_);
    json newly = json::array();
    for (std::size_t k = 0; k < after.size(); ++k)
      for (std::size_t i = 0; i < after[k].size(); ++i)
        if (after[k][i] && (k >= before.size() || !before[k][i])) newly.push_back(json{{"k", k}, {"test", i}});
    return json{{"coverage", coverage_to_json<S>(after)}, {"newlyCovered", std::move(newly)}};
  }

  json transcript() const override { return transcript_to_json(space_, t_); }

 private:
  bool finished() const { return status_ == "finished" || status_ == "engine-error"; }

  json encode_all(const std::vector<Region<S>>& rs) const {
    json a = json::array();
    for (const auto& r : rs) a.push_back(space_.encode(r));
    return a;
  }

  MoveFamily<Region<S>> decode_family(const json& payload) const {
    const json* sets = &payload;
    if (payload.is_object()) {
      if (!payload.contains("sets")) throw ConfigError("move payload needs a 'sets' array");
      sets = &payload["sets"];
    }
    if (!sets->is_array()) throw ConfigError("move payload must be an array of regions");
    MoveFamily<Region<S>> f{human_, {}};
    for (const auto& r : *sets) f.sets.push_back(space_.decode(r));
    return f;
  }

  /// Lets the engine move until it is the human's turn or the game is over.
  void advance() {
    while (t_.completed_rounds() < static_cast<std::size_t>(t_.rounds_n) && t_.to_move() != human_) {
      try {
        play_move(space_, t_, *engine_);
      } catch (const Error& e) {
        status_ = "engine-error";
        engine_error_ = e.what();
        return;
      }
    }
    if (t_.completed_rounds() == static_cast<std::size_t>(t_.rounds_n)) {
      t_.certificates = adjudicate_all(space_, t_, tf_);
      status_ = "finished";
    } else {
      status_ = "awaiting-human";
    }
  }

  std::string id_;
  S space_;
  Player human_;
  Limits limits_;
  std::unique_ptr<Strategy<S>> engine_;
  TestFamily<Region<S>> tf_;
  Transcript<S> t_;
  std::string status_ = "awaiting-engine";
  std::string engine_error_;
};

inline std::unique_ptr<Session> make_session(const std::string& id, const json& req, const Limits& limits) {
  static const std::set<std::string> known{"space", "role", "strategy", "roundsN", "testFamily", "seed"};
  if (!req.is_object()) throw ConfigError("session request must be a JSON object");
  for (const auto& [k, _] : req.items())
    if (!known.contains(k)) throw ConfigError("unknown session field: " + k);
  std::string space, role, strategy, tf;
  int rounds = 0;
  std::uint64_t seed = 0;
  try {
    space = req.value("space", std::string("cantor"));
    role = req.at("role").get<std::string>();
    strategy = req.at("strategy").get<std::string>();
    rounds = req.at("roundsN").get<int>();
    tf = req.value("testFamily", std::string("depth:2"));
    seed = req.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed session request: ") + e.what());
  }
  const Player human = parse_player(role);
  return std::visit(
      [&](auto&& sp) -> std::unique_ptr<Session> {
        using S = std::decay_t<decltype(sp)>;
        return std::make_unique<GameSession<S>>(id, sp, human, strategy, rounds, tf, seed, limits);
      },
      make_space(space));
}

/// Session registry. Requests on one session are serialized by that
/// session's mutex; distinct sessions proceed independently.
class SessionManager {
 public:
  explicit SessionManager(Limits limits = {}) : limits_(limits) {}

  json create(const json& req) {
    std::string id;
    {
      std::lock_guard lock(mu_);
      id = "s" + std::to_string(++next_id_);
    }
    auto entry = std::make_shared<Entry>();
    entry->session = make_session(id, req, limits_);
    json st = entry->session->state();
    std::lock_guard lock(mu_);
    sessions_[id] = std::move(entry);
    return st;
  }

  template <class F>
  json with_session(const std::string& id, F&& f) {
    std::shared_ptr<Entry> e;
    {
      std::lock_guard lock(mu_);
      auto it = sessions_.find(id);
      if (it == sessions_.end()) throw NotFound("unknown session: " + id);
      e = it->second;
    }
    std::lock_guard lock(e->mu);
    return f(*e->session);
  }

  json state(const std::string& id) {
    return with_session(id, [](Session& s) { return s.state(); });
  }
  json apply_move(const std::string& id, const json& payload) {
    return with_session(id, [&](Session& s) { return s.apply_move(payload); });
  }
  json hint(const std::string& id) {
    return with_session(id, [](Session& s) { return s.hint(); });
  }
  json preview(const std::string& id, const json& payload) {
    return with_session(id, [&](Session& s) { return s.preview(payload); });
  }
  json transcript(const std::string& id) {
    return with_session(id, [](Session& s) { return s.transcript(); });
  }

  json remove(const std::string& id) {
    std::lock_guard lock(mu_);
    if (sessions_.erase(id) == 0) throw NotFound("unknown session: " + id);
    return json{{"deleted", id}};
  }

  static json strategies() {
    json out = json::array();
    for (const auto& s : strategy_catalog())
      out.push_back(json{{"name", s.name}, {"seat", s.seat}, {"spaces", s.spaces}, {"summary", s.summary}});
    return out;
  }

  static json spaces() {
    return json::array({"cantor", "cantor:<bound>", "exp(cantor)", "product(cantor,cantor)", "sum(<n>,cantor)",
                        "finite:<path>", "exp(finite:<path>)", "sum(<n>,finite:<path>)"});
  }

  class NotFound : public ConfigError {
   public:
    using ConfigError::ConfigError;
  };

 private:
  struct Entry {
    std::mutex mu;
    std::unique_ptr<Session> session;
  };

  Limits limits_;
  std::mutex mu_;
  std::uint64_t next_id_ = 0;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

struct Response {
  int status = 200;
  json body;
};

/// Routes one request; transport-independent so it can be tested without
/// sockets.
///
///   POST   /api/sessions                 create
///   GET    /api/sessions/<id>            state
///   POST   /api/sessions/<id>/moves      apply a move
///   GET    /api/sessions/<id>/hint       legal sample move
///   POST   /api/sessions/<id>/preview    coverage after a candidate move
///   GET    /api/sessions/<id>/transcript transcript JSON
///   DELETE /api/sessions/<id>            delete
///   GET    /api/strategies, /api/spaces
inline Response handle_request(SessionManager& mgr, const std::string& method, const std::string& path,
                               const std::string& body) {
  auto parse_body = [&]() {
    try {
      return body.empty() ? json::object() : json::parse(body);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("request body is not JSON: ") + e.what());
    }
  };
  try {
    if (method == "GET" && path == "/api/strategies") return {200, SessionManager::strategies()};
    if (method == "GET" && path == "/api/spaces") return {200, SessionManager::spaces()};
    if (method == "POST" && path == "/api/sessions") return {201, mgr.create(parse_body())};
    const std::string prefix = "/api/sessions/";
    if (path.rfind(prefix, 0) == 0) {
      std::string rest = path.substr(prefix.size());
      std::string id = rest, action;
      if (auto slash = rest.find('/'); slash != std::string::npos) {
        id = rest.substr(0, slash);
        action = rest.substr(slash + 1);
      }
      if (action.empty() && method == "GET") return {200, mgr.state(id)};
      if (action.empty() && method == "DELETE") return {200, mgr.remove(id)};
      if (action == "moves" && method == "POST") return {200, mgr.apply_move(id, parse_body())};
      if (action == "hint" && method == "GET") return {200, mgr.hint(id)};
      if (action == "preview" && method == "POST") return {200, mgr.preview(id, parse_body())};
      if (action == "transcript" && method == "GET") return {200, mgr.transcript(id)};
    }
    return {404, error_payload(ErrorCode::config, "no route for " + method + " " + path)};
  } catch (const SessionManager::NotFound& e) {
    return {404, error_payload(e.code(), e.what())};
  } catch (const Error& e) {
    const int status = e.code() == ErrorCode::config ? 400 : e.code() == ErrorCode::contract ? 409 : 422;
    return {status, error_payload(e.code(), e.what())};
  }
}

}  // namespace oog
