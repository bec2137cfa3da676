#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oog/spaces.hpp"

namespace oog {

enum class Player : std::uint8_t { one, two };

inline std::string to_string(Player p) { return p == Player::one ? "I" : "II"; }

inline Player parse_player(const std::string& s) {
  if (s == "I" || s == "PlayerI" || s == "one") return Player::one;
  if (s == "II" || s == "PlayerII" || s == "two") return Player::two;
  throw ConfigError("unknown player: " + s);
}

/// A_n or B_n: a finite family of nonempty open sets.
template <class R>
struct MoveFamily {
  Player owner = Player::one;
  std::vector<R> sets;
};

/// Drops exact duplicates, keeping first occurrences in order.
template <class R>
MoveFamily<R> make_family(Player owner, std::vector<R> sets) {
  MoveFamily<R> f{owner, {}};
  for (auto& s : sets)
    if (std::find(f.sets.begin(), f.sets.end(), s) == f.sets.end()) f.sets.push_back(std::move(s));
  return f;
}

/// Finite surrogate for "dense": a family of nonempty base regions that a
/// dense union must meet.
template <class R>
struct TestFamily {
  std::vector<R> regions;
  std::string descriptor;
};

struct MeetRecord {
  std::size_t test = 0;
  std::size_t round = 0;
  std::size_t set = 0;

  friend bool operator==(const MeetRecord&, const MeetRecord&) = default;
};

/// Outcome of checking that ∪(B_k ∪ B_{k+1} ∪ …) meets every test region.
template <class R>
struct DensityCertificate {
  std::size_t k = 0;
  bool pass = false;
  std::vector<MeetRecord> meets;       // pass: one record per test region
  std::optional<std::size_t> failing;  // fail: index of the unmet test region
  std::optional<R> failing_region;
};

template <Space S>
struct Transcript {
  using region = Region<S>;

  std::string space;
  std::uint64_t seed = 0;
  int rounds_n = 0;
  std::string p1;
  std::string p2;
  std::string test_family;
  std::vector<MoveFamily<region>> rounds;  // A_0, B_0, A_1, B_1, …
  std::vector<DensityCertificate<region>> certificates;

  std::size_t completed_rounds() const { return rounds.size() / 2; }
  Player to_move() const { return rounds.size() % 2 == 0 ? Player::one : Player::two; }
  const MoveFamily<region>& a(std::size_t n) const { return rounds.at(2 * n); }
  const MoveFamily<region>& b(std::size_t n) const { return rounds.at(2 * n + 1); }
  /// Round index of the next move.
  std::size_t current_round() const { return rounds.size() / 2; }
};

using Rng = std::mt19937_64;

/// Per-round generator forked from the master seed, so a strategy's draws in
/// round n do not depend on how many draws earlier rounds made.
inline Rng round_rng(std::uint64_t seed, std::size_t round, Player p) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(round), static_cast<std::uint32_t>(p == Player::one ? 1 : 2)};
  return Rng(seq);
}

/// Uniform integer in [0, n) by rejection; std distributions are not
/// reproducible across standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw ContractViolation("uniform_below(0)");
  const std::uint64_t limit = Rng::max() - (Rng::max() % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// σ: maps the history so far to the next family. The engine validates every
/// output; nothing a strategy returns is trusted.
template <Space S>
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  /// Called once before play.
  virtual void prepare(const S& /*space*/, int /*rounds_n*/) {}
  virtual MoveFamily<Region<S>> next_move(const S& space, const Transcript<S>& history, Rng& rng) = 0;
};

/// Index of the first U in `a` with no V in `b` satisfying V ⊆ U.
template <Space S>
std::optional<std::size_t> first_unrefined(const S& space, const MoveFamily<Region<S>>& a,
                                           const MoveFamily<Region<S>>& b) {
  if (a.owner != Player::one || b.owner != Player::two)
    throw ContractViolation("legal_reply expects a Player I family followed by a Player II family");
  for (std::size_t i = 0; i < a.sets.size(); ++i) {
    bool refined = false;
    for (const auto& v : b.sets)
      if (space.subset(v, a.sets[i])) {
        refined = true;
        break;
      }
    if (!refined) return i;
  }
  return std::nullopt;
}

template <Space S>
bool legal_reply(const S& space, const MoveFamily<Region<S>>& a, const MoveFamily<Region<S>>& b) {
  return !first_unrefined(space, a, b).has_value();
}

/// Throws ContractViolation unless `f` is a nonempty family of nonempty,
/// valid, pairwise distinct regions of `space`.
template <Space S>
void check_family(const S& space, const MoveFamily<Region<S>>& f, std::size_t round) {
  const std::string where = "round " + std::to_string(round) + ", Player " + to_string(f.owner) + ": ";
  if (f.sets.empty()) throw ContractViolation(where + "empty family");
  for (std::size_t i = 0; i < f.sets.size(); ++i) {
    try {
      space.validate(f.sets[i]);
    } catch (const Error& e) {
      throw ContractViolation(where + "set " + std::to_string(i) + " invalid: " + e.what());
    }
    if (!space.is_nonempty(f.sets[i]))
      throw ContractViolation(where + "set " + std::to_string(i) + " " + space.str(f.sets[i]) + " is empty");
    for (std::size_t j = 0; j < i; ++j)
      if (f.sets[i] == f.sets[j]) throw ContractViolation(where + "duplicate set " + space.str(f.sets[i]));
  }
}

/// Validates and appends one move, enforcing turn order and legality.
template <Space S>
void append_move(const S& space, Transcript<S>& t, MoveFamily<Region<S>> f) {
  const std::size_t round = t.current_round();
  if (f.owner != t.to_move())
    throw ContractViolation("round " + std::to_string(round) + ": it is Player " + to_string(t.to_move()) +
                            "'s turn");
  check_family(space, f, round);
  if (f.owner == Player::two) {
    if (auto bad = first_unrefined(space, t.rounds.back(), f))
      throw ContractViolation("round " + std::to_string(round) + ": Player II family does not refine U = " +
                              space.str(t.rounds.back().sets[*bad]));
  }
  t.rounds.push_back(std::move(f));
}

/// Asks `s` for its move and appends it; strategy errors are reported with
/// the round they happened in.
template <Space S>
void play_move(const S& space, Transcript<S>& t, Strategy<S>& s) {
  const std::size_t round = t.current_round();
  const Player p = t.to_move();
  Rng rng = round_rng(t.seed, round, p);
  MoveFamily<Region<S>> f;
  try {
    f = s.next_move(space, t, rng);
  } catch (const Error& e) {
    throw Error(e.code(), "round " + std::to_string(round) + ", strategy " + s.name() + ": " + e.what());
  }
  f.owner = p;
  append_move(space, t, std::move(f));
}

template <Space S>
Transcript<S> run_game(Strategy<S>& player_one, Strategy<S>& player_two, const S& space, int rounds_n,
                       std::uint64_t seed) {
  if (rounds_n < 1) throw ConfigError("run_game needs at least one round");
  Transcript<S> t;
  t.space = space.descriptor();
  t.seed = seed;
  t.rounds_n = rounds_n;
  t.p1 = player_one.name();
  t.p2 = player_two.name();
  player_one.prepare(space, rounds_n);
  player_two.prepare(space, rounds_n);
  for (int n = 0; n < rounds_n; ++n) {
    play_move(space, t, player_one);
    play_move(space, t, player_two);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Adjudication
// ---------------------------------------------------------------------------

template <Space S>
DensityCertificate<Region<S>> adjudicate(const S& space, const Transcript<S>& t, const TestFamily<Region<S>>& tf,
                                         std::size_t k) {
  if (k >= t.completed_rounds())
    throw ConfigError("adjudicate: k = " + std::to_string(k) + " but only " + std::to_string(t.completed_rounds()) +
                      " rounds completed");
  DensityCertificate<Region<S>> cert;
  cert.k = k;
  for (std::size_t i = 0; i < tf.regions.size(); ++i) {
    std::optional<MeetRecord> hit;
    for (std::size_t j = k; j < t.completed_rounds() && !hit; ++j) {
      const auto& bj = t.b(j).sets;
      for (std::size_t v = 0; v < bj.size(); ++v)
        if (space.meets(tf.regions[i], bj[v])) {
          hit = MeetRecord{i, j, v};
          break;
        }
    }
    if (!hit) {
      cert.pass = false;
      cert.meets.clear();
      cert.failing = i;
      cert.failing_region = tf.regions[i];
      return cert;
    }
    cert.meets.push_back(*hit);
  }
  cert.pass = true;
  return cert;
}

/// Certificates for every k below the number of completed rounds.
template <Space S>
std::vector<DensityCertificate<Region<S>>> adjudicate_all(const S& space, const Transcript<S>& t,
                                                          const TestFamily<Region<S>>& tf) {
  std::vector<DensityCertificate<Region<S>>> out;
  for (std::size_t k = 0; k < t.completed_rounds(); ++k) out.push_back(adjudicate(space, t, tf, k));
  return out;
}

/// Re-checks a certificate against the transcript without trusting it.
template <Space S>
bool replay_certificate(const S& space, const Transcript<S>& t, const TestFamily<Region<S>>& tf,
                        const DensityCertificate<Region<S>>& cert) {
  if (cert.k >= t.completed_rounds()) return false;
  if (cert.pass) {
    if (cert.meets.size() != tf.regions.size()) return false;
    for (std::size_t i = 0; i < cert.meets.size(); ++i) {
      const auto& m = cert.meets[i];
      if (m.test != i || m.round < cert.k || m.round >= t.completed_rounds()) return false;
      const auto& bj = t.b(m.round).sets;
      if (m.set >= bj.size() || !space.meets(tf.regions[i], bj[m.set])) return false;
    }
    return true;
  }
  if (!cert.failing || *cert.failing >= tf.regions.size()) return false;
  const auto& r = tf.regions[*cert.failing];
  if (cert.failing_region && !(*cert.failing_region == r)) return false;
  for (std::size_t j = cert.k; j < t.completed_rounds(); ++j)
    for (const auto& v : t.b(j).sets)
      if (space.meets(r, v)) return false;
  return true;
}

/// covered[k][i]: test region i meets some member of B_j for some j ≥ k.
template <Space S>
std::vector<std::vector<bool>> coverage(const S& space, const Transcript<S>& t, const TestFamily<Region<S>>& tf) {
  const std::size_t n = t.completed_rounds();
  std::vector<std::vector<bool>> hit_at(n, std::vector<bool>(tf.regions.size(), false));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < tf.regions.size(); ++i)
      for (const auto& v : t.b(j).sets)
        if (space.meets(tf.regions[i], v)) {
          hit_at[j][i] = true;
          break;
        }
  std::vector<std::vector<bool>> out(n, std::vector<bool>(tf.regions.size(), false));
  for (std::size_t k = n; k-- > 0;)
    for (std::size_t i = 0; i < tf.regions.size(); ++i)
      out[k][i] = hit_at[k][i] || (k + 1 < n && out[k + 1][i]);
  return out;
}

// ---------------------------------------------------------------------------
// Test families
// ---------------------------------------------------------------------------

inline CoordSet first_coords(std::size_t d) {
  CoordSet s;
  for (Coord c = 0; c < d; ++c) s.insert(c);
  return s;
}

inline std::vector<ClopenSet> cylinder_regions(const CoordSet& coords, std::size_t max_dom) {
  std::vector<ClopenSet> out;
  for (auto& c : cylinders_over(coords, max_dom)) out.push_back(ClopenSet::of(std::move(c)));
  return out;
}

template <class Part>
std::vector<VietorisBasic<Part>> basics_up_to_arity(const std::vector<Part>& parts, std::size_t max_arity) {
  std::vector<VietorisBasic<Part>> out;
  std::vector<Part> cur;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (!cur.empty()) out.push_back(VietorisBasic<Part>::make(cur));
    if (cur.size() == max_arity) return;
    for (std::size_t i = from; i < parts.size(); ++i) {
      cur.push_back(parts[i]);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<ClopenSet> depth_regions(const CantorCube& space, std::size_t depth) {
  std::vector<ClopenSet> out;
  for (auto& r : cylinder_regions(first_coords(depth), depth))
    if (r.support().empty() || std::all_of(r.support().begin(), r.support().end(), [&](Coord c) { return space.allows(c); }))
      out.push_back(std::move(r));
  return out;
}

inline std::vector<FiniteOpen> depth_regions(const FiniteSpace& space, std::size_t /*depth*/) {
  std::vector<FiniteOpen> out;
  for (const auto& o : space.opens())
    if (!o.points.empty()) out.push_back(o);
  return out;
}

template <class Inner>
std::vector<Region<Hyperspace<Inner>>> depth_regions(const Hyperspace<Inner>& space, std::size_t depth) {
  std::vector<Region<Hyperspace<Inner>>> out;
  for (auto& b : basics_up_to_arity(depth_regions(space.inner(), depth), 2))
    if (space.is_nonempty(b)) out.push_back(std::move(b));
  return out;
}

template <class Inner>
std::vector<Region<SumSpace<Inner>>> depth_regions(const SumSpace<Inner>& space, std::size_t depth) {
  std::vector<Region<SumSpace<Inner>>> out;
  const auto inner = depth_regions(space.inner(), depth);
  for (std::uint32_t s = 0; s < space.count(); ++s)
    for (const auto& r : inner) out.push_back(space.make({{s, r}}));
  return out;
}

/// Test-family descriptors: `depth:<d>`, `cyl:<J comma list>:<maxDom>`
/// (Cantor cubes only), `none`.
template <Space S>
TestFamily<Region<S>> make_test_family(const S& space, const std::string& descriptor) {
  TestFamily<Region<S>> tf;
  tf.descriptor = descriptor;
  if (descriptor == "none") return tf;
  auto parse_uint = [&](const std::string& s) -> std::size_t {
    if (s.empty() || s.size() > 6 || s.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("bad number in test-family descriptor: " + descriptor);
    return std::stoul(s);
  };
  if (descriptor.rfind("depth:", 0) == 0) {
    tf.regions = depth_regions(space, parse_uint(descriptor.substr(6)));
    return tf;
  }
  if (descriptor.rfind("cyl:", 0) == 0) {
    if constexpr (CylinderSpace<S>) {
      const auto rest = descriptor.substr(4);
      const auto colon = rest.rfind(':');
      if (colon == std::string::npos) throw ConfigError("cyl:<J>:<maxDom> expected: " + descriptor);
      CoordSet j;
      std::string list = rest.substr(0, colon);
      std::size_t pos = 0;
      while (pos < list.size()) {
        auto comma = list.find(',', pos);
        if (comma == std::string::npos) comma = list.size();
        j.insert(static_cast<Coord>(parse_uint(list.substr(pos, comma - pos))));
        pos = comma + 1;
      }
      tf.regions = cylinder_regions(j, parse_uint(rest.substr(colon + 1)));
      return tf;
    } else {
      throw ConfigError("cyl: test families need a Cantor cube");
    }
  }
  throw ConfigError("unknown test-family descriptor: " + descriptor);
}

// ---------------------------------------------------------------------------
// Transcript JSON
// ---------------------------------------------------------------------------

inline constexpr int kTranscriptVersion = 1;

template <Space S>
json certificate_to_json(const S& space, const DensityCertificate<Region<S>>& c) {
  json j{{"k", c.k}, {"status", c.pass ? "pass" : "fail"}};
  if (c.pass) {
    json meets = json::array();
    for (const auto& m : c.meets) meets.push_back(json{{"test", m.test}, {"round", m.round}, {"set", m.set}});
    j["meets"] = std::move(meets);
  } else {
    j["failing"] = json{{"index", *c.failing}, {"region", space.encode(*c.failing_region)}};
  }
  return j;
}

template <Space S>
DensityCertificate<Region<S>> certificate_from_json(const S& space, const json& j) {
  DensityCertificate<Region<S>> c;
  try {
    c.k = j.at("k").get<std::size_t>();
    const auto status = j.at("status").get<std::string>();
    if (status == "pass") {
      c.pass = true;
      for (const auto& m : j.at("meets"))
        c.meets.push_back({m.at("test").get<std::size_t>(), m.at("round").get<std::size_t>(),
                           m.at("set").get<std::size_t>()});
    } else if (status == "fail") {
      c.failing = j.at("failing").at("index").get<std::size_t>();
      c.failing_region = space.decode(j.at("failing").at("region"));
    } else {
      throw ConfigError("unknown certificate status: " + status);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed certificate: ") + e.what());
  }
  return c;
}

template <Space S>
json transcript_to_json(const S& space, const Transcript<S>& t) {
  json rounds = json::array();
  for (const auto& f : t.rounds) {
    json sets = json::array();
    for (const auto& s : f.sets) sets.push_back(space.encode(s));
    rounds.push_back(json{{"owner", to_string(f.owner)}, {"sets", std::move(sets)}});
  }
  json certs = json::array();
  for (const auto& c : t.certificates) certs.push_back(certificate_to_json(space, c));
  return json{{"version", kTranscriptVersion},
              {"space", t.space},
              {"seed", t.seed},
              {"roundsN", t.rounds_n},
              {"strategies", {{"p1", t.p1}, {"p2", t.p2}}},
              {"testFamily", t.test_family},
              {"rounds", std::move(rounds)},
              {"certificates", std::move(certs)}};
}

/// Parses the schema only; legality is checked separately so that a tampered
/// file can be reported with the offending round.
template <Space S>
Transcript<S> transcript_from_json(const S& space, const json& j) {
  static const std::set<std::string> known{"version", "space", "seed", "roundsN", "strategies",
                                           "testFamily", "rounds", "certificates"};
  if (!j.is_object()) throw ConfigError("transcript must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown transcript field: " + key);
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kTranscriptVersion)
    throw ConfigError("unsupported transcript version");
  Transcript<S> t;
  try {
    t.space = j.at("space").get<std::string>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.rounds_n = j.at("roundsN").get<int>();
    t.p1 = j.at("strategies").at("p1").get<std::string>();
    t.p2 = j.at("strategies").at("p2").get<std::string>();
    t.test_family = j.value("testFamily", std::string("none"));
    for (const auto& r : j.at("rounds")) {
      MoveFamily<Region<S>> f;
      f.owner = parse_player(r.at("owner").get<std::string>());
      for (const auto& s : r.at("sets")) f.sets.push_back(space.decode(s));
      t.rounds.push_back(std::move(f));
    }
    if (j.contains("certificates"))
      for (const auto& c : j["certificates"]) t.certificates.push_back(certificate_from_json(space, c));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed transcript: ") + e.what());
  }
  if (t.space != space.descriptor())
    throw ConfigError("transcript space " + t.space + " does not match " + space.descriptor());
  return t;
}

/// Re-validates every move of a parsed transcript in order.
template <Space S>
void check_transcript(const S& space, const Transcript<S>& t) {
  Transcript<S> replay;
  replay.seed = t.seed;
  for (const auto& f : t.rounds) append_move(space, replay, f);
}

}  // namespace oog
