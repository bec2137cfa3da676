#pragma once

#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "oog/game.hpp"

namespace oog {

// ---------------------------------------------------------------------------
// Supports of regions and histories
// ---------------------------------------------------------------------------

inline void add_support(CoordSet& out, const ClopenSet& s) { out.insert(s.support().begin(), s.support().end()); }
inline void add_support(CoordSet& out, const CantorBasic& v) {
  for (const auto& p : v.parts) add_support(out, p);
}
inline void add_support(CoordSet& out, const SumRegion<ClopenSet>& r) {
  for (const auto& [_, p] : r.parts) add_support(out, p);
}

template <Space S>
CoordSet history_support(const Transcript<S>& t) {
  CoordSet out;
  for (const auto& f : t.rounds)
    for (const auto& s : f.sets) add_support(out, s);
  return out;
}

// ---------------------------------------------------------------------------
// Player I on the Cantor cube
// ---------------------------------------------------------------------------

/// J_n and the cylinders W_q ⊆ Q chosen from B_{n-1}, per round.
struct CantorStrategyState {
  std::vector<CoordSet> j;                       // J_0 = ∅, J_1, …
  std::vector<std::vector<Cylinder>> chosen;     // chosen[n-1]: W_q for each Q ∈ B_{n-1}
};

/// Canonical W_q ⊆ Q: the first cylinder of Q's normal form.
inline const Cylinder& chosen_cylinder(const ClopenSet& q) {
  if (q.empty()) throw ContractViolation("cannot choose a cylinder inside the empty set");
  return q.cylinders().front();
}

template <class T>
CantorStrategyState cantor_state(const Transcript<T>& t) {
  CantorStrategyState st;
  st.j.push_back({});
  for (std::size_t n = 0; n < t.completed_rounds(); ++n) {
    CoordSet j;
    std::vector<Cylinder> chosen;
    for (const auto& q : t.b(n).sets) {
      chosen.push_back(chosen_cylinder(q));
      const auto d = chosen.back().domain();
      j.insert(d.begin(), d.end());
    }
    st.j.push_back(std::move(j));
    st.chosen.push_back(std::move(chosen));
  }
  return st;
}

/// The Cantor-cube winning strategy: A_0 = {D^λ}; afterwards pick W_q ⊆ Q
/// for each Q ∈ B_{n-1}, let J_n be the union of their domains and play every
/// cylinder W_f with f ∈ D^{J_n}.
///
/// With `truncate_to` set, J_n is cut down to its smallest `truncate_to`
/// coordinates instead of failing on the cap. The moves stay legal (Player I
/// may offer any family), but the strategy is then no longer the winning one.
class CantorPlayerOne : public Strategy<CantorCube> {
 public:
  explicit CantorPlayerOne(Limits limits = {}, std::optional<std::size_t> truncate_to = std::nullopt)
      : limits_(limits), truncate_to_(truncate_to) {}

  std::string name() const override {
    return truncate_to_ ? "cantor-p1:" + std::to_string(*truncate_to_) : "cantor-p1";
  }

  /// J_n for the next round; throws CapExceeded when over the cap.
  CoordSet next_index_set(const Transcript<CantorCube>& history) const {
    const std::size_t n = history.current_round();
    CoordSet j;
    if (n == 0) return j;
    for (const auto& q : history.b(n - 1).sets) {
      const auto d = chosen_cylinder(q).domain();
      j.insert(d.begin(), d.end());
    }
    if (truncate_to_ && j.size() > *truncate_to_) j.erase(std::next(j.begin(), static_cast<long>(*truncate_to_)), j.end());
    if (j.size() > limits_.cantor_j_cap)
      throw CapExceeded("|J_" + std::to_string(n) + "| = " + std::to_string(j.size()) + " exceeds " +
                        std::to_string(limits_.cantor_j_cap));
    if (j.size() >= 63 || (std::size_t{1} << j.size()) > limits_.family_cap)
      throw CapExceeded("family of 2^" + std::to_string(j.size()) + " cylinders exceeds " +
                        std::to_string(limits_.family_cap));
    return j;
  }

  MoveFamily<ClopenSet> next_move(const CantorCube&, const Transcript<CantorCube>& history, Rng&) override {
    if (history.current_round() == 0) return {Player::one, {ClopenSet::whole()}};
    MoveFamily<ClopenSet> a{Player::one, {}};
    for (auto& f : full_assignments(next_index_set(history), limits_.support_cap))
      a.sets.push_back(ClopenSet::of(std::move(f)));
    return a;
  }

 private:
  Limits limits_;
  std::optional<std::size_t> truncate_to_;
};

// ---------------------------------------------------------------------------
// Scripted play
// ---------------------------------------------------------------------------

/// Replays a fixed list of families, one per turn of its seat.
template <Space S>
class ScriptedStrategy : public Strategy<S> {
 public:
  ScriptedStrategy(std::vector<std::vector<Region<S>>> moves, std::string name = "scripted")
      : moves_(std::move(moves)), name_(std::move(name)) {}

  /// File format: a JSON array of families, each an array of regions.
  static std::unique_ptr<ScriptedStrategy> load(const S& space, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open script: " + path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("script " + path + ": " + e.what());
    }
    return std::make_unique<ScriptedStrategy>(decode_moves(space, j), "scripted:" + path);
  }

  static std::vector<std::vector<Region<S>>> decode_moves(const S& space, const json& j) {
    if (!j.is_array()) throw ConfigError("script must be an array of families");
    std::vector<std::vector<Region<S>>> moves;
    for (const auto& fam : j) {
      if (!fam.is_array()) throw ConfigError("script family must be an array of regions");
      std::vector<Region<S>> sets;
      for (const auto& r : fam) sets.push_back(space.decode(r));
      moves.push_back(std::move(sets));
    }
    return moves;
  }

  const std::vector<std::vector<Region<S>>>& moves() const { return moves_; }

  std::string name() const override { return name_; }

  void prepare(const S&, int rounds_n) override {
    if (moves_.size() < static_cast<std::size_t>(rounds_n))
      throw ConfigError("scripted list has " + std::to_string(moves_.size()) + " families, budget is " +
                        std::to_string(rounds_n));
  }

  MoveFamily<Region<S>> next_move(const S&, const Transcript<S>& history, Rng&) override {
    const std::size_t n = history.current_round();
    if (n >= moves_.size()) throw ContractViolation("scripted list exhausted at round " + std::to_string(n));
    return {history.to_move(), moves_[n]};
  }

 private:
  std::vector<std::vector<Region<S>>> moves_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Player II: canonical and random refinements
// ---------------------------------------------------------------------------

/// Refines every U by the space's canonical base set inside it.
template <Space S>
class CanonicalPlayerTwo : public Strategy<S> {
 public:
  std::string name() const override { return "canonical-p2"; }
  MoveFamily<Region<S>> next_move(const S& space, const Transcript<S>& history, Rng&) override {
    std::vector<Region<S>> out;
    for (const auto& u : history.a(history.current_round()).sets) out.push_back(space.canonical_refinement(u));
    return make_family(Player::two, std::move(out));
  }
};

namespace detail {

/// A random cylinder of u, extended by up to `max_extension` coordinates drawn
/// from `pool` (existing coordinates plus one fresh one).
inline Cylinder random_cylinder_refinement(const ClopenSet& u, const std::vector<Coord>& pool, int max_extension,
                                           Rng& rng) {
  Cylinder c = u.cylinders()[uniform_below(rng, u.cylinders().size())];
  std::vector<Coord> avail;
  for (Coord x : pool)
    if (!c.fixes(x)) avail.push_back(x);
  std::size_t e = uniform_below(rng, static_cast<std::uint64_t>(std::max(0, max_extension)) + 1);
  e = std::min(e, avail.size());
  for (std::size_t i = 0; i < e; ++i) {
    const std::size_t k = i + uniform_below(rng, avail.size() - i);
    std::swap(avail[i], avail[k]);
    c = c.with(avail[i], static_cast<std::uint8_t>(uniform_below(rng, 2)));
  }
  return c;
}

inline std::vector<Coord> extension_pool(const CantorCube& cube, const CoordSet& used) {
  std::vector<Coord> pool(used.begin(), used.end());
  try {
    pool.push_back(cube.fresh(used));
  } catch (const CapExceeded&) {
  }
  return pool;
}

inline ClopenSet random_refinement(const CantorCube& space, const ClopenSet& u, const CoordSet& used, int max_ext,
                                   Rng& rng) {
  return ClopenSet::of(random_cylinder_refinement(u, extension_pool(space, used), max_ext, rng));
}

inline CantorBasic random_refinement(const Hyperspace<CantorCube>& space, const CantorBasic& u, const CoordSet& used,
                                     int max_ext, Rng& rng) {
  const auto pool = extension_pool(space.inner(), used);
  std::vector<ClopenSet> parts;
  for (const auto& p : u.parts) parts.push_back(ClopenSet::of(random_cylinder_refinement(p, pool, max_ext, rng)));
  return CantorBasic::make(std::move(parts));
}

inline FiniteOpen random_refinement(const FiniteSpace& space, const FiniteOpen& u, const CoordSet&, int, Rng& rng) {
  std::vector<const FiniteOpen*> cands;
  for (const auto& o : space.opens())
    if (!o.points.empty() && space.subset(o, u)) cands.push_back(&o);
  if (cands.empty()) throw ContractViolation("cannot refine the empty set");
  return *cands[uniform_below(rng, cands.size())];
}

inline FiniteBasic random_refinement(const Hyperspace<FiniteSpace>& space, const FiniteBasic& u, const CoordSet& used,
                                     int max_ext, Rng& rng) {
  std::vector<FiniteOpen> parts;
  for (const auto& p : u.parts) parts.push_back(random_refinement(space.inner(), p, used, max_ext, rng));
  auto v = FiniteBasic::make(std::move(parts));
  if (space.is_nonempty(v) && space.subset(v, u)) return v;
  return u;
}

template <class Inner>
SumRegion<Region<Inner>> random_refinement(const SumSpace<Inner>& space, const SumRegion<Region<Inner>>& u,
                                           const CoordSet& used, int max_ext, Rng& rng) {
  const auto& [s, part] = u.parts[uniform_below(rng, u.parts.size())];
  return space.make({{s, random_refinement(space.inner(), part, used, max_ext, rng)}});
}

template <Space S>
CoordSet cantor_history_support(const Transcript<S>& t) {
  if constexpr (std::is_same_v<S, CantorCube> || std::is_same_v<S, Hyperspace<CantorCube>> ||
                std::is_same_v<S, SumSpace<CantorCube>>)
    return history_support(t);
  else
    return {};
}

}  // namespace detail

/// Seeded adversary: each U gets a random cylinder of U extended by at most
/// `max_extension` coordinates taken from those already played plus the
/// smallest fresh one.
template <Space S>
class RandomPlayerTwo : public Strategy<S> {
 public:
  explicit RandomPlayerTwo(int max_extension) : max_extension_(max_extension) {}

  std::string name() const override { return "random-p2:" + std::to_string(max_extension_); }

  MoveFamily<Region<S>> next_move(const S& space, const Transcript<S>& history, Rng& rng) override {
    const CoordSet used = detail::cantor_history_support(history);
    std::vector<Region<S>> out;
    for (const auto& u : history.a(history.current_round()).sets)
      out.push_back(detail::random_refinement(space, u, used, max_extension_, rng));
    return make_family(Player::two, std::move(out));
  }

 private:
  int max_extension_;
};

// ---------------------------------------------------------------------------
// Player II counter-strategies
// ---------------------------------------------------------------------------

/// Against a Player I whose families are all fixed in advance: refine every U
/// inside W_{α↦1} for one coordinate α unused by the whole sequence, so that
/// W_{α↦0} meets nothing Player II ever plays.
class DiagonalPlayerTwo : public Strategy<CantorCube> {
 public:
  explicit DiagonalPlayerTwo(std::vector<std::vector<ClopenSet>> precommitted)
      : precommitted_(std::move(precommitted)) {}

  std::string name() const override { return "diagonal-p2"; }

  void prepare(const CantorCube& space, int rounds_n) override {
    if (precommitted_.size() < static_cast<std::size_t>(rounds_n))
      throw ConfigError("diagonal-p2 needs the full precommitted sequence of " + std::to_string(rounds_n) +
                        " families");
    alpha_ = compute_alpha(space);
  }

  /// Smallest coordinate outside every chosen W_q ⊆ U of the sequence.
  Coord compute_alpha(const CantorCube& space) const {
    CoordSet used;
    for (const auto& fam : precommitted_)
      for (const auto& u : fam) {
        const auto d = chosen_cylinder(u).domain();
        used.insert(d.begin(), d.end());
      }
    return space.fresh(used);
  }

  std::optional<Coord> alpha() const { return alpha_; }

  MoveFamily<ClopenSet> next_move(const CantorCube& space, const Transcript<CantorCube>& history, Rng&) override {
    if (!alpha_) alpha_ = compute_alpha(space);
    const std::size_t n = history.current_round();
    if (n >= precommitted_.size()) throw ContractViolation("diagonal-p2: no precommitted family for this round");
    const auto& live = history.a(n).sets;
    if (live != precommitted_[n])
      throw ContractViolation("diagonal-p2: Player I deviated from the precommitted family at round " +
                              std::to_string(n));
    std::vector<ClopenSet> out;
    for (const auto& u : live) out.push_back(ClopenSet::of(chosen_cylinder(u).with(*alpha_, 1)));
    return make_family(Player::two, std::move(out));
  }

 private:
  std::vector<std::vector<ClopenSet>> precommitted_;
  std::optional<Coord> alpha_;
};

/// Keeps μ(∪B_n) < 2^-(n+offset) by shrinking each refinement with fresh
/// coordinates; the per-round budget is split equally over A_n.
class MeasurePlayerTwo : public Strategy<CantorCube> {
 public:
  explicit MeasurePlayerTwo(int budget_exponent_offset = 2, Limits limits = {})
      : offset_(budget_exponent_offset), limits_(limits) {}

  std::string name() const override { return "measure-p2"; }

  /// Strict per-set bound 2^-(n+offset) / |A_n|.
  Rational per_set_bound(std::size_t n, std::size_t family_size) const {
    return dyadic(n + static_cast<std::size_t>(offset_)) / Rational{family_size};
  }

  MoveFamily<ClopenSet> next_move(const CantorCube& space, const Transcript<CantorCube>& history, Rng&) override {
    const std::size_t n = history.current_round();
    const auto& a = history.a(n).sets;
    const Rational bound = per_set_bound(n, a.size());
    std::vector<std::size_t> extra(a.size(), 0);
    std::size_t most = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Cylinder& c = chosen_cylinder(a[i]);
      while (dyadic(c.size() + extra[i]) >= bound) ++extra[i];
      if (c.size() + extra[i] > limits_.support_cap)
        throw CapExceeded("measure-p2 refinement needs " + std::to_string(c.size() + extra[i]) + " coordinates");
      most = std::max(most, extra[i]);
    }
    CoordSet used = history_support(history);
    std::vector<Coord> fresh;
    for (std::size_t i = 0; i < most; ++i) {
      fresh.push_back(space.fresh(used));
      used.insert(fresh.back());
    }
    std::vector<ClopenSet> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
      Cylinder v = chosen_cylinder(a[i]);
      for (std::size_t e = 0; e < extra[i]; ++e) v = v.with(fresh[e], 0);
      out.push_back(ClopenSet::of(std::move(v)));
    }
    return make_family(Player::two, std::move(out));
  }

 private:
  int offset_;
  Limits limits_;
};

/// μ of everything Player II played.
inline Rational played_measure(const Transcript<CantorCube>& t) {
  std::vector<ClopenSet> all;
  for (std::size_t n = 0; n < t.completed_rounds(); ++n)
    for (const auto& v : t.b(n).sets) all.push_back(v);
  return measure(unite(std::span<const ClopenSet>(all)));
}

/// A cylinder meeting no set played by Player II.
inline std::optional<Cylinder> complement_witness(const Transcript<CantorCube>& t) {
  std::vector<ClopenSet> all;
  for (std::size_t n = 0; n < t.completed_rounds(); ++n)
    for (const auto& v : t.b(n).sets) all.push_back(v);
  return outside_witness(unite(std::span<const ClopenSet>(all)));
}

/// On a sum of many copies: every refinement stays inside one summand, so
/// only finitely many summands are ever touched.
template <class Inner>
class SumPlayerTwo : public Strategy<SumSpace<Inner>> {
 public:
  using S = SumSpace<Inner>;

  std::string name() const override { return "sum-p2"; }

  MoveFamily<Region<S>> next_move(const S& space, const Transcript<S>& history, Rng&) override {
    std::set<std::uint32_t> touched = touched_summands(history);
    std::vector<Region<S>> out;
    for (const auto& u : history.a(history.current_round()).sets) {
      const auto& [s, part] = u.parts.front();
      out.push_back(space.make({{s, space.inner().canonical_refinement(part)}}));
      touched.insert(s);
    }
    if (touched.size() >= space.count())
      throw ContractViolation("sum-p2 touched all " + std::to_string(space.count()) +
                              " summands; the sum needs more summands than sets played");
    return make_family(Player::two, std::move(out));
  }

  static std::set<std::uint32_t> touched_summands(const Transcript<S>& t) {
    std::set<std::uint32_t> out;
    for (std::size_t n = 0; n < t.completed_rounds(); ++n)
      for (const auto& v : t.b(n).sets)
        for (const auto& [s, _] : v.parts) out.insert(s);
    return out;
  }
};

/// Lowest summand Player II never touched; its whole copy meets no play.
template <class Inner>
std::optional<std::uint32_t> untouched_summand(const SumSpace<Inner>& space, const Transcript<SumSpace<Inner>>& t) {
  const auto touched = SumPlayerTwo<Inner>::touched_summands(t);
  for (std::uint32_t s = 0; s < space.count(); ++s)
    if (!touched.contains(s)) return s;
  return std::nullopt;
}

}  // namespace oog
