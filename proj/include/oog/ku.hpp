#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "oog/clubfilter.hpp"

namespace oog {

// ---------------------------------------------------------------------------
// Dense open sets E ⊆ X × Y as oracles; X is always a Cantor cube
// ---------------------------------------------------------------------------

template <Space Y>
struct Box {
  ClopenSet u;
  std::vector<Region<Y>> vs;

  friend bool operator==(const Box&, const Box&) = default;
};

/// E is known only through the refinement fact (every box U × V_i has a
/// sub-box U* × V_i* inside E, with one U* for all i) and a box test.
template <Space Y>
class DenseOpenOracle {
 public:
  virtual ~DenseOpenOracle() = default;
  virtual std::string name() const = 0;
  virtual Box<Y> refine(const ClopenSet& u, const std::vector<Region<Y>>& vs) const = 0;
  /// U × V ⊆ E.
  virtual bool contains_box(const ClopenSet& u, const Region<Y>& v) const = 0;
};

namespace detail {

inline const Cylinder& first_cylinder(const ClopenSet& s, const char* what) {
  if (s.empty()) throw ContractViolation(std::string("oracle refine: empty ") + what);
  return s.cylinders().front();
}

inline void check_cap(const Cylinder& c, const Limits& limits) {
  if (c.size() > limits.support_cap)
    throw CapExceeded("oracle refinement needs " + std::to_string(c.size()) + " coordinates");
}

}  // namespace detail

/// E = {(x, y) : y ≠ h(x)} where h(x)(π(c)) = x(c) for a finite permutation
/// π of coordinates (identity elsewhere). With π = id this is X × Y minus the
/// diagonal.
class GraphComplementOracle : public DenseOpenOracle<CantorCube> {
 public:
  explicit GraphComplementOracle(std::map<Coord, Coord> perm = {}, Limits limits = {})
      : perm_(std::move(perm)), limits_(limits) {
    std::set<Coord> dom, img;
    for (const auto& [a, b] : perm_) {
      dom.insert(a);
      img.insert(b);
    }
    if (dom != img || img.size() != perm_.size())
      throw ConfigError("graph oracle: the coordinate map is not a permutation of a finite set");
  }

  std::string name() const override {
    if (perm_.empty()) return "diag";
    std::string s = "graph:";
    bool first = true;
    for (const auto& [a, b] : perm_) {
      if (a == b) continue;
      s += (first ? "" : ",") + std::to_string(a) + ">" + std::to_string(b);
      first = false;
    }
    return first ? "diag" : s;
  }

  Coord pi(Coord c) const {
    auto it = perm_.find(c);
    return it == perm_.end() ? c : it->second;
  }

  ClopenSet image(const ClopenSet& u) const {
    std::vector<Cylinder> out;
    for (const auto& c : u.cylinders()) out.push_back(c.relabel(perm_));
    return ClopenSet::normalize(std::move(out));
  }

  /// Smallest α outside supp(U) with π(α) outside every supp(V_i); forces
  /// x(α) = 0 and y(π(α)) = 1.
  Box<CantorCube> refine(const ClopenSet& u, const std::vector<ClopenSet>& vs) const override {
    CoordSet vsupp;
    for (const auto& v : vs) add_support(vsupp, v);
    Coord alpha = 0;
    while (u.support().contains(alpha) || vsupp.contains(pi(alpha))) ++alpha;
    Box<CantorCube> out;
    const Cylinder us = detail::first_cylinder(u, "U").with(alpha, 0);
    detail::check_cap(us, limits_);
    out.u = ClopenSet::of(us);
    for (const auto& v : vs) {
      const Cylinder c = detail::first_cylinder(v, "V").with(pi(alpha), 1);
      detail::check_cap(c, limits_);
      out.vs.push_back(ClopenSet::of(c));
    }
    return out;
  }

  bool contains_box(const ClopenSet& u, const ClopenSet& v) const override { return !meets(image(u), v); }

 private:
  std::map<Coord, Coord> perm_;
  Limits limits_;
};

inline std::unique_ptr<GraphComplementOracle> off_diagonal_oracle(Limits limits = {}) {
  return std::make_unique<GraphComplementOracle>(std::map<Coord, Coord>{}, limits);
}

/// X × exp(X) minus {(x, A) : x ∈ A}. A box U × ⟨V_1,…,V_n⟩ lies in E iff U
/// misses every V_i; refine forces a fresh α to 0 in U and to 1 in every part.
class HyperspaceOffDiagonalOracle : public DenseOpenOracle<Hyperspace<CantorCube>> {
 public:
  explicit HyperspaceOffDiagonalOracle(Limits limits = {}) : limits_(limits) {}

  std::string name() const override { return "diag"; }

  Box<Hyperspace<CantorCube>> refine(const ClopenSet& u, const std::vector<CantorBasic>& vs) const override {
    CoordSet used = u.support();
    for (const auto& v : vs) add_support(used, v);
    const Coord alpha = smallest_fresh(used);
    Box<Hyperspace<CantorCube>> out;
    const Cylinder us = detail::first_cylinder(u, "U").with(alpha, 0);
    detail::check_cap(us, limits_);
    out.u = ClopenSet::of(us);
    for (const auto& v : vs) {
      std::vector<ClopenSet> parts;
      for (const auto& p : v.parts) {
        const Cylinder c = detail::first_cylinder(p, "part").with(alpha, 1);
        detail::check_cap(c, limits_);
        parts.push_back(ClopenSet::of(c));
      }
      out.vs.push_back(CantorBasic::make(std::move(parts)));
    }
    return out;
  }

  bool contains_box(const ClopenSet& u, const CantorBasic& v) const override {
    for (const auto& p : v.parts)
      if (meets(u, p)) return false;
    return true;
  }

 private:
  Limits limits_;
};

/// A base oracle with one box removed from E. Not dense when the hole is
/// nonempty; used as a negative control.
template <Space Y>
class BoxRemovedOracle : public DenseOpenOracle<Y> {
 public:
  BoxRemovedOracle(std::shared_ptr<const DenseOpenOracle<Y>> base, Y space, ClopenSet hole_u, Region<Y> hole_v)
      : base_(std::move(base)), space_(std::move(space)), hole_u_(std::move(hole_u)), hole_v_(std::move(hole_v)) {}

  std::string name() const override { return base_->name() + " minus " + hole_u_.str() + " x " + space_.str(hole_v_); }
  Box<Y> refine(const ClopenSet& u, const std::vector<Region<Y>>& vs) const override { return base_->refine(u, vs); }
  bool contains_box(const ClopenSet& u, const Region<Y>& v) const override {
    if (meets(u, hole_u_) && space_.meets(v, hole_v_)) return false;
    return base_->contains_box(u, v);
  }

 private:
  std::shared_ptr<const DenseOpenOracle<Y>> base_;
  Y space_;
  ClopenSet hole_u_;
  Region<Y> hole_v_;
};

// ---------------------------------------------------------------------------
// Nowhere dense closed sets D and E = X × Y \ cl D
// ---------------------------------------------------------------------------

/// A closed nowhere dense D ⊆ X × Y given by a callback that shrinks a box
/// off D, and optionally a decidable test for whether a box meets D.
template <Space Y>
class ClosedSetHandle {
 public:
  virtual ~ClosedSetHandle() = default;
  virtual std::string name() const = 0;
  virtual Box<Y> avoid(const ClopenSet& u, const std::vector<Region<Y>>& vs) const = 0;
  virtual std::optional<bool> meets_box(const ClopenSet& u, const Region<Y>& v) const = 0;
};

class DiagonalSet : public ClosedSetHandle<CantorCube> {
 public:
  explicit DiagonalSet(std::map<Coord, Coord> perm = {}, Limits limits = {}) : graph_(std::move(perm), limits) {}
  std::string name() const override { return graph_.name(); }
  Box<CantorCube> avoid(const ClopenSet& u, const std::vector<ClopenSet>& vs) const override {
    return graph_.refine(u, vs);
  }
  std::optional<bool> meets_box(const ClopenSet& u, const ClopenSet& v) const override {
    return !graph_.contains_box(u, v);
  }

 private:
  GraphComplementOracle graph_;
};

template <Space Y>
class EmptyClosedSet : public ClosedSetHandle<Y> {
 public:
  std::string name() const override { return "empty"; }
  Box<Y> avoid(const ClopenSet& u, const std::vector<Region<Y>>& vs) const override { return {u, vs}; }
  std::optional<bool> meets_box(const ClopenSet&, const Region<Y>&) const override { return false; }
};

/// E = complement of cl D. The callback's answers are checked: a sub-box,
/// nonempty, and disjoint from D whenever D can decide that.
template <Space Y>
class NowhereDenseAdapter : public DenseOpenOracle<Y> {
 public:
  NowhereDenseAdapter(std::shared_ptr<const ClosedSetHandle<Y>> d, Y space) : d_(std::move(d)), space_(std::move(space)) {}

  std::string name() const override { return "nd:" + d_->name(); }

  Box<Y> refine(const ClopenSet& u, const std::vector<Region<Y>>& vs) const override {
    Box<Y> out = d_->avoid(u, vs);
    const std::string who = "nowhere dense set " + d_->name() + ": ";
    if (!is_nonempty(out.u) || !subset(out.u, u)) throw ContractViolation(who + "avoid returned U* not inside U");
    if (out.vs.size() != vs.size()) throw ContractViolation(who + "avoid changed the number of V's");
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (!space_.is_nonempty(out.vs[i]) || !space_.subset(out.vs[i], vs[i]))
        throw ContractViolation(who + "avoid returned V* = " + space_.str(out.vs[i]) + " not inside V = " +
                                space_.str(vs[i]));
      if (auto hit = d_->meets_box(out.u, out.vs[i]); hit && *hit)
        throw ContractViolation(who + "avoid returned a box meeting the set");
    }
    return out;
  }

  bool contains_box(const ClopenSet& u, const Region<Y>& v) const override {
    auto hit = d_->meets_box(u, v);
    if (!hit) throw ContractViolation("nowhere dense set " + d_->name() + " cannot decide box membership");
    return !*hit;
  }

 private:
  std::shared_ptr<const ClosedSetHandle<Y>> d_;
  Y space_;
};

// ---------------------------------------------------------------------------
// The refinement tree
// ---------------------------------------------------------------------------

/// One node of the tree: a parent piece R (a cell of W_{n-1}, or X at the
/// root), Player I's A_n on this branch, and W_n^R. Cells w[0..explored)
/// are the Q_n found by the oracle with their B_n(Q_n); the remaining cells
/// partition the rest of R and are not expanded.
template <class RY>
struct KuNode {
  std::vector<std::size_t> path;
  std::size_t round = 0;
  ClopenSet region;
  std::vector<RY> a;
  std::vector<ClopenSet> w;
  std::size_t explored = 0;
  std::vector<std::vector<RY>> b;              // per explored cell
  std::vector<std::optional<std::size_t>> children;  // node index, nullopt for leaves and pruned cells
  std::vector<bool> pruned;                    // per explored cell
};

/// A complete branch Q_0 ⊇ … ⊇ Q_{N-1} with its Y-side game.
template <Space Y>
struct KuBranch {
  std::vector<std::size_t> path;
  std::vector<ClopenSet> q;
  Transcript<Y> game;
};

template <Space Y>
struct KuResult {
  int rounds_n = 0;
  int branching = 0;
  std::uint64_t seed = 0;
  std::string oracle;
  std::string strategy;
  std::string y_space;
  std::vector<KuNode<Region<Y>>> nodes;
  std::vector<KuBranch<Y>> branches;
  std::size_t pruned = 0;
  std::vector<Cylinder> p_report;  // X \ ∩_n ∪W_n as disjoint cylinders
};

inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t path_seed(std::uint64_t seed, const std::vector<std::size_t>& path) {
  std::uint64_t s = mix_seed(seed);
  for (std::size_t i : path) s = mix_seed(s ^ (i + 1));
  return s;
}

/// On each branch, round n: A_n from sI; the oracle refines the parent piece
/// against canonical base sets of each U ∈ A_n, giving Q_n and B_n(Q_n);
/// repeating on what is left of the piece gives up to `branching` cells, and
/// the remainder is split into disjoint cylinders so that W_n partitions the
/// piece. Each Q_n is expanded in the next round, at most max_branches per
/// level in canonical order; the rest are recorded as pruned.
template <Space Y>
KuResult<Y> run_ku_construction(const CantorCube& x_space, const Y& y_space, const DenseOpenOracle<Y>& e,
                                Strategy<Y>& player_one, int rounds_n, int branching, std::uint64_t seed,
                                const Limits& limits = {}) {
  if (rounds_n < 1) throw ConfigError("ku construction needs at least one round");
  if (branching < 1) throw ConfigError("ku construction needs branching >= 1");
  if (x_space.descriptor() != "cantor")
    throw ConfigError("ku construction needs X = cantor (unbounded)");
  KuResult<Y> r;
  r.rounds_n = rounds_n;
  r.branching = branching;
  r.seed = seed;
  r.oracle = e.name();
  r.strategy = player_one.name();
  r.y_space = y_space.descriptor();
  player_one.prepare(y_space, rounds_n);

  struct Live {
    std::size_t node;
    Transcript<Y> game;
    std::vector<ClopenSet> q;
  };
  Transcript<Y> start;
  start.space = y_space.descriptor();
  start.seed = seed;
  start.rounds_n = rounds_n;
  start.p1 = player_one.name();
  start.p2 = "oracle:" + e.name();
  r.nodes.push_back({{}, 0, x_space.whole(), {}, {}, 0, {}, {}, {}});
  std::vector<Live> level{{0, start, {}}};

  for (int n = 0; n < rounds_n; ++n) {
    std::vector<Live> next;
    for (auto& live : level) {
      const std::string where = "ku round " + std::to_string(n) + " branch " + std::to_string(live.node) + ": ";
      Transcript<Y> game = live.game;
      Rng rng = round_rng(path_seed(seed, r.nodes[live.node].path), static_cast<std::size_t>(n), Player::one);
      auto a = player_one.next_move(y_space, game, rng);
      a.owner = Player::one;
      append_move(y_space, game, a);
      std::vector<Region<Y>> targets;
      for (const auto& u : a.sets) targets.push_back(y_space.canonical_refinement(u));

      KuNode<Region<Y>> node = r.nodes[live.node];
      node.a = a.sets;
      ClopenSet pending = node.region;
      std::vector<Transcript<Y>> games;
      for (int k = 0; k < branching && !pending.empty(); ++k) {
        const ClopenSet cell = ClopenSet::of(pending.cylinders().front());
        Box<Y> box = e.refine(cell, targets);
        if (!is_nonempty(box.u) || !subset(box.u, cell))
          throw ContractViolation(where + "oracle " + e.name() + " returned U* outside the cell " + cell.str());
        if (box.vs.size() != targets.size())
          throw ContractViolation(where + "oracle " + e.name() + " returned the wrong number of V*");
        for (std::size_t i = 0; i < targets.size(); ++i) {
          if (!y_space.is_nonempty(box.vs[i]) || !y_space.subset(box.vs[i], targets[i]))
            throw ContractViolation(where + "oracle " + e.name() + " returned V* outside " + y_space.str(targets[i]));
          if (!e.contains_box(box.u, box.vs[i]))
            throw ContractViolation(where + "oracle " + e.name() + " returned a box outside E");
        }
        auto b = make_family(Player::two, box.vs);
        Transcript<Y> g = game;
        append_move(y_space, g, b);
        node.w.push_back(box.u);
        node.b.push_back(b.sets);
        games.push_back(std::move(g));
        pending = difference(pending, box.u);
      }
      node.explored = node.w.size();
      for (auto& c : difference_pieces(pending, ClopenSet{})) node.w.push_back(ClopenSet::of(std::move(c)));
      node.children.assign(node.explored, std::nullopt);
      node.pruned.assign(node.explored, false);

      for (std::size_t k = 0; k < node.explored; ++k) {
        auto path = node.path;
        path.push_back(k);
        auto q = live.q;
        q.push_back(node.w[k]);
        if (n + 1 == rounds_n) {
          if (r.branches.size() < limits.max_branches) {
            r.branches.push_back({path, q, games[k]});
          } else {
            node.pruned[k] = true;
            ++r.pruned;
          }
        } else if (next.size() < limits.max_branches) {
          r.nodes.push_back({path, static_cast<std::size_t>(n + 1), node.w[k], {}, {}, 0, {}, {}, {}});
          node.children[k] = r.nodes.size() - 1;
          next.push_back({r.nodes.size() - 1, std::move(games[k]), std::move(q)});
        } else {
          node.pruned[k] = true;
          ++r.pruned;
        }
      }
      r.nodes[live.node] = std::move(node);
    }
    level = std::move(next);
  }

  // ∪W_n is the union of the level-n pieces; the sets are nested, so the
  // intersection over n < N is the union of the last level's pieces.
  std::vector<ClopenSet> last;
  for (const auto& nd : r.nodes)
    if (nd.round + 1 == static_cast<std::size_t>(rounds_n)) last.push_back(nd.region);
  r.p_report = difference_pieces(x_space.whole(), unite(std::span<const ClopenSet>(last)));
  return r;
}

// ---------------------------------------------------------------------------
// Audits and section checks
// ---------------------------------------------------------------------------

struct KuAudit {
  std::size_t box_checks = 0;
  std::size_t box_failures = 0;
  std::size_t nesting_failures = 0;
  std::size_t antichain_failures = 0;
  std::size_t cover_failures = 0;
  std::size_t legality_failures = 0;
  std::vector<std::string> messages;

  bool ok() const {
    return box_failures == 0 && nesting_failures == 0 && antichain_failures == 0 && cover_failures == 0 &&
           legality_failures == 0;
  }
};

/// Re-checks a tree independently of how it was built.
template <Space Y>
KuAudit audit_ku(const Y& y_space, const DenseOpenOracle<Y>& e, const KuResult<Y>& r) {
  KuAudit out;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const auto& nd = r.nodes[i];
    const std::string where = "node " + std::to_string(i) + ": ";
    for (std::size_t k = 0; k < nd.explored; ++k)
      for (const auto& v : nd.b[k]) {
        ++out.box_checks;
        if (!e.contains_box(nd.w[k], v)) {
          ++out.box_failures;
          out.messages.push_back(where + "box " + nd.w[k].str() + " x " + y_space.str(v) + " not in E");
        }
      }
    for (std::size_t k = 0; k < nd.w.size(); ++k) {
      if (!subset(nd.w[k], nd.region)) {
        ++out.nesting_failures;
        out.messages.push_back(where + "cell " + nd.w[k].str() + " not inside its parent");
      }
      for (std::size_t l = 0; l < k; ++l)
        if (meets(nd.w[k], nd.w[l])) {
          ++out.antichain_failures;
          out.messages.push_back(where + "cells " + std::to_string(l) + " and " + std::to_string(k) + " overlap");
        }
    }
    if (!equivalent(unite(std::span<const ClopenSet>(nd.w)), nd.region)) {
      ++out.cover_failures;
      out.messages.push_back(where + "cells do not cover the parent piece");
    }
  }
  for (std::size_t i = 0; i < r.branches.size(); ++i) {
    const auto& br = r.branches[i];
    for (std::size_t n = 1; n < br.q.size(); ++n)
      if (!subset(br.q[n], br.q[n - 1])) {
        ++out.nesting_failures;
        out.messages.push_back("branch " + std::to_string(i) + ": Q_" + std::to_string(n) + " not inside Q_" +
                               std::to_string(n - 1));
      }
    try {
      check_transcript(y_space, br.game);
      if (br.game.completed_rounds() != static_cast<std::size_t>(r.rounds_n))
        throw ContractViolation("incomplete game");
    } catch (const Error& err) {
      ++out.legality_failures;
      out.messages.push_back("branch " + std::to_string(i) + ": " + err.what());
    }
  }
  return out;
}

template <class RY>
struct SectionCheck {
  std::size_t branch = 0;
  std::size_t sample = 0;
  Cylinder x;
  std::size_t test = 0;
  bool pass = false;
  std::optional<ClopenSet> u_star;
  std::optional<RY> v_star;
};

template <class RY>
struct SectionReport {
  std::vector<SectionCheck<RY>> checks;
  std::size_t passed = 0;
  std::size_t failed = 0;
};

inline constexpr Coord kSampleExtraCoords = 3;

/// Point approximations along each branch: the leaf cylinder completed with
/// seeded bits on every coordinate in `coords` and on every coordinate up to
/// a few past the leaf's support.
template <Space Y>
std::vector<std::vector<Cylinder>> sample_points(const KuResult<Y>& r, std::size_t samples, const CoordSet& coords,
                                                 std::uint64_t seed) {
  std::vector<std::vector<Cylinder>> out;
  for (std::size_t i = 0; i < r.branches.size(); ++i) {
    Rng rng = round_rng(path_seed(seed, r.branches[i].path), 0, Player::two);
    std::vector<Cylinder> xs;
    const Cylinder& leaf = r.branches[i].q.back().cylinders().front();
    CoordSet fill = coords;
    const Coord top = leaf.is_whole() ? 0 : leaf.literals().back().coord + 1;
    for (Coord c = 0; c < top + kSampleExtraCoords; ++c) fill.insert(c);
    for (std::size_t s = 0; s < samples; ++s) {
      Cylinder x = leaf;
      for (Coord c : fill)
        if (!x.fixes(c)) x = x.with(c, static_cast<std::uint8_t>(uniform_below(rng, 2)));
      xs.push_back(std::move(x));
    }
    out.push_back(std::move(xs));
  }
  return out;
}

/// Certifies that E_x meets t: some box U* × V* ⊆ E with U* ⊆ W_x and
/// V* ⊆ t. Tries t itself, then (Cantor Y) the cells of t over the joint
/// support of x and t.
template <Space Y>
std::optional<Box<Y>> section_witness(const Y& y_space, const DenseOpenOracle<Y>& e, const Cylinder& x,
                                      const Region<Y>& t, const Limits& limits = {}) {
  const ClopenSet xs = ClopenSet::of(x);
  auto attempt = [&](const Region<Y>& cand) -> std::optional<Box<Y>> {
    Box<Y> box = e.refine(xs, {cand});
    if (box.vs.size() != 1 || !is_nonempty(box.u) || !subset(box.u, xs)) return std::nullopt;
    if (!y_space.is_nonempty(box.vs[0]) || !y_space.subset(box.vs[0], t)) return std::nullopt;
    if (!e.contains_box(box.u, box.vs[0])) return std::nullopt;
    return box;
  };
  if (auto b = attempt(t)) return b;
  if constexpr (std::is_same_v<Y, CantorCube>) {
    CoordSet joint = t.support();
    for (const auto& l : x.literals()) joint.insert(l.coord);
    for (const auto& cell : full_assignments(joint, limits.support_cap)) {
      const ClopenSet c = ClopenSet::of(cell);
      if (!subset(c, t)) continue;
      if (auto b = attempt(c)) return b;
    }
  }
  return std::nullopt;
}

template <Space Y>
CoordSet test_support(const TestFamily<Region<Y>>& tf) {
  CoordSet out;
  for (const auto& t : tf.regions) add_support(out, t);
  return out;
}

template <Space Y>
SectionReport<Region<Y>> verify_sections(const Y& y_space, const KuResult<Y>& r, const DenseOpenOracle<Y>& e,
                                         std::size_t samples, const TestFamily<Region<Y>>& tf, std::uint64_t seed,
                                         const Limits& limits = {}) {
  SectionReport<Region<Y>> rep;
  const auto points = sample_points(r, samples, test_support<Y>(tf), seed);
  for (std::size_t b = 0; b < points.size(); ++b)
    for (std::size_t s = 0; s < points[b].size(); ++s)
      for (std::size_t i = 0; i < tf.regions.size(); ++i) {
        SectionCheck<Region<Y>> c;
        c.branch = b;
        c.sample = s;
        c.x = points[b][s];
        c.test = i;
        if (auto box = section_witness(y_space, e, c.x, tf.regions[i], limits)) {
          c.pass = true;
          c.u_star = box->u;
          c.v_star = box->vs.front();
          ++rep.passed;
        } else {
          ++rep.failed;
        }
        rep.checks.push_back(std::move(c));
      }
  return rep;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

template <Space Y>
json ku_to_json(const Y& y_space, const KuResult<Y>& r) {
  auto regions = [&](const std::vector<Region<Y>>& rs) {
    json a = json::array();
    for (const auto& x : rs) a.push_back(y_space.encode(x));
    return a;
  };
  json nodes = json::array();
  for (const auto& nd : r.nodes) {
    json w = json::array();
    for (const auto& c : nd.w) w.push_back(encode_clopen(c));
    json b = json::array();
    for (const auto& f : nd.b) b.push_back(regions(f));
    json children = json::array();
    for (const auto& c : nd.children) children.push_back(c ? json(*c) : json(nullptr));
    nodes.push_back(json{{"path", nd.path},
                         {"round", nd.round},
                         {"Q", encode_clopen(nd.region)},
                         {"A", regions(nd.a)},
                         {"W", std::move(w)},
                         {"explored", nd.explored},
                         {"B", std::move(b)},
                         {"children", std::move(children)},
                         {"pruned", nd.pruned}});
  }
  json branches = json::array();
  for (const auto& br : r.branches) {
    json q = json::array();
    for (const auto& c : br.q) q.push_back(encode_clopen(c));
    branches.push_back(json{{"path", br.path}, {"Q", std::move(q)}, {"game", transcript_to_json(y_space, br.game)}});
  }
  json p = json::array();
  for (const auto& c : r.p_report) p.push_back(encode_cylinder(c));
  return json{{"roundsN", r.rounds_n}, {"branching", r.branching}, {"seed", r.seed},
              {"oracle", r.oracle},    {"p1", r.strategy},          {"spaceY", r.y_space},
              {"nodes", std::move(nodes)}, {"branches", std::move(branches)}, {"pruned", r.pruned},
              {"pReport", std::move(p)}};
}

inline json audit_to_json(const KuAudit& a) {
  return json{{"ok", a.ok()},
              {"boxChecks", a.box_checks},
              {"boxFailures", a.box_failures},
              {"nestingFailures", a.nesting_failures},
              {"antichainFailures", a.antichain_failures},
              {"coverFailures", a.cover_failures},
              {"legalityFailures", a.legality_failures},
              {"messages", a.messages}};
}

template <Space Y>
json sections_to_json(const Y& y_space, const SectionReport<Region<Y>>& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json j{{"branch", c.branch}, {"sample", c.sample}, {"x", encode_cylinder(c.x)}, {"test", c.test}, {"pass", c.pass}};
    if (c.pass) {
      j["U"] = encode_clopen(*c.u_star);
      j["V"] = y_space.encode(*c.v_star);
    }
    checks.push_back(std::move(j));
  }
  return json{{"passed", rep.passed}, {"failed", rep.failed}, {"checks", std::move(checks)}};
}

}  // namespace oog
