#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "oog/strategies.hpp"

namespace oog {

/// A finite, canonically ordered member P of a club filter, computed under
/// explicit bounds that are recorded in `provenance`.
template <class R>
struct FilterElement {
  std::vector<R> sets;
  std::vector<std::string> provenance;
};

template <Space S>
bool same_region(const S& space, const Region<S>& a, const Region<S>& b) {
  return a == b || (space.subset(a, b) && space.subset(b, a));
}

/// Collects regions up to semantic equality, keeping first representatives.
template <Space S>
class RegionSet {
 public:
  explicit RegionSet(const S& space) : space_(&space) {}

  bool contains(const Region<S>& r) const {
    if (exact_.contains(r)) return true;
    for (const auto& m : members_)
      if (same_region(*space_, m, r)) return true;
    return false;
  }

  bool insert(Region<S> r) {
    if (contains(r)) return false;
    exact_.insert(r);
    members_.push_back(std::move(r));
    return true;
  }

  const std::vector<Region<S>>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

  std::vector<Region<S>> sorted() const {
    auto out = members_;
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  const S* space_;
  std::set<Region<S>> exact_;
  std::vector<Region<S>> members_;
};

template <Space S>
json filter_to_json(const S& space, const FilterElement<Region<S>>& p) {
  json sets = json::array();
  for (const auto& r : p.sets) sets.push_back(space.encode(r));
  return json{{"space", space.descriptor()}, {"sets", std::move(sets)}, {"provenance", p.provenance}};
}

template <Space S>
FilterElement<Region<S>> filter_from_json(const S& space, const json& j) {
  FilterElement<Region<S>> p;
  try {
    for (const auto& r : j.at("sets")) p.sets.push_back(space.decode(r));
    p.provenance = j.value("provenance", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed filter element: ") + e.what());
  }
  return p;
}

inline std::string coords_str(const CoordSet& j) {
  std::string s;
  for (Coord c : j) s += (s.empty() ? "" : ",") + std::to_string(c);
  return "{" + s + "}";
}

// ---------------------------------------------------------------------------
// C_J
// ---------------------------------------------------------------------------

inline std::size_t count_partial_functions(std::size_t n, std::size_t max_dom) {
  // Σ_{k ≤ max_dom} C(n, k) 2^k
  std::size_t total = 0, binom = 1;
  for (std::size_t k = 0; k <= max_dom && k <= n; ++k) {
    total += binom << k;
    binom = binom * (n - k) / (k + 1);
  }
  return total;
}

/// All cylinders W_f with dom f ⊆ J and |dom f| ≤ maxDom.
inline FilterElement<ClopenSet> canonical_cj(const CoordSet& j, std::size_t max_dom, const Limits& limits = {}) {
  if (max_dom > j.size())
    throw ConfigError("canonical C_J: maxDom " + std::to_string(max_dom) + " exceeds |J| = " + std::to_string(j.size()));
  if (j.size() > limits.support_cap || count_partial_functions(j.size(), max_dom) > limits.filter_cap)
    throw CapExceeded("C_J over " + std::to_string(j.size()) + " coordinates");
  return {cylinder_regions(j, max_dom), {"cj J=" + coords_str(j) + " maxDom=" + std::to_string(max_dom)}};
}

// ---------------------------------------------------------------------------
// Condition (3) and condition (1)
// ---------------------------------------------------------------------------

/// For a witness: the index of W. Otherwise, for each W ∈ P, an index of
/// some U ⊆ W in P disjoint from V.
struct Condition3Report {
  bool holds = false;
  std::optional<std::size_t> witness;
  std::vector<std::pair<std::size_t, std::size_t>> blockers;  // (W, U)
};

/// Answers condition (3) queries against one P, with the subset relation on
/// P computed once.
template <Space S>
class Condition3Checker {
 public:
  Condition3Checker(const S& space, const FilterElement<Region<S>>& p) : space_(&space), p_(&p) {
    below_.resize(p.sets.size());
    for (std::size_t w = 0; w < p.sets.size(); ++w)
      for (std::size_t u = 0; u < p.sets.size(); ++u)
        if (u == w || space.subset(p.sets[u], p.sets[w])) below_[w].push_back(u);
  }

  /// Members U ∈ P with U ⊆ P[w], including P[w] itself.
  const std::vector<std::size_t>& below(std::size_t w) const { return below_[w]; }

  Condition3Report check(const Region<S>& v) const {
    if (!space_->is_nonempty(v)) throw ContractViolation("condition (3) needs a nonempty V");
    Condition3Report rep;
    for (std::size_t w = 0; w < p_->sets.size(); ++w) {
      std::optional<std::size_t> blocker;
      for (std::size_t u : below_[w])
        if (!space_->meets(p_->sets[u], v)) {
          blocker = u;
          break;
        }
      if (!blocker) {
        rep.holds = true;
        rep.witness = w;
        rep.blockers.clear();
        return rep;
      }
      rep.blockers.emplace_back(w, *blocker);
    }
    return rep;
  }

  /// Re-checks a witness without the cached relation.
  bool verify(const Region<S>& v, std::size_t w) const {
    if (w >= p_->sets.size()) return false;
    for (const auto& u : p_->sets)
      if (space_->subset(u, p_->sets[w]) && !space_->meets(u, v)) return false;
    return true;
  }

 private:
  const S* space_;
  const FilterElement<Region<S>>* p_;
  std::vector<std::vector<std::size_t>> below_;
};

template <Space S>
Condition3Report check_condition3(const S& space, const FilterElement<Region<S>>& p, const Region<S>& v) {
  return Condition3Checker<S>(space, p).check(v);
}

/// True iff each element is contained in the next, up to semantic equality.
template <Space S>
bool check_omega_chain(const S& space, const std::vector<FilterElement<Region<S>>>& chain) {
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    RegionSet<S> next(space);
    for (const auto& r : chain[i + 1].sets) next.insert(r);
    for (const auto& r : chain[i].sets)
      if (!next.contains(r)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Intersection closure and the AAA construction
// ---------------------------------------------------------------------------

template <class S>
concept IntersectableSpace = Space<S> && requires(const S& s, const Region<S>& r) {
  { s.intersect(r, r) } -> std::same_as<Region<S>>;
};

/// Closes `members` under nonempty pairwise intersection, up to semantic
/// equality.
template <IntersectableSpace S>
void close_under_intersection(const S& space, RegionSet<S>& members, const Limits& limits) {
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      auto x = space.intersect(members.members()[i], members.members()[j]);
      if (!space.is_nonempty(x)) continue;
      if (members.insert(std::move(x)) && members.size() > limits.filter_cap)
        throw CapExceeded("intersection closure exceeds " + std::to_string(limits.filter_cap) + " members");
    }
}

template <IntersectableSpace S>
FilterElement<Region<S>> intersection_closure(const S& space, const FilterElement<Region<S>>& p,
                                              const Limits& limits = {}) {
  RegionSet<S> members(space);
  for (const auto& r : p.sets) members.insert(r);
  close_under_intersection(space, members, limits);
  auto prov = p.provenance;
  prov.push_back("intersection-closure");
  return {members.sorted(), std::move(prov)};
}

/// First pair of members whose nonempty intersection is not a member.
template <IntersectableSpace S>
std::optional<std::pair<std::size_t, std::size_t>> intersection_gap(const S& space,
                                                                    const FilterElement<Region<S>>& p) {
  RegionSet<S> members(space);
  for (const auto& r : p.sets) members.insert(r);
  for (std::size_t i = 0; i < p.sets.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const auto x = space.intersect(p.sets[i], p.sets[j]);
      if (space.is_nonempty(x) && !members.contains(x)) return std::pair{j, i};
    }
  return std::nullopt;
}

/// σ(F_0, …, F_k): σ's move after Player II played F_0, …, F_k, with σ's own
/// earlier moves filled in. The F_i need not be legal replies.
template <Space S>
std::vector<Region<S>> sigma_apply(const S& space, Strategy<S>& sigma,
                                   const std::vector<const std::vector<Region<S>>*>& seq) {
  Transcript<S> t;
  t.space = space.descriptor();
  for (std::size_t i = 0;; ++i) {
    Rng rng = round_rng(0, i, Player::one);
    auto a = sigma.next_move(space, t, rng);
    if (i == seq.size()) return std::move(a.sets);
    a.owner = Player::one;
    t.rounds.push_back(std::move(a));
    t.rounds.push_back({Player::two, *seq[i]});
  }
}

/// Nonempty subfamilies of `pool` of size ≤ arity, by size then index order.
template <class R>
std::vector<std::vector<R>> subfamilies(const std::vector<R>& pool, std::size_t arity) {
  std::vector<std::vector<R>> out;
  std::vector<std::size_t> idx;
  for (std::size_t size = 1; size <= arity && size <= pool.size(); ++size) {
    idx.resize(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      std::vector<R> f;
      for (std::size_t i : idx) f.push_back(pool[i]);
      out.push_back(std::move(f));
      std::size_t k = size;
      while (k > 0 && idx[k - 1] == pool.size() - size + k - 1) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t i = k; i < size; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return out;
}

/// R_{i+1} = R_i plus every member of σ(F_0,…,F_k) for all sequences of at
/// most `seqlen` subfamilies of R_i of size ≤ `arity` (the empty sequence
/// included), then closed under nonempty pairwise intersection.
template <IntersectableSpace S>
FilterElement<Region<S>> aaa_closure(const S& space, const std::vector<Region<S>>& r0, Strategy<S>& sigma,
                                     int depth, int arity, int seqlen, const Limits& limits = {}) {
  if (depth < 1) throw ConfigError("aaa closure needs depth >= 1");
  if (arity < 1 || seqlen < 0) throw ConfigError("aaa closure needs arity >= 1 and seqlen >= 0");
  sigma.prepare(space, seqlen + 1);
  RegionSet<S> members(space);
  for (const auto& r : r0) {
    if (!space.is_nonempty(r)) throw ContractViolation("aaa closure seed contains an empty set");
    members.insert(r);
  }
  for (int level = 0; level < depth; ++level) {
    const auto pool = members.sorted();
    const auto fams = subfamilies(pool, static_cast<std::size_t>(arity));
    double count = 0;
    for (int len = 0; len <= seqlen; ++len) count += std::pow(static_cast<double>(fams.size()), len);
    if (count > static_cast<double>(limits.sequence_cap))
      throw CapExceeded("aaa closure needs " + std::to_string(static_cast<long double>(count)) + " sequences");
    std::vector<const std::vector<Region<S>>*> seq;
    auto add_all = [&](const std::vector<Region<S>>& out) {
      for (const auto& r : out)
        if (members.insert(r) && members.size() > limits.filter_cap)
          throw CapExceeded("aaa closure exceeds " + std::to_string(limits.filter_cap) + " members");
    };
    auto rec = [&](auto&& self, int remaining) -> void {
      add_all(sigma_apply(space, sigma, seq));
      if (remaining == 0) return;
      for (const auto& f : fams) {
        seq.push_back(&f);
        self(self, remaining - 1);
        seq.pop_back();
      }
    };
    rec(rec, seqlen);
    close_under_intersection(space, members, limits);
  }
  return {members.sorted(),
          {"aaa sigma=" + sigma.name() + " depth=" + std::to_string(depth) + " arity=" + std::to_string(arity) +
           " seqlen=" + std::to_string(seqlen)}};
}

// ---------------------------------------------------------------------------
// Lifts to products and hyperspaces
// ---------------------------------------------------------------------------

/// Boxes ∏_{α ∈ S} W_α with W_α drawn from factor α's element (or left as
/// the whole factor), embedded in the product cube.
inline FilterElement<ClopenSet> product_filter_element(const CantorCube& cube,
                                                       const std::vector<FilterElement<ClopenSet>>& factors,
                                                       const std::set<std::size_t>& index, const Limits& limits = {}) {
  if (!cube.is_product()) throw ConfigError("product filter element needs a product space");
  if (factors.size() != cube.factors())
    throw ConfigError("product filter element: " + std::to_string(factors.size()) + " factor elements for " +
                      std::to_string(cube.factors()) + " factors");
  std::set<ClopenSet> boxes{ClopenSet::whole()};
  std::string trace = "product S={";
  for (std::size_t a : index) {
    if (a >= factors.size()) throw ConfigError("product index " + std::to_string(a) + " out of range");
    trace += (trace.back() == '{' ? "" : ",") + std::to_string(a);
    std::set<ClopenSet> next = boxes;
    for (const auto& b : boxes)
      for (const auto& m : factors[a].sets) {
        next.insert(intersect(b, cube.embed_region(a, m)));
        if (next.size() > limits.filter_cap)
          throw CapExceeded("product element exceeds " + std::to_string(limits.filter_cap) + " boxes");
      }
    boxes = std::move(next);
  }
  return {{boxes.begin(), boxes.end()}, {trace + "}"}};
}

/// P* = {⟨V_1,…,V_n⟩ : V_i ∈ P, n ≤ maxArity}, nonempty, deduplicated by
/// part set. P must be closed under intersection.
template <IntersectableSpace Inner>
FilterElement<Region<Hyperspace<Inner>>> hyperspace_filter_element(const Hyperspace<Inner>& space,
                                                                   const FilterElement<Region<Inner>>& p,
                                                                   std::size_t max_arity, const Limits& limits = {}) {
  if (max_arity < 1) throw ConfigError("maxArity must be at least 1");
  if (auto gap = intersection_gap(space.inner(), p))
    throw ConfigError("hyperspace lift needs an intersection-closed element; " + space.inner().str(p.sets[gap->first]) +
                      " n " + space.inner().str(p.sets[gap->second]) + " is missing");
  double count = 0, binom = 1;
  for (std::size_t k = 1; k <= max_arity && k <= p.sets.size(); ++k) {
    binom = binom * static_cast<double>(p.sets.size() - k + 1) / static_cast<double>(k);
    count += binom;
  }
  if (count > static_cast<double>(limits.filter_cap))
    throw CapExceeded("hyperspace element would have " + std::to_string(static_cast<long double>(count)) + " members");
  FilterElement<Region<Hyperspace<Inner>>> out;
  for (auto& b : basics_up_to_arity(p.sets, max_arity))
    if (space.is_nonempty(b)) out.sets.push_back(std::move(b));
  out.provenance = p.provenance;
  out.provenance.push_back("hyperspace maxArity=" + std::to_string(max_arity));
  return out;
}

/// Condition (3) in exp(X) with the finite point sets of the proof attached:
/// for the witness W* and every U* ⊆ W* in P*, a finite closed set lying in
/// both U* and V*.
struct HyperspaceCondition3Report {
  Condition3Report report;
  std::vector<std::size_t> below;   // members U* ⊆ W*
  std::vector<PointSet> points;     // points[i] ∈ ⟨below[i]⟩ ∩ ⟨V*⟩
  bool verified = false;
};

inline HyperspaceCondition3Report check_condition3_hyperspace(const Condition3Checker<Hyperspace<CantorCube>>& checker,
                                                              const FilterElement<CantorBasic>& pstar,
                                                              const CantorBasic& v) {
  HyperspaceCondition3Report out;
  out.report = checker.check(v);
  if (!out.report.holds) return out;
  out.below = checker.below(*out.report.witness);
  out.verified = true;
  for (std::size_t u : out.below) {
    auto pts = vietoris_meets(pstar.sets[u], v);
    if (!pts || !vietoris_contains(pstar.sets[u], *pts) || !vietoris_contains(v, *pts)) {
      out.verified = false;
      pts = pts.value_or(PointSet{});
    }
    out.points.push_back(std::move(*pts));
  }
  return out;
}

inline HyperspaceCondition3Report check_condition3_hyperspace(const Hyperspace<CantorCube>& space,
                                                              const FilterElement<CantorBasic>& pstar,
                                                              const CantorBasic& v) {
  return check_condition3_hyperspace(Condition3Checker<Hyperspace<CantorCube>>(space, pstar), pstar, v);
}

// ---------------------------------------------------------------------------
// Club sources
// ---------------------------------------------------------------------------

/// Constructive condition (2): every finite seed lies in some element.
template <Space S>
class ClubSource {
 public:
  virtual ~ClubSource() = default;
  virtual std::string descriptor() const = 0;
  virtual FilterElement<Region<S>> extend(const S& space, const std::vector<Region<S>>& seed) = 0;
};

template <Space S>
void add_seed(const S& space, FilterElement<Region<S>>& p, const std::vector<Region<S>>& seed) {
  RegionSet<S> members(space);
  for (const auto& r : p.sets) members.insert(r);
  for (const auto& r : seed) members.insert(r);
  p.sets = members.sorted();
}

/// seed ↦ C_J(min(maxDom, |J|)) ∪ seed with J = J_0 ∪ supports of the seed.
class CjSource : public ClubSource<CantorCube> {
 public:
  CjSource(CoordSet j0, std::size_t max_dom, Limits limits = {}) : j0_(std::move(j0)), max_dom_(max_dom), limits_(limits) {}

  std::string descriptor() const override {
    std::string s;
    for (Coord c : j0_) s += (s.empty() ? "" : ",") + std::to_string(c);
    return "cj:" + s + ":" + std::to_string(max_dom_);
  }

  FilterElement<ClopenSet> extend(const CantorCube& space, const std::vector<ClopenSet>& seed) override {
    CoordSet j = j0_;
    for (const auto& r : seed) add_support(j, r);
    for (Coord c : j) space.validate(ClopenSet::of(Cylinder::single(c, 0)));
    auto p = canonical_cj(j, std::min(max_dom_, j.size()), limits_);
    add_seed(space, p, seed);
    return p;
  }

 private:
  CoordSet j0_;
  std::size_t max_dom_;
  Limits limits_;
};

/// seed ↦ aaa_closure(seed, σ, …).
class AaaSource : public ClubSource<CantorCube> {
 public:
  AaaSource(std::unique_ptr<Strategy<CantorCube>> sigma, int depth, int arity, int seqlen, Limits limits = {})
      : sigma_(std::move(sigma)), depth_(depth), arity_(arity), seqlen_(seqlen), limits_(limits) {}

  std::string descriptor() const override {
    return "aaa:" + sigma_->name() + ":" + std::to_string(depth_) + ":" + std::to_string(arity_) + ":" +
           std::to_string(seqlen_);
  }

  FilterElement<ClopenSet> extend(const CantorCube& space, const std::vector<ClopenSet>& seed) override {
    return aaa_closure(space, seed, *sigma_, depth_, arity_, seqlen_, limits_);
  }

 private:
  std::unique_ptr<Strategy<CantorCube>> sigma_;
  int depth_, arity_, seqlen_;
  Limits limits_;
};

/// Per-factor sources on a product cube; the seed is projected to each factor.
class ProductSource : public ClubSource<CantorCube> {
 public:
  ProductSource(std::vector<std::unique_ptr<ClubSource<CantorCube>>> factors, Limits limits = {})
      : factors_(std::move(factors)), limits_(limits) {}

  std::string descriptor() const override {
    std::string s = "prod(";
    for (std::size_t i = 0; i < factors_.size(); ++i) s += (i ? "," : "") + factors_[i]->descriptor();
    return s + ")";
  }

  FilterElement<ClopenSet> extend(const CantorCube& space, const std::vector<ClopenSet>& seed) override {
    if (!space.is_product() || space.factors() != factors_.size())
      throw ConfigError("filter " + descriptor() + " needs a product of " + std::to_string(factors_.size()) +
                        " Cantor cubes, got " + space.descriptor());
    std::vector<FilterElement<ClopenSet>> elems;
    std::set<std::size_t> index;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      std::vector<ClopenSet> local;
      for (const auto& r : seed) {
        auto pr = space.project_region(i, r);
        if (!pr.is_whole_cylinder()) local.push_back(std::move(pr));
      }
      elems.push_back(factors_[i]->extend(CantorCube(), local));
      index.insert(i);
    }
    auto p = product_filter_element(space, elems, index, limits_);
    add_seed(space, p, seed);
    return p;
  }

 private:
  std::vector<std::unique_ptr<ClubSource<CantorCube>>> factors_;
  Limits limits_;
};

/// exp(X): extend the parts with the inner source, close under intersection
/// and lift.
class HyperspaceSource : public ClubSource<Hyperspace<CantorCube>> {
 public:
  HyperspaceSource(std::unique_ptr<ClubSource<CantorCube>> inner, std::size_t max_arity, Limits limits = {})
      : inner_(std::move(inner)), max_arity_(max_arity), limits_(limits) {}

  std::string descriptor() const override { return "exp(" + inner_->descriptor() + "):" + std::to_string(max_arity_); }

  FilterElement<CantorBasic> extend(const Hyperspace<CantorCube>& space, const std::vector<CantorBasic>& seed) override {
    std::vector<ClopenSet> parts;
    for (const auto& b : seed) parts.insert(parts.end(), b.parts.begin(), b.parts.end());
    const auto inner = intersection_closure(space.inner(), inner_->extend(space.inner(), parts), limits_);
    auto p = hyperspace_filter_element(space, inner, max_arity_, limits_);
    add_seed(space, p, seed);
    return p;
  }

 private:
  std::unique_ptr<ClubSource<CantorCube>> inner_;
  std::size_t max_arity_;
  Limits limits_;
};

// ---------------------------------------------------------------------------
// Filter descriptors
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t parse_count(const std::string& s, const std::string& whole) {
  if (s.empty() || s.size() > 6 || s.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("bad number '" + s + "' in filter descriptor " + whole);
  return std::stoul(s);
}

inline CoordSet parse_coord_list(const std::string& s, const std::string& whole) {
  CoordSet out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.insert(static_cast<Coord>(parse_count(s.substr(pos, comma - pos), whole)));
    pos = comma + 1;
  }
  return out;
}

/// Splits on commas that are not nested inside parentheses.
inline std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Factor descriptors of prod(...). Commas inside a cj coordinate list do
/// not start a new factor: a piece that is not itself a source descriptor is
/// glued back onto the previous one.
inline std::vector<std::string> split_factors(const std::string& s) {
  auto starts_source = [](const std::string& p) {
    for (const char* pre : {"cj:", "aaa:", "prod(", "exp("})
      if (p.rfind(pre, 0) == 0) return true;
    return false;
  };
  std::vector<std::string> out;
  for (auto& piece : split_top_level(s)) {
    if (!out.empty() && !starts_source(piece))
      out.back() += "," + piece;
    else
      out.push_back(std::move(piece));
  }
  return out;
}

}  // namespace detail

/// Player I strategies usable as σ inside `aaa:` descriptors.
inline std::unique_ptr<Strategy<CantorCube>> make_sigma(const std::string& name, const Limits& limits = {}) {
  if (name == "cantor-p1") return std::make_unique<CantorPlayerOne>(limits);
  if (name.rfind("cantor-p1:", 0) == 0)
    return std::make_unique<CantorPlayerOne>(limits, detail::parse_count(name.substr(10), name));
  throw ConfigError("aaa: unsupported strategy " + name + " (expected cantor-p1 or cantor-p1:<k>)");
}

inline std::unique_ptr<ClubSource<CantorCube>> make_cantor_source(const std::string& d, const Limits& limits = {}) {
  if (d.rfind("cj:", 0) == 0) {
    const auto rest = d.substr(3);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw ConfigError("expected cj:<J>:<maxDom>, got " + d);
    return std::make_unique<CjSource>(detail::parse_coord_list(rest.substr(0, colon), d),
                                      detail::parse_count(rest.substr(colon + 1), d), limits);
  }
  if (d.rfind("aaa:", 0) == 0) {
    std::string rest = d.substr(4);
    std::array<int, 3> nums{};
    for (int i = 2; i >= 0; --i) {
      const auto colon = rest.rfind(':');
      if (colon == std::string::npos) throw ConfigError("expected aaa:<strategy>:<depth>:<arity>:<seqlen>, got " + d);
      nums[static_cast<std::size_t>(i)] = static_cast<int>(detail::parse_count(rest.substr(colon + 1), d));
      rest = rest.substr(0, colon);
    }
    return std::make_unique<AaaSource>(make_sigma(rest, limits), nums[0], nums[1], nums[2], limits);
  }
  if (d.rfind("prod(", 0) == 0 && d.back() == ')') {
    std::vector<std::unique_ptr<ClubSource<CantorCube>>> factors;
    for (const auto& f : detail::split_factors(d.substr(5, d.size() - 6))) factors.push_back(make_cantor_source(f, limits));
    return std::make_unique<ProductSource>(std::move(factors), limits);
  }
  throw ConfigError("unknown filter descriptor for a Cantor cube: " + d);
}

inline std::unique_ptr<ClubSource<Hyperspace<CantorCube>>> make_hyperspace_source(const std::string& d,
                                                                                  const Limits& limits = {}) {
  if (d.rfind("exp(", 0) != 0) throw ConfigError("expected exp(<inner>):<maxArity>, got " + d);
  const auto close = d.rfind("):");
  if (close == std::string::npos) throw ConfigError("expected exp(<inner>):<maxArity>, got " + d);
  return std::make_unique<HyperspaceSource>(make_cantor_source(d.substr(4, close - 4), limits),
                                            detail::parse_count(d.substr(close + 2), d), limits);
}

// ---------------------------------------------------------------------------
// Club filter ⇒ Player I strategy
// ---------------------------------------------------------------------------

/// A_0 = {X}; after B_n, P_n = extend(B_n ∪ P_{n-1}) = {V_0^n, V_1^n, …} in
/// canonical order and A_{n+1} = {V_j^i : i, j ≤ n}.
template <Space S>
class BbbStrategy : public Strategy<S> {
 public:
  explicit BbbStrategy(std::unique_ptr<ClubSource<S>> source, Limits limits = {})
      : source_(std::move(source)), limits_(limits) {}

  std::string name() const override { return "club-p1:" + source_->descriptor(); }

  /// P_0, …, P_{n-1} for the B's of `history`, reusing earlier work.
  const std::vector<FilterElement<Region<S>>>& elements(const S& space, const Transcript<S>& history) {
    const std::size_t n = history.completed_rounds();
    std::size_t keep = 0;
    while (keep < keys_.size() && keep < n && keys_[keep] == history.b(keep).sets) ++keep;
    keys_.resize(keep);
    elements_.resize(keep);
    for (std::size_t i = keep; i < n; ++i) {
      std::vector<Region<S>> seed = history.b(i).sets;
      if (i > 0) seed.insert(seed.end(), elements_.back().sets.begin(), elements_.back().sets.end());
      auto p = source_->extend(space, seed);
      if (p.sets.empty()) throw ContractViolation("club source returned an empty element");
      keys_.push_back(history.b(i).sets);
      elements_.push_back(std::move(p));
    }
    return elements_;
  }

  MoveFamily<Region<S>> next_move(const S& space, const Transcript<S>& history, Rng&) override {
    const std::size_t n = history.current_round();
    if (n == 0) return {Player::one, {space.whole()}};
    const auto& ps = elements(space, history);
    if (n * n > limits_.family_cap) throw CapExceeded("club strategy family of " + std::to_string(n * n) + " sets");
    std::vector<Region<S>> out;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n && j < ps[i].sets.size(); ++j) out.push_back(ps[i].sets[j]);
    return make_family(Player::one, std::move(out));
  }

 private:
  std::unique_ptr<ClubSource<S>> source_;
  Limits limits_;
  std::vector<std::vector<Region<S>>> keys_;
  std::vector<FilterElement<Region<S>>> elements_;
};

}  // namespace oog
