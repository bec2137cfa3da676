#pragma once

#include <json.hpp>

#include <algorithm>
#include <concepts>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "oog/clopen.hpp"
#include "oog/error.hpp"

namespace oog {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Cantor cube (and finite products of Cantor cubes)
// ---------------------------------------------------------------------------

inline json encode_cylinder(const Cylinder& c) {
  json arr = json::array();
  for (const auto& l : c.literals()) arr.push_back(json::array({l.coord, l.bit}));
  return arr;
}

inline Cylinder decode_cylinder(const json& j) {
  if (!j.is_array()) throw ConfigError("cylinder must be an array of [coordinate, bit] pairs");
  std::vector<Literal> lits;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() || !p[1].is_number_unsigned())
      throw ConfigError("malformed [coordinate, bit] pair: " + p.dump());
    const auto bit = p[1].get<std::uint64_t>();
    if (bit > 1) throw ConfigError("cylinder bit must be 0 or 1: " + p.dump());
    const auto coord = p[0].get<std::uint64_t>();
    if (coord > 0xffffffffu) throw ConfigError("coordinate out of range: " + p.dump());
    lits.push_back({static_cast<Coord>(coord), static_cast<std::uint8_t>(bit)});
  }
  return Cylinder::from(std::move(lits));
}

inline json encode_clopen(const ClopenSet& s) {
  json arr = json::array();
  for (const auto& c : s.cylinders()) arr.push_back(encode_cylinder(c));
  return arr;
}

inline ClopenSet decode_clopen(const json& j) {
  if (!j.is_array()) throw ConfigError("clopen set must be an array of cylinders");
  std::vector<Cylinder> cs;
  for (const auto& c : j) cs.push_back(decode_cylinder(c));
  return ClopenSet::normalize(std::move(cs));
}

/// D^λ with coordinates indexed by non-negative integers. A product of k
/// Cantor cubes is the same cube with interleaved coordinates: coordinate c
/// of factor i is global coordinate c·k + i. Each factor may carry a bound
/// (only coordinates below it are used) to model a finite λ.
class CantorCube {
 public:
  using region_type = ClopenSet;

  CantorCube() = default;
  explicit CantorCube(std::optional<Coord> bound) : bounds_{bound} {}

  static CantorCube product(std::vector<std::optional<Coord>> factor_bounds) {
    if (factor_bounds.empty()) throw ConfigError("product needs at least one factor");
    CantorCube c;
    c.bounds_ = std::move(factor_bounds);
    c.is_product_ = true;
    return c;
  }

  std::size_t factors() const { return bounds_.size(); }
  bool is_product() const { return is_product_; }

  std::string descriptor() const {
    auto one = [](const std::optional<Coord>& b) {
      return b ? "cantor:" + std::to_string(*b) : std::string("cantor");
    };
    if (!is_product_) return one(bounds_.front());
    std::string s = "product(";
    for (std::size_t i = 0; i < bounds_.size(); ++i) s += (i ? "," : "") + one(bounds_[i]);
    return s + ")";
  }

  Coord embed(std::size_t factor, Coord local) const {
    return static_cast<Coord>(local * bounds_.size() + factor);
  }
  std::pair<std::size_t, Coord> locate(Coord global) const {
    return {global % bounds_.size(), static_cast<Coord>(global / bounds_.size())};
  }

  bool allows(Coord c) const {
    auto [f, local] = locate(c);
    return !bounds_[f] || local < *bounds_[f];
  }

  Coord fresh(const CoordSet& used) const {
    std::optional<Coord> limit;
    if (std::all_of(bounds_.begin(), bounds_.end(), [](const auto& b) { return b.has_value(); })) {
      Coord m = 0;
      for (const auto& b : bounds_) m = std::max(m, *b);
      limit = static_cast<Coord>(m * bounds_.size());
    }
    return smallest_fresh(used, [this](Coord c) { return allows(c); }, limit);
  }

  /// Embeds a region of factor `i` (local coordinates) into the product.
  ClopenSet embed_region(std::size_t i, const ClopenSet& local) const {
    std::vector<Cylinder> out;
    for (const auto& c : local.cylinders()) {
      std::vector<Literal> lits;
      for (const auto& l : c.literals()) lits.push_back({embed(i, l.coord), l.bit});
      out.push_back(Cylinder::from(std::move(lits)));
    }
    return ClopenSet::normalize(std::move(out));
  }

  /// Erases every coordinate outside factor `i` and returns local coordinates.
  ClopenSet project_region(std::size_t i, const ClopenSet& global) const {
    std::vector<Cylinder> out;
    for (const auto& c : global.cylinders()) {
      std::vector<Literal> lits;
      for (const auto& l : c.literals()) {
        auto [f, local] = locate(l.coord);
        if (f == i) lits.push_back({local, l.bit});
      }
      out.push_back(Cylinder::from(std::move(lits)));
    }
    return ClopenSet::normalize(std::move(out));
  }

  ClopenSet whole() const { return ClopenSet::whole(); }
  bool is_nonempty(const ClopenSet& s) const { return oog::is_nonempty(s); }
  bool subset(const ClopenSet& a, const ClopenSet& b) const { return oog::subset(a, b); }
  bool meets(const ClopenSet& a, const ClopenSet& b) const { return oog::is_nonempty(oog::intersect(a, b)); }
  ClopenSet intersect(const ClopenSet& a, const ClopenSet& b) const { return oog::intersect(a, b); }

  void validate(const ClopenSet& s) const {
    for (Coord c : s.support())
      if (!allows(c))
        throw ContractViolation("coordinate " + std::to_string(c) + " is outside " + descriptor());
  }

  /// First cylinder of the normal form: the canonical base set inside s.
  ClopenSet canonical_refinement(const ClopenSet& s) const {
    if (s.empty()) throw ContractViolation("cannot refine the empty set");
    return ClopenSet::of(s.cylinders().front());
  }

  json encode(const ClopenSet& s) const { return encode_clopen(s); }
  ClopenSet decode(const json& j) const {
    auto s = decode_clopen(j);
    validate(s);
    return s;
  }
  std::string str(const ClopenSet& s) const { return s.str(); }

 private:
  std::vector<std::optional<Coord>> bounds_{std::nullopt};
  bool is_product_ = false;
};

// ---------------------------------------------------------------------------
// Finite spaces
// ---------------------------------------------------------------------------

struct FiniteOpen {
  std::vector<std::uint32_t> points;  // sorted, unique

  friend auto operator<=>(const FiniteOpen&, const FiniteOpen&) = default;
  friend bool operator==(const FiniteOpen&, const FiniteOpen&) = default;
};

/// A finite topological space given by its full open-set lattice.
class FiniteSpace {
 public:
  using region_type = FiniteOpen;

  static FiniteSpace from_json(const json& j, std::string source = "<inline>") {
    if (!j.is_object() || !j.contains("points") || !j.contains("opens"))
      throw ConfigError("lattice file needs \"points\" and \"opens\"");
    for (const auto& [key, _] : j.items())
      if (key != "points" && key != "opens") throw ConfigError("unknown lattice field: " + key);
    if (!j["points"].is_array() || !j["opens"].is_array()) throw ConfigError("points/opens must be arrays");
    FiniteSpace s;
    s.source_ = std::move(source);
    s.n_ = j["points"].size();
    if (s.n_ == 0) throw ConfigError("finite space needs at least one point");
    std::set<FiniteOpen> opens;
    for (const auto& o : j["opens"]) opens.insert(s.parse_points(o));
    s.opens_.assign(opens.begin(), opens.end());
    s.check_lattice();
    for (const auto& o : s.opens_) {
      FiniteOpen closed;
      for (std::uint32_t p = 0; p < s.n_; ++p)
        if (!std::binary_search(o.points.begin(), o.points.end(), p)) closed.points.push_back(p);
      if (!closed.points.empty()) s.closed_.push_back(std::move(closed));
    }
    std::sort(s.closed_.begin(), s.closed_.end());
    return s;
  }

  static FiniteSpace load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lattice file: " + path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("lattice file " + path + ": " + e.what());
    }
    return from_json(j, path);
  }

  std::string descriptor() const { return "finite:" + source_; }
  std::size_t point_count() const { return n_; }
  const std::vector<FiniteOpen>& opens() const { return opens_; }
  /// Nonempty closed sets.
  const std::vector<FiniteOpen>& closed_sets() const { return closed_; }

  FiniteOpen whole() const {
    FiniteOpen w;
    for (std::uint32_t p = 0; p < n_; ++p) w.points.push_back(p);
    return w;
  }
  bool is_nonempty(const FiniteOpen& u) const { return !u.points.empty(); }
  bool subset(const FiniteOpen& a, const FiniteOpen& b) const {
    return std::includes(b.points.begin(), b.points.end(), a.points.begin(), a.points.end());
  }
  FiniteOpen intersect(const FiniteOpen& a, const FiniteOpen& b) const {
    FiniteOpen out;
    std::set_intersection(a.points.begin(), a.points.end(), b.points.begin(), b.points.end(),
                          std::back_inserter(out.points));
    return out;
  }
  bool meets(const FiniteOpen& a, const FiniteOpen& b) const { return is_nonempty(intersect(a, b)); }

  void validate(const FiniteOpen& u) const {
    if (!std::binary_search(opens_.begin(), opens_.end(), u))
      throw ContractViolation("point set " + str(u) + " is not open in " + descriptor());
  }

  /// Smallest (then lexicographically first) nonempty open subset of u.
  FiniteOpen canonical_refinement(const FiniteOpen& u) const {
    const FiniteOpen* best = nullptr;
    for (const auto& o : opens_) {
      if (o.points.empty() || !subset(o, u)) continue;
      if (!best || o.points.size() < best->points.size()) best = &o;
    }
    if (!best) throw ContractViolation("cannot refine the empty set");
    return *best;
  }

  json encode(const FiniteOpen& u) const { return json(u.points); }
  FiniteOpen decode(const json& j) const {
    auto u = parse_points(j);
    validate(u);
    return u;
  }
  std::string str(const FiniteOpen& u) const {
    std::string s = "{";
    for (std::size_t i = 0; i < u.points.size(); ++i) s += (i ? "," : "") + std::to_string(u.points[i]);
    return s + "}";
  }

 private:
  FiniteOpen parse_points(const json& j) const {
    if (!j.is_array()) throw ConfigError("open set must be an array of point indices");
    FiniteOpen o;
    for (const auto& p : j) {
      if (!p.is_number_unsigned() || p.get<std::uint64_t>() >= n_)
        throw ConfigError("point index out of range: " + p.dump());
      o.points.push_back(p.get<std::uint32_t>());
    }
    std::sort(o.points.begin(), o.points.end());
    o.points.erase(std::unique(o.points.begin(), o.points.end()), o.points.end());
    return o;
  }

  void check_lattice() const {
    auto has = [&](const FiniteOpen& o) { return std::binary_search(opens_.begin(), opens_.end(), o); };
    if (!has(FiniteOpen{})) throw ConfigError("lattice must contain the empty set");
    if (!has(whole())) throw ConfigError("lattice must contain the full point set");
    for (const auto& a : opens_) {
      for (const auto& b : opens_) {
        FiniteOpen u;
        std::set_union(a.points.begin(), a.points.end(), b.points.begin(), b.points.end(),
                       std::back_inserter(u.points));
        if (!has(u)) throw ConfigError("lattice not closed under union: " + str(a) + " u " + str(b));
        if (!has(intersect(a, b)))
          throw ConfigError("lattice not closed under intersection: " + str(a) + " n " + str(b));
      }
    }
  }

  std::string source_;
  std::size_t n_ = 0;
  std::vector<FiniteOpen> opens_;
  std::vector<FiniteOpen> closed_;
};

// ---------------------------------------------------------------------------
// Vietoris hyperspace
// ---------------------------------------------------------------------------

/// ⟨V_1,…,V_n⟩: closed sets inside V_1 ∪ … ∪ V_n meeting every V_i. Parts are
/// deduplicated and sorted; both are sound since membership ignores order
/// and multiplicity.
template <class Part>
struct VietorisBasic {
  std::vector<Part> parts;

  static VietorisBasic make(std::vector<Part> ps) {
    if (ps.empty()) throw ConfigError("a Vietoris basic set needs at least one part");
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return VietorisBasic{std::move(ps)};
  }

  friend auto operator<=>(const VietorisBasic&, const VietorisBasic&) = default;
  friend bool operator==(const VietorisBasic&, const VietorisBasic&) = default;
};

using CantorBasic = VietorisBasic<ClopenSet>;
using FiniteBasic = VietorisBasic<FiniteOpen>;

/// A finite point set; each point is approximated by a total assignment over
/// the combined support of the sets it is tested against.
using PointSet = std::vector<Cylinder>;

inline ClopenSet union_of_parts(const CantorBasic& v) { return unite(std::span<const ClopenSet>(v.parts)); }

inline bool vietoris_nonempty(const CantorBasic& v) {
  return !v.parts.empty() && std::all_of(v.parts.begin(), v.parts.end(), [](const auto& p) { return is_nonempty(p); });
}

inline bool vietoris_subset(const CantorBasic& u, const CantorBasic& v) {
  if (!subset(union_of_parts(u), union_of_parts(v))) return false;
  for (const auto& vi : v.parts) {
    bool found = false;
    for (const auto& uj : u.parts)
      if (subset(uj, vi)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

inline Cylinder complete_point(const Cylinder& c, const CoordSet& support) {
  Cylinder p = c;
  for (Coord x : support)
    if (!p.fixes(x)) p = p.with(x, 0);
  return p;
}

inline CoordSet combined_support(const CantorBasic& u, const CantorBasic& v) {
  CoordSet s;
  for (const auto* b : {&u, &v})
    for (const auto& p : b->parts) s.insert(p.support().begin(), p.support().end());
  return s;
}

/// ⟨u⟩ ∩ ⟨v⟩ ≠ ∅ iff every part of either meets the union of the other's
/// parts. On success returns a finite member of both: one point in each
/// nonempty pairwise part intersection.
inline std::optional<PointSet> vietoris_meets(const CantorBasic& u, const CantorBasic& v) {
  const ClopenSet uu = union_of_parts(u);
  const ClopenSet vv = union_of_parts(v);
  for (const auto& p : u.parts)
    if (!meets(p, vv)) return std::nullopt;
  for (const auto& p : v.parts)
    if (!meets(p, uu)) return std::nullopt;
  const CoordSet support = combined_support(u, v);
  PointSet points;
  for (const auto& a : u.parts)
    for (const auto& b : v.parts) {
      const ClopenSet ab = intersect(a, b);
      if (ab.empty()) continue;
      points.push_back(complete_point(ab.cylinders().front(), support));
    }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

/// Direct membership of a finite set in ⟨v⟩.
inline bool vietoris_contains(const CantorBasic& v, const PointSet& points) {
  if (points.empty()) return false;
  const ClopenSet vv = union_of_parts(v);
  for (const auto& p : points)
    if (!contains_point(vv, p)) return false;
  for (const auto& part : v.parts)
    if (std::none_of(points.begin(), points.end(), [&](const Cylinder& p) { return contains_point(part, p); }))
      return false;
  return true;
}

/// exp(X) over a Cantor cube or a finite space.
template <class Inner>
class Hyperspace {
 public:
  using part_type = typename Inner::region_type;
  using region_type = VietorisBasic<part_type>;

  explicit Hyperspace(Inner inner) : inner_(std::move(inner)) {}

  const Inner& inner() const { return inner_; }
  std::string descriptor() const { return "exp(" + inner_.descriptor() + ")"; }

  region_type whole() const { return region_type::make({inner_.whole()}); }

  bool is_nonempty(const region_type& v) const {
    if constexpr (std::is_same_v<Inner, FiniteSpace>) {
      return std::any_of(inner_.closed_sets().begin(), inner_.closed_sets().end(),
                         [&](const FiniteOpen& c) { return member(c, v); });
    } else {
      return vietoris_nonempty(v);
    }
  }

  bool subset(const region_type& a, const region_type& b) const {
    if constexpr (std::is_same_v<Inner, FiniteSpace>) {
      for (const auto& c : inner_.closed_sets())
        if (member(c, a) && !member(c, b)) return false;
      return true;
    } else {
      return vietoris_subset(a, b);
    }
  }

  bool meets(const region_type& a, const region_type& b) const {
    if constexpr (std::is_same_v<Inner, FiniteSpace>) {
      return common_member(a, b).has_value();
    } else {
      return vietoris_meets(a, b).has_value();
    }
  }

  /// Finite spaces: a closed set lying in both basics.
  std::optional<FiniteOpen> common_member(const FiniteBasic& a, const FiniteBasic& b) const
    requires std::is_same_v<Inner, FiniteSpace>
  {
    for (const auto& c : inner_.closed_sets())
      if (member(c, a) && member(c, b)) return c;
    return std::nullopt;
  }

  /// Finite spaces: closed set c lies in ⟨v⟩.
  bool member(const FiniteOpen& c, const FiniteBasic& v) const
    requires std::is_same_v<Inner, FiniteSpace>
  {
    FiniteOpen uni;
    for (const auto& p : v.parts) {
      FiniteOpen t;
      std::set_union(uni.points.begin(), uni.points.end(), p.points.begin(), p.points.end(),
                     std::back_inserter(t.points));
      uni = std::move(t);
    }
    if (!inner_.subset(c, uni)) return false;
    for (const auto& p : v.parts)
      if (!inner_.meets(c, p)) return false;
    return true;
  }

  void validate(const region_type& v) const {
    if (v.parts.empty()) throw ContractViolation("Vietoris basic set without parts");
    for (const auto& p : v.parts) inner_.validate(p);
  }

  region_type canonical_refinement(const region_type& v) const {
    if (!is_nonempty(v)) throw ContractViolation("cannot refine the empty set");
    if constexpr (std::is_same_v<Inner, FiniteSpace>) {
      return v;
    } else {
      std::vector<part_type> parts;
      for (const auto& p : v.parts) parts.push_back(inner_.canonical_refinement(p));
      return region_type::make(std::move(parts));
    }
  }

  json encode(const region_type& v) const {
    json arr = json::array();
    for (const auto& p : v.parts) arr.push_back(inner_.encode(p));
    return arr;
  }
  region_type decode(const json& j) const {
    if (!j.is_array() || j.empty()) throw ConfigError("Vietoris basic set must be a nonempty array of parts");
    std::vector<part_type> parts;
    for (const auto& p : j) parts.push_back(inner_.decode(p));
    return region_type::make(std::move(parts));
  }
  std::string str(const region_type& v) const {
    std::string s = "<";
    for (std::size_t i = 0; i < v.parts.size(); ++i) s += (i ? ", " : "") + inner_.str(v.parts[i]);
    return s + ">";
  }

 private:
  Inner inner_;
};

// ---------------------------------------------------------------------------
// Disjoint sums
// ---------------------------------------------------------------------------

/// Open set of a disjoint sum: one nonempty inner region per touched summand.
template <class R>
struct SumRegion {
  std::vector<std::pair<std::uint32_t, R>> parts;  // sorted by summand

  friend auto operator<=>(const SumRegion&, const SumRegion&) = default;
  friend bool operator==(const SumRegion&, const SumRegion&) = default;
};

template <class Inner>
class SumSpace {
 public:
  using inner_region = typename Inner::region_type;
  using region_type = SumRegion<inner_region>;

  SumSpace(std::uint32_t count, Inner inner) : count_(count), inner_(std::move(inner)) {
    if (count_ == 0) throw ConfigError("sum needs at least one summand");
  }

  std::uint32_t count() const { return count_; }
  const Inner& inner() const { return inner_; }
  std::string descriptor() const { return "sum(" + std::to_string(count_) + "," + inner_.descriptor() + ")"; }

  region_type make(std::vector<std::pair<std::uint32_t, inner_region>> parts) const {
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    region_type out;
    for (auto& [s, r] : parts) {
      if (s >= count_) throw ContractViolation("summand " + std::to_string(s) + " out of range");
      if (!out.parts.empty() && out.parts.back().first == s) throw ConfigError("summand listed twice");
      if (inner_.is_nonempty(r)) out.parts.emplace_back(s, std::move(r));
    }
    return out;
  }

  region_type summand_whole(std::uint32_t s) const { return make({{s, inner_.whole()}}); }

  region_type whole() const {
    std::vector<std::pair<std::uint32_t, inner_region>> parts;
    for (std::uint32_t s = 0; s < count_; ++s) parts.emplace_back(s, inner_.whole());
    return make(std::move(parts));
  }

  bool is_nonempty(const region_type& r) const { return !r.parts.empty(); }

  const inner_region* part(const region_type& r, std::uint32_t s) const {
    for (const auto& [k, v] : r.parts)
      if (k == s) return &v;
    return nullptr;
  }

  bool subset(const region_type& a, const region_type& b) const {
    for (const auto& [s, r] : a.parts) {
      const auto* other = part(b, s);
      if (!other || !inner_.subset(r, *other)) return false;
    }
    return true;
  }

  region_type intersect(const region_type& a, const region_type& b) const {
    std::vector<std::pair<std::uint32_t, inner_region>> parts;
    for (const auto& [s, r] : a.parts)
      if (const auto* other = part(b, s)) parts.emplace_back(s, inner_.intersect(r, *other));
    return make(std::move(parts));
  }

  bool meets(const region_type& a, const region_type& b) const {
    for (const auto& [s, r] : a.parts)
      if (const auto* other = part(b, s); other && inner_.meets(r, *other)) return true;
    return false;
  }

  void validate(const region_type& r) const {
    std::optional<std::uint32_t> prev;
    for (const auto& [s, v] : r.parts) {
      if (s >= count_) throw ContractViolation("summand " + std::to_string(s) + " out of range");
      if (prev && *prev >= s) throw ContractViolation("sum region parts must be sorted and distinct");
      if (!inner_.is_nonempty(v)) throw ContractViolation("sum region carries an empty part");
      inner_.validate(v);
      prev = s;
    }
  }

  region_type canonical_refinement(const region_type& r) const {
    if (r.parts.empty()) throw ContractViolation("cannot refine the empty set");
    return make({{r.parts.front().first, inner_.canonical_refinement(r.parts.front().second)}});
  }

  json encode(const region_type& r) const {
    json arr = json::array();
    for (const auto& [s, v] : r.parts) arr.push_back(json::array({s, inner_.encode(v)}));
    return arr;
  }
  region_type decode(const json& j) const {
    if (!j.is_array()) throw ConfigError("sum region must be an array of [summand, region] pairs");
    std::vector<std::pair<std::uint32_t, inner_region>> parts;
    for (const auto& p : j) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned())
        throw ConfigError("malformed [summand, region] pair: " + p.dump());
      const auto s = p[0].get<std::uint64_t>();
      if (s >= count_) throw ConfigError("summand index out of range: " + p.dump());
      parts.emplace_back(static_cast<std::uint32_t>(s), inner_.decode(p[1]));
    }
    auto r = make(std::move(parts));
    validate(r);
    return r;
  }
  std::string str(const region_type& r) const {
    std::string s;
    for (std::size_t i = 0; i < r.parts.size(); ++i)
      s += (i ? " + " : "") + std::to_string(r.parts[i].first) + ":" + inner_.str(r.parts[i].second);
    return s.empty() ? "{}" : s;
  }

 private:
  std::uint32_t count_;
  Inner inner_;
};

// ---------------------------------------------------------------------------
// Space concept, descriptors, runtime dispatch
// ---------------------------------------------------------------------------

template <class S>
using Region = typename S::region_type;

template <class S>
concept Space = requires(const S& s, const Region<S>& r, const json& j) {
  { s.descriptor() } -> std::convertible_to<std::string>;
  { s.whole() } -> std::same_as<Region<S>>;
  { s.is_nonempty(r) } -> std::same_as<bool>;
  { s.subset(r, r) } -> std::same_as<bool>;
  { s.meets(r, r) } -> std::same_as<bool>;
  { s.canonical_refinement(r) } -> std::same_as<Region<S>>;
  { s.encode(r) } -> std::same_as<json>;
  { s.decode(j) } -> std::same_as<Region<S>>;
  { s.str(r) } -> std::convertible_to<std::string>;
  s.validate(r);
};

/// Spaces whose regions are clopen subsets of a Cantor cube.
template <class S>
concept CylinderSpace = std::same_as<S, CantorCube>;

/// Parsed space descriptor:
///   cantor | cantor:<bound> | exp(<inner>) | product(<cantor>,…) |
///   sum(<n>,<inner>) | finite:<path>
struct SpaceHandle {
  enum class Kind { cantor, finite, hyperspace, product, sum };

  Kind kind = Kind::cantor;
  std::optional<Coord> bound;
  std::string path;
  std::uint32_t count = 0;
  std::vector<SpaceHandle> children;

  static SpaceHandle parse(std::string_view text) {
    std::size_t pos = 0;
    SpaceHandle h = parse_at(text, pos);
    if (pos != text.size()) throw ConfigError("trailing characters in space descriptor: " + std::string(text));
    return h;
  }

  std::string str() const {
    switch (kind) {
      case Kind::cantor: return bound ? "cantor:" + std::to_string(*bound) : "cantor";
      case Kind::finite: return "finite:" + path;
      case Kind::hyperspace: return "exp(" + children.front().str() + ")";
      case Kind::sum: return "sum(" + std::to_string(count) + "," + children.front().str() + ")";
      case Kind::product: {
        std::string s = "product(";
        for (std::size_t i = 0; i < children.size(); ++i) s += (i ? "," : "") + children[i].str();
        return s + ")";
      }
    }
    return {};
  }

 private:
  static bool consume(std::string_view t, std::size_t& pos, std::string_view word) {
    if (t.substr(pos, word.size()) != word) return false;
    pos += word.size();
    return true;
  }

  static std::uint64_t number(std::string_view t, std::size_t& pos) {
    const std::size_t start = pos;
    while (pos < t.size() && t[pos] >= '0' && t[pos] <= '9') ++pos;
    if (pos == start || pos - start > 9) throw ConfigError("expected a number in space descriptor: " + std::string(t));
    return std::stoull(std::string(t.substr(start, pos - start)));
  }

  static void expect(std::string_view t, std::size_t& pos, char c) {
    if (pos >= t.size() || t[pos] != c)
      throw ConfigError(std::string("expected '") + c + "' in space descriptor: " + std::string(t));
    ++pos;
  }

  static SpaceHandle parse_at(std::string_view t, std::size_t& pos) {
    SpaceHandle h;
    if (consume(t, pos, "cantor")) {
      h.kind = Kind::cantor;
      if (pos < t.size() && t[pos] == ':') {
        ++pos;
        h.bound = static_cast<Coord>(number(t, pos));
        if (*h.bound == 0) throw ConfigError("cantor bound must be positive");
      }
    } else if (consume(t, pos, "finite:")) {
      h.kind = Kind::finite;
      const std::size_t start = pos;
      while (pos < t.size() && t[pos] != ')' && t[pos] != ',') ++pos;
      h.path = std::string(t.substr(start, pos - start));
      if (h.path.empty()) throw ConfigError("finite: needs a lattice file path");
    } else if (consume(t, pos, "exp(")) {
      h.kind = Kind::hyperspace;
      h.children.push_back(parse_at(t, pos));
      expect(t, pos, ')');
      const auto k = h.children.front().kind;
      if (k != Kind::cantor && k != Kind::finite)
        throw ConfigError("hyperspaces are supported over cantor and finite spaces only");
    } else if (consume(t, pos, "product(")) {
      h.kind = Kind::product;
      h.children.push_back(parse_at(t, pos));
      while (pos < t.size() && t[pos] == ',') {
        ++pos;
        h.children.push_back(parse_at(t, pos));
      }
      expect(t, pos, ')');
      for (const auto& c : h.children)
        if (c.kind != Kind::cantor) throw ConfigError("product factors must be Cantor cubes");
    } else if (consume(t, pos, "sum(")) {
      h.kind = Kind::sum;
      const auto n = number(t, pos);
      if (n == 0) throw ConfigError("sum needs at least one summand");
      h.count = static_cast<std::uint32_t>(n);
      expect(t, pos, ',');
      h.children.push_back(parse_at(t, pos));
      expect(t, pos, ')');
      const auto k = h.children.front().kind;
      if (k != Kind::cantor && k != Kind::finite)
        throw ConfigError("sums are supported over cantor and finite spaces only");
    } else {
      throw ConfigError("unknown space descriptor: " + std::string(t));
    }
    return h;
  }
};

using AnySpace = std::variant<CantorCube, FiniteSpace, Hyperspace<CantorCube>, Hyperspace<FiniteSpace>,
                              SumSpace<CantorCube>, SumSpace<FiniteSpace>>;

inline AnySpace make_space(const SpaceHandle& h) {
  using K = SpaceHandle::Kind;
  switch (h.kind) {
    case K::cantor: return CantorCube(h.bound);
    case K::finite: return FiniteSpace::load(h.path);
    case K::product: {
      std::vector<std::optional<Coord>> bounds;
      for (const auto& c : h.children) bounds.push_back(c.bound);
      return CantorCube::product(std::move(bounds));
    }
    case K::hyperspace: {
      const auto& c = h.children.front();
      if (c.kind == K::cantor) return Hyperspace<CantorCube>(CantorCube(c.bound));
      return Hyperspace<FiniteSpace>(FiniteSpace::load(c.path));
    }
    case K::sum: {
      const auto& c = h.children.front();
      if (c.kind == K::cantor) return SumSpace<CantorCube>(h.count, CantorCube(c.bound));
      return SumSpace<FiniteSpace>(h.count, FiniteSpace::load(c.path));
    }
  }
  throw ConfigError("unsupported space");
}

inline AnySpace make_space(std::string_view descriptor) { return make_space(SpaceHandle::parse(descriptor)); }

}  // namespace oog
