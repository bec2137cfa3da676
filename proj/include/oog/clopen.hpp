#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "oog/cylinder.hpp"

namespace oog {

/// Exact rational for measure values.
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& r) { return r.str(); }

inline Rational dyadic(std::size_t exponent) {
  Rational r{1};
  return r / Rational{boost::multiprecision::cpp_int{1} << exponent};
}

/// Finite union of cylinders, kept as a sorted antichain: no member is a
/// subset of another. Complementary pairs are not merged, so two sets with the
/// same points may differ in representation; compare with `equivalent`.
class ClopenSet {
 public:
  ClopenSet() = default;

  static ClopenSet whole() { return of(Cylinder{}); }

  static ClopenSet of(Cylinder c) {
    ClopenSet s;
    s.cyls_.push_back(std::move(c));
    s.refresh_support();
    return s;
  }

  static ClopenSet normalize(std::vector<Cylinder> raw) {
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    // Shorter cylinders are larger sets; test each against the kept ones.
    std::vector<std::size_t> order(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a].size() < raw[b].size(); });
    std::vector<bool> keep(raw.size(), true);
    std::vector<std::size_t> kept;
    for (std::size_t i : order) {
      for (std::size_t k : kept) {
        if (raw[i].within(raw[k])) {
          keep[i] = false;
          break;
        }
      }
      if (keep[i]) kept.push_back(i);
    }
    ClopenSet s;
    for (std::size_t i = 0; i < raw.size(); ++i)
      if (keep[i]) s.cyls_.push_back(std::move(raw[i]));
    s.refresh_support();
    return s;
  }

  std::span<const Cylinder> cylinders() const { return cyls_; }
  const CoordSet& support() const { return support_; }
  bool empty() const { return cyls_.empty(); }
  bool is_whole_cylinder() const { return cyls_.size() == 1 && cyls_.front().is_whole(); }

  std::string str() const {
    if (cyls_.empty()) return "{}";
    std::string s;
    for (std::size_t i = 0; i < cyls_.size(); ++i) {
      if (i) s += " u ";
      s += "W" + cyls_[i].str();
    }
    return s;
  }

  friend bool operator==(const ClopenSet& a, const ClopenSet& b) { return a.cyls_ == b.cyls_; }
  friend auto operator<=>(const ClopenSet& a, const ClopenSet& b) { return a.cyls_ <=> b.cyls_; }

 private:
  void refresh_support() {
    support_.clear();
    for (const auto& c : cyls_)
      for (const auto& l : c.literals()) support_.insert(l.coord);
  }

  std::vector<Cylinder> cyls_;
  CoordSet support_;
};

namespace detail {

using CylRefs = std::vector<const Cylinder*>;

inline std::optional<Coord> split_coordinate(const Cylinder& c, const CylRefs& live) {
  for (const Cylinder* d : live)
    for (const auto& l : d->literals())
      if (!c.fixes(l.coord)) return l.coord;
  return std::nullopt;
}

/// W_c ⊆ ∪pool, by Shannon expansion on the pool's coordinates.
inline bool covered(const Cylinder& c, const CylRefs& pool) {
  CylRefs live;
  for (const Cylinder* d : pool) {
    if (!c.compatible(*d)) continue;
    if (c.within(*d)) return true;
    live.push_back(d);
  }
  if (live.empty()) return false;
  const Coord x = *split_coordinate(c, live);
  return covered(c.with(x, 0), live) && covered(c.with(x, 1), live);
}

/// Pairwise-disjoint cylinders whose union is W_c \ ∪pool.
inline void carve(const Cylinder& c, const CylRefs& pool, std::vector<Cylinder>& out) {
  CylRefs live;
  for (const Cylinder* d : pool) {
    if (!c.compatible(*d)) continue;
    if (c.within(*d)) return;
    live.push_back(d);
  }
  if (live.empty()) {
    out.push_back(c);
    return;
  }
  const Coord x = *split_coordinate(c, live);
  carve(c.with(x, 0), live, out);
  carve(c.with(x, 1), live, out);
}

inline CylRefs refs(std::span<const Cylinder> cs) {
  CylRefs r;
  r.reserve(cs.size());
  for (const auto& c : cs) r.push_back(&c);
  return r;
}

}  // namespace detail

inline bool is_nonempty(const ClopenSet& s) { return !s.empty(); }

/// Every point of a lies in b.
inline bool subset(const ClopenSet& a, const ClopenSet& b) {
  const auto pool = detail::refs(b.cylinders());
  for (const auto& c : a.cylinders())
    if (!detail::covered(c, pool)) return false;
  return true;
}

inline bool equivalent(const ClopenSet& a, const ClopenSet& b) { return subset(a, b) && subset(b, a); }

inline ClopenSet intersect(const ClopenSet& a, const ClopenSet& b) {
  std::vector<Cylinder> raw;
  for (const auto& x : a.cylinders())
    for (const auto& y : b.cylinders())
      if (auto m = x.meet(y)) raw.push_back(std::move(*m));
  return ClopenSet::normalize(std::move(raw));
}

inline bool meets(const ClopenSet& a, const ClopenSet& b) {
  for (const auto& x : a.cylinders())
    for (const auto& y : b.cylinders())
      if (x.compatible(y)) return true;
  return false;
}

inline ClopenSet unite(const ClopenSet& a, const ClopenSet& b) {
  std::vector<Cylinder> raw(a.cylinders().begin(), a.cylinders().end());
  raw.insert(raw.end(), b.cylinders().begin(), b.cylinders().end());
  return ClopenSet::normalize(std::move(raw));
}

inline ClopenSet unite(std::span<const ClopenSet> sets) {
  std::vector<Cylinder> raw;
  for (const auto& s : sets) raw.insert(raw.end(), s.cylinders().begin(), s.cylinders().end());
  return ClopenSet::normalize(std::move(raw));
}

/// Pairwise-disjoint cylinders covering exactly the points of s.
inline std::vector<Cylinder> disjoint_pieces(const ClopenSet& s) {
  std::vector<Cylinder> out;
  for (const auto& c : s.cylinders()) {
    std::vector<Cylinder> fresh;
    detail::carve(c, detail::refs(out), fresh);
    out.insert(out.end(), fresh.begin(), fresh.end());
  }
  return out;
}

/// a \ b as pairwise-disjoint cylinders, in canonical order.
inline std::vector<Cylinder> difference_pieces(const ClopenSet& a, const ClopenSet& b) {
  std::vector<Cylinder> out;
  const auto pool = detail::refs(b.cylinders());
  for (const auto& p : disjoint_pieces(a)) detail::carve(p, pool, out);
  std::sort(out.begin(), out.end());
  return out;
}

inline ClopenSet difference(const ClopenSet& a, const ClopenSet& b) {
  return ClopenSet::normalize(difference_pieces(a, b));
}

/// True iff the point approximated by `point` lies in s. The assignment must
/// fix every coordinate of support(s) that it needs; unfixed coordinates are
/// treated as not matching.
inline bool contains_point(const ClopenSet& s, const Cylinder& point) {
  for (const auto& c : s.cylinders())
    if (point.within(c)) return true;
  return false;
}

/// Full assignments over `support` lying outside s, as cylinders.
inline ClopenSet complement_within(const ClopenSet& s, const CoordSet& support, std::size_t cap = Limits{}.support_cap) {
  if (!std::includes(support.begin(), support.end(), s.support().begin(), s.support().end()))
    throw ConfigError("complement_within: support does not contain the set's support");
  std::vector<Cylinder> out;
  for (auto& p : full_assignments(support, cap))
    if (!contains_point(s, p)) out.push_back(std::move(p));
  return ClopenSet::normalize(std::move(out));
}

namespace detail {

inline Rational measure_outside(const Cylinder& c, const CylRefs& pool) {
  CylRefs live;
  for (const Cylinder* d : pool) {
    if (!c.compatible(*d)) continue;
    if (c.within(*d)) return dyadic(c.size());
    live.push_back(d);
  }
  if (live.empty()) return Rational{0};
  // Cylinders sharing no free coordinate are independent events given W_c.
  std::vector<std::size_t> parent(live.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::map<Coord, std::size_t> owner;
  for (std::size_t i = 0; i < live.size(); ++i)
    for (const auto& l : live[i]->literals()) {
      if (c.fixes(l.coord)) continue;
      auto [it, fresh] = owner.emplace(l.coord, i);
      if (!fresh) parent[root(i)] = root(it->second);
    }
  std::map<std::size_t, CylRefs> parts;
  for (std::size_t i = 0; i < live.size(); ++i) parts[root(i)].push_back(live[i]);
  if (parts.size() > 1) {
    const Rational whole = dyadic(c.size());
    Rational miss{1};
    for (const auto& [_, part] : parts) miss *= Rational{1} - measure_outside(c, part) / whole;
    return whole * (Rational{1} - miss);
  }
  const Coord x = *split_coordinate(c, live);
  return measure_outside(c.with(x, 0), live) + measure_outside(c.with(x, 1), live);
}

inline std::optional<Cylinder> first_outside(const Cylinder& c, const CylRefs& pool) {
  CylRefs live;
  for (const Cylinder* d : pool) {
    if (!c.compatible(*d)) continue;
    if (c.within(*d)) return std::nullopt;
    live.push_back(d);
  }
  if (live.empty()) return c;
  const Coord x = *split_coordinate(c, live);
  // The branch that contradicts the first live cylinder drops it.
  const std::uint8_t away = 1 - *live.front()->get(x);
  if (auto hit = first_outside(c.with(x, away), live)) return hit;
  return first_outside(c.with(x, 1 - away), live);
}

}  // namespace detail

/// Uniform product measure; μ(W_f) = 2^-|dom f|.
inline Rational measure(const ClopenSet& s) { return detail::measure_outside(Cylinder{}, detail::refs(s.cylinders())); }

/// Some cylinder disjoint from s, found by splitting on s's coordinates
/// without enumerating all assignments; nullopt iff s is the whole space.
inline std::optional<Cylinder> outside_witness(const ClopenSet& s) {
  return detail::first_outside(Cylinder{}, detail::refs(s.cylinders()));
}

/// Smallest coordinate outside `used` accepted by `allowed`, searching below
/// `limit` when one is given.
inline Coord smallest_fresh(const CoordSet& used, const std::function<bool(Coord)>& allowed = {},
                            std::optional<Coord> limit = std::nullopt) {
  for (Coord c = 0;; ++c) {
    if (limit && c >= *limit) throw CapExceeded("no fresh coordinate left in the bounded cube");
    if (allowed && !allowed(c)) continue;
    if (!used.contains(c)) return c;
  }
}

inline ClopenSet restrict_to(const ClopenSet& s, const Cylinder& c) { return intersect(s, ClopenSet::of(c)); }

}  // namespace oog
