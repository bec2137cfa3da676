#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "oog/error.hpp"

namespace oog {

using Coord = std::uint32_t;
using CoordSet = std::set<Coord>;

struct Literal {
  Coord coord = 0;
  std::uint8_t bit = 0;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Basic clopen set W_f of the Cantor cube: every point extending the finite
/// partial assignment f. Literals are kept sorted by coordinate, so two
/// cylinders are equal iff their assignments are. The empty assignment is the
/// whole space.
///
/// The derived ordering (lexicographic on the sorted literal list) is the
/// canonical order used for every tie-break in the library.
class Cylinder {
 public:
  Cylinder() = default;

  /// Throws ConfigError on a repeated coordinate or a bit outside {0,1}.
  static Cylinder from(std::vector<Literal> lits) {
    std::sort(lits.begin(), lits.end());
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (lits[i].bit > 1) throw ConfigError("cylinder bit must be 0 or 1");
      if (i > 0 && lits[i].coord == lits[i - 1].coord)
        throw ConfigError("cylinder assigns coordinate " + std::to_string(lits[i].coord) + " twice");
    }
    Cylinder c;
    c.lits_ = std::move(lits);
    return c;
  }

  static Cylinder single(Coord coord, std::uint8_t bit) { return from({{coord, bit}}); }

  std::span<const Literal> literals() const { return lits_; }
  std::size_t size() const { return lits_.size(); }
  bool is_whole() const { return lits_.empty(); }

  std::optional<std::uint8_t> get(Coord coord) const {
    auto it = find(coord);
    if (it == lits_.end()) return std::nullopt;
    return it->bit;
  }

  bool fixes(Coord coord) const { return find(coord) != lits_.end(); }

  CoordSet domain() const {
    CoordSet out;
    for (const auto& l : lits_) out.insert(l.coord);
    return out;
  }

  /// Adds one assignment. Adding an existing assignment is a no-op; a
  /// contradictory one throws.
  Cylinder with(Coord coord, std::uint8_t bit) const {
    auto it = find(coord);
    if (it != lits_.end()) {
      if (it->bit != bit) throw ContractViolation("contradictory assignment on coordinate " + std::to_string(coord));
      return *this;
    }
    Cylinder out = *this;
    auto pos = std::lower_bound(out.lits_.begin(), out.lits_.end(), Literal{coord, 0},
                                [](const Literal& a, const Literal& b) { return a.coord < b.coord; });
    out.lits_.insert(pos, Literal{coord, bit});
    return out;
  }

  /// W_f ∩ W_g is nonempty iff f and g agree on dom(f) ∩ dom(g).
  bool compatible(const Cylinder& other) const {
    auto a = lits_.begin();
    auto b = other.lits_.begin();
    while (a != lits_.end() && b != other.lits_.end()) {
      if (a->coord < b->coord) {
        ++a;
      } else if (b->coord < a->coord) {
        ++b;
      } else {
        if (a->bit != b->bit) return false;
        ++a;
        ++b;
      }
    }
    return true;
  }

  std::optional<Cylinder> meet(const Cylinder& other) const {
    if (!compatible(other)) return std::nullopt;
    Cylinder out;
    out.lits_.reserve(lits_.size() + other.lits_.size());
    std::set_union(lits_.begin(), lits_.end(), other.lits_.begin(), other.lits_.end(),
                   std::back_inserter(out.lits_),
                   [](const Literal& x, const Literal& y) { return x.coord < y.coord; });
    return out;
  }

  /// W_this ⊆ W_other, i.e. other's assignment is contained in this one.
  bool within(const Cylinder& other) const {
    if (other.lits_.size() > lits_.size()) return false;
    return std::includes(lits_.begin(), lits_.end(), other.lits_.begin(), other.lits_.end());
  }

  /// Relabels coordinates through `map` (coordinates absent from the map are
  /// kept). The map must be injective on this cylinder's domain.
  template <class Map>
  Cylinder relabel(const Map& map) const {
    std::vector<Literal> out;
    out.reserve(lits_.size());
    for (const auto& l : lits_) {
      auto it = map.find(l.coord);
      out.push_back({it == map.end() ? l.coord : it->second, l.bit});
    }
    return from(std::move(out));
  }

  std::string str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < lits_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(lits_[i].coord) + "->" + std::to_string(lits_[i].bit);
    }
    return s + "}";
  }

  friend auto operator<=>(const Cylinder&, const Cylinder&) = default;
  friend bool operator==(const Cylinder&, const Cylinder&) = default;

 private:
  std::vector<Literal>::const_iterator find(Coord coord) const {
    auto it = std::lower_bound(lits_.begin(), lits_.end(), Literal{coord, 0},
                               [](const Literal& a, const Literal& b) { return a.coord < b.coord; });
    if (it != lits_.end() && it->coord == coord) return it;
    return lits_.end();
  }

  std::vector<Literal> lits_;
};

/// Every cylinder with domain inside `coords` and at most `max_dom`
/// assignments, in canonical order. Includes the whole space.
inline std::vector<Cylinder> cylinders_over(const CoordSet& coords, std::size_t max_dom) {
  std::vector<Coord> cs(coords.begin(), coords.end());
  std::vector<Cylinder> out;
  std::vector<Literal> cur;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    out.push_back(Cylinder::from(cur));
    if (cur.size() == max_dom) return;
    for (std::size_t i = from; i < cs.size(); ++i) {
      for (std::uint8_t b = 0; b < 2; ++b) {
        cur.push_back({cs[i], b});
        self(self, i + 1);
        cur.pop_back();
      }
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

/// All 2^|coords| total assignments over `coords`, in canonical order.
inline std::vector<Cylinder> full_assignments(const CoordSet& coords, std::size_t cap) {
  if (coords.size() > cap)
    throw CapExceeded("enumeration over " + std::to_string(coords.size()) + " coordinates (cap " +
                      std::to_string(cap) + ")");
  std::vector<Coord> cs(coords.begin(), coords.end());
  const std::size_t n = cs.size();
  std::vector<Cylinder> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<Literal> lits(n);
    for (std::size_t i = 0; i < n; ++i)
      lits[i] = {cs[i], static_cast<std::uint8_t>((mask >> (n - 1 - i)) & 1u)};
    out.push_back(Cylinder::from(std::move(lits)));
  }
  return out;
}

}  // namespace oog
