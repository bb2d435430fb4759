#pragma once

/// Quasi-affine integer sets: finite unions of conjunctions of affine
/// inequalities `a.x + c >= 0` and residue intervals `lo <= (f.x mod s) <= hi`.
///
/// There is no canonical form. Conjuncts are kept in a light normal form
/// (sorted atoms, residue intervals on the same form merged) so that exact
/// duplicates and obvious subsumptions can be dropped. Emptiness is decided
/// by enumerating a period box or a bounded domain, see `is_empty`.

#include "mars/core_model.hpp"

#include <functional>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <variant>

namespace mars {

/// `a . x + c >= 0`.
struct AffineIneq {
  IntVec a;
  Int c = 0;

  [[nodiscard]] bool holds(std::span<const Int> x) const {
    return dot(a, x) + c >= 0;
  }
  friend auto operator<=>(const AffineIneq &, const AffineIneq &) = default;
};

/// `lo <= (f . x mod modulus) <= hi` with the residue taken in [0, modulus).
struct ResidueInterval {
  IntVec f;
  Int modulus = 1;
  Int lo = 0;
  Int hi = 0;

  /// Builds the atom from a representative range in [-modulus, 0), e.g.
  /// `-m <= f.x mod s < 0`.
  static ResidueInterval from_negative_range(IntVec f, Int modulus, Int lo,
                                             Int hi) {
    return {std::move(f), modulus, lo + modulus, hi + modulus};
  }

  [[nodiscard]] bool holds(std::span<const Int> x) const {
    const Int r = floor_mod(dot(f, x), modulus);
    return lo <= r && r <= hi;
  }
  [[nodiscard]] bool is_trivial() const { return lo == 0 && hi == modulus - 1; }
  friend auto operator<=>(const ResidueInterval &,
                          const ResidueInterval &) = default;
};

using Atom = std::variant<AffineIneq, ResidueInterval>;

inline bool atom_holds(const Atom &atom, std::span<const Int> x) {
  return std::visit([&](const auto &a) { return a.holds(x); }, atom);
}

/// Logical AND of atoms. A conjunct whose residue intervals are found
/// contradictory while merging is marked infeasible.
class Conjunct {
public:
  Conjunct() = default;

  static Conjunct of(const Atom &atom) {
    Conjunct c;
    c.add(atom);
    return c;
  }

  void add(const Atom &atom) {
    if (const auto *ineq = std::get_if<AffineIneq>(&atom))
      add_affine(*ineq);
    else
      add_residue(std::get<ResidueInterval>(atom));
  }

  void add_affine(const AffineIneq &ineq) {
    if (is_zero(ineq.a)) {
      if (ineq.c < 0)
        infeasible_ = true;
      return;
    }
    auto it = std::lower_bound(affine_.begin(), affine_.end(), ineq,
                               [](const AffineIneq &l, const AffineIneq &r) {
                                 return l.a < r.a;
                               });
    if (it != affine_.end() && it->a == ineq.a)
      it->c = std::min(it->c, ineq.c);
    else
      affine_.insert(it, ineq);
  }

  void add_residue(ResidueInterval r) {
    if (r.modulus < 1)
      throw Error(ErrorCode::Malformed, "residue modulus must be positive");
    if (r.lo > r.hi || r.lo >= r.modulus || r.hi < 0) {
      infeasible_ = true;
      return;
    }
    r.lo = std::max<Int>(r.lo, 0);
    r.hi = std::min<Int>(r.hi, r.modulus - 1);
    if (r.is_trivial() || is_zero(r.f)) {
      if (is_zero(r.f) && r.lo > 0)
        infeasible_ = true;
      return;
    }
    // Descending order of the linear form puts the outermost iterator first.
    auto key_less = [](const ResidueInterval &l, const ResidueInterval &x) {
      return std::tie(x.f, x.modulus) < std::tie(l.f, l.modulus);
    };
    auto it = std::lower_bound(residues_.begin(), residues_.end(), r, key_less);
    if (it != residues_.end() && it->f == r.f && it->modulus == r.modulus) {
      it->lo = std::max(it->lo, r.lo);
      it->hi = std::min(it->hi, r.hi);
      if (it->lo > it->hi)
        infeasible_ = true;
    } else {
      residues_.insert(it, std::move(r));
    }
  }

  [[nodiscard]] bool holds(std::span<const Int> x) const {
    if (infeasible_)
      return false;
    for (const auto &a : residues_)
      if (!a.holds(x))
        return false;
    for (const auto &a : affine_)
      if (!a.holds(x))
        return false;
    return true;
  }

  /// True when the constraints are trivially contradictory. A feasible flag
  /// does not mean the conjunct has integer points.
  [[nodiscard]] bool infeasible() const { return infeasible_; }
  [[nodiscard]] bool is_universe() const {
    return !infeasible_ && affine_.empty() && residues_.empty();
  }
  [[nodiscard]] const std::vector<AffineIneq> &affine() const { return affine_; }
  [[nodiscard]] const std::vector<ResidueInterval> &residues() const {
    return residues_;
  }
  [[nodiscard]] std::vector<Atom> atoms() const {
    std::vector<Atom> out(residues_.begin(), residues_.end());
    out.insert(out.end(), affine_.begin(), affine_.end());
    return out;
  }

  /// Syntactic implication: every atom of `other` is implied by some atom of
  /// this conjunct, hence this conjunct is a subset of `other`.
  [[nodiscard]] bool implies(const Conjunct &other) const {
    if (infeasible_)
      return true;
    if (other.infeasible_)
      return false;
    for (const auto &r : other.residues_) {
      auto it = std::find_if(residues_.begin(), residues_.end(),
                             [&](const ResidueInterval &x) {
                               return x.f == r.f && x.modulus == r.modulus;
                             });
      if (it == residues_.end() || it->lo < r.lo || it->hi > r.hi)
        return false;
    }
    for (const auto &a : other.affine_) {
      auto it = std::find_if(affine_.begin(), affine_.end(),
                             [&](const AffineIneq &x) { return x.a == a.a; });
      if (it == affine_.end() || it->c > a.c)
        return false;
    }
    return true;
  }

  friend Conjunct operator&(Conjunct l, const Conjunct &r) {
    if (l.infeasible_ || r.infeasible_) {
      Conjunct c;
      c.infeasible_ = true;
      return c;
    }
    for (const auto &a : r.residues_) {
      l.add_residue(a);
      if (l.infeasible_)
        return l;
    }
    for (const auto &a : r.affine_)
      l.add_affine(a);
    return l;
  }

  friend bool operator==(const Conjunct &, const Conjunct &) = default;
  friend auto operator<=>(const Conjunct &, const Conjunct &) = default;

private:
  std::vector<ResidueInterval> residues_;
  std::vector<AffineIneq> affine_;
  bool infeasible_ = false;
};

struct ConjunctHash {
  std::size_t operator()(const Conjunct &c) const noexcept {
    std::size_t h = c.infeasible() ? 0x9e3779b97f4a7c15ULL : 0;
    auto mix = [&h](Int v) {
      h ^= std::hash<Int>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    for (const auto &r : c.residues()) {
      for (Int v : r.f)
        mix(v);
      mix(r.modulus);
      mix(r.lo);
      mix(r.hi);
    }
    for (const auto &a : c.affine()) {
      for (Int v : a.a)
        mix(v);
      mix(a.c);
    }
    return h;
  }
};

struct QSetLimits {
  std::size_t max_disjuncts = 100'000;
  std::size_t point_budget = 100'000'000;
};

/// Finite union of conjuncts over Z^dim. No disjuncts means the empty set.
class QSet {
public:
  QSet() = default;
  explicit QSet(std::size_t dim) : dim_(dim) {}
  QSet(std::size_t dim, std::vector<Conjunct> disjuncts) : dim_(dim) {
    for (auto &c : disjuncts)
      push(std::move(c));
  }

  static QSet empty(std::size_t dim) { return QSet(dim); }
  static QSet universe(std::size_t dim) { return QSet(dim, {Conjunct{}}); }
  static QSet of(std::size_t dim, const Atom &atom) {
    return QSet(dim, {Conjunct::of(atom)});
  }

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] const std::vector<Conjunct> &disjuncts() const {
    return disjuncts_;
  }
  /// No disjunct at all. Use `is_empty` to decide emptiness semantically.
  [[nodiscard]] bool trivially_empty() const { return disjuncts_.empty(); }
  [[nodiscard]] bool member(std::span<const Int> x) const {
    return std::any_of(disjuncts_.begin(), disjuncts_.end(),
                       [&](const Conjunct &c) { return c.holds(x); });
  }

  /// Adds a disjunct, skipping infeasible ones and exact duplicates.
  void push(Conjunct c) {
    if (c.infeasible())
      return;
    if (std::find(disjuncts_.begin(), disjuncts_.end(), c) != disjuncts_.end())
      return;
    disjuncts_.push_back(std::move(c));
  }

  /// Drops disjuncts syntactically contained in another one and sorts the
  /// remainder.
  void drop_subsumed() {
    std::vector<Conjunct> kept;
    for (std::size_t i = 0; i < disjuncts_.size(); ++i) {
      bool covered = false;
      for (std::size_t j = 0; j < disjuncts_.size() && !covered; ++j) {
        if (i == j || !disjuncts_[i].implies(disjuncts_[j]))
          continue;
        // Equal conjuncts cannot coexist, so mutual implication is rare;
        // keep the lower index in that case.
        covered = !disjuncts_[j].implies(disjuncts_[i]) || j < i;
      }
      if (!covered)
        kept.push_back(disjuncts_[i]);
    }
    std::sort(kept.begin(), kept.end());
    disjuncts_ = std::move(kept);
  }

  friend bool operator==(const QSet &, const QSet &) = default;

private:
  std::size_t dim_ = 0;
  std::vector<Conjunct> disjuncts_;
};

namespace detail {
inline void check_dims(const QSet &a, const QSet &b) {
  if (a.dim() != b.dim())
    throw Error(ErrorCode::Malformed, "set dimensions differ");
}
} // namespace detail

inline bool member(const QSet &set, std::span<const Int> x) {
  return set.member(x);
}

inline QSet unite(const QSet &a, const QSet &b,
                  const QSetLimits &limits = {}) {
  detail::check_dims(a, b);
  QSet out = a;
  for (const auto &c : b.disjuncts())
    out.push(c);
  if (out.disjuncts().size() > limits.max_disjuncts)
    throw Error(ErrorCode::SetTooComplex,
                std::to_string(out.disjuncts().size()) + " disjuncts");
  return out;
}

inline QSet intersect(const QSet &a, const QSet &b,
                      const QSetLimits &limits = {}) {
  detail::check_dims(a, b);
  QSet out(a.dim());
  for (const auto &l : a.disjuncts())
    for (const auto &r : b.disjuncts()) {
      out.push(l & r);
      if (out.disjuncts().size() > limits.max_disjuncts)
        throw Error(ErrorCode::SetTooComplex,
                    "intersection exceeds " +
                        std::to_string(limits.max_disjuncts) + " disjuncts");
    }
  return out;
}

/// Negation of a single atom as a union of at most two atoms.
inline QSet complement_atom(const Atom &atom, std::size_t dim) {
  if (const auto *ineq = std::get_if<AffineIneq>(&atom)) {
    AffineIneq neg{IntVec(ineq->a.size()), -ineq->c - 1};
    for (std::size_t d = 0; d < ineq->a.size(); ++d)
      neg.a[d] = -ineq->a[d];
    return QSet::of(dim, neg);
  }
  const auto &r = std::get<ResidueInterval>(atom);
  QSet out(dim);
  if (r.lo > 0)
    out.push(Conjunct::of(ResidueInterval{r.f, r.modulus, 0, r.lo - 1}));
  if (r.hi < r.modulus - 1)
    out.push(
        Conjunct::of(ResidueInterval{r.f, r.modulus, r.hi + 1, r.modulus - 1}));
  return out;
}

inline QSet complement(const QSet &set, const QSetLimits &limits = {}) {
  QSet out = QSet::universe(set.dim());
  for (const auto &c : set.disjuncts()) {
    QSet neg(set.dim());
    for (const auto &atom : c.atoms())
      neg = unite(neg, complement_atom(atom, set.dim()), limits);
    out = intersect(out, neg, limits);
  }
  return out;
}

inline QSet subtract(const QSet &a, const QSet &b,
                     const QSetLimits &limits = {}) {
  detail::check_dims(a, b);
  return intersect(a, complement(b, limits), limits);
}

namespace detail {

/// Union of two conjuncts that differ only in one residue interval whose
/// ranges touch or overlap, if that is the case.
inline std::optional<Conjunct> merge_adjacent(const Conjunct &a,
                                              const Conjunct &b) {
  if (a.affine() != b.affine() || a.residues().size() != b.residues().size())
    return std::nullopt;
  std::optional<std::size_t> diff;
  for (std::size_t i = 0; i < a.residues().size(); ++i) {
    const auto &x = a.residues()[i];
    const auto &y = b.residues()[i];
    if (x.f != y.f || x.modulus != y.modulus)
      return std::nullopt;
    if (x.lo == y.lo && x.hi == y.hi)
      continue;
    if (diff)
      return std::nullopt;
    diff = i;
  }
  if (!diff)
    return a;
  const auto &x = a.residues()[*diff];
  const auto &y = b.residues()[*diff];
  if (x.hi + 1 < y.lo || y.hi + 1 < x.lo)
    return std::nullopt;
  Conjunct merged;
  for (std::size_t i = 0; i < a.residues().size(); ++i) {
    if (i == *diff)
      merged.add_residue(ResidueInterval{x.f, x.modulus, std::min(x.lo, y.lo),
                                         std::max(x.hi, y.hi)});
    else
      merged.add_residue(a.residues()[i]);
  }
  for (const auto &ineq : a.affine())
    merged.add_affine(ineq);
  return merged;
}

} // namespace detail

/// Same set with subsumed disjuncts removed and neighbouring residue ranges
/// merged. Purely syntactic, so the result is pointwise equal to the input.
inline QSet simplify(const QSet &set) {
  std::vector<Conjunct> work = set.disjuncts();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < work.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < work.size() && !changed; ++j)
        if (auto m = detail::merge_adjacent(work[i], work[j])) {
          work[i] = std::move(*m);
          work.erase(work.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
        }
    QSet tmp(set.dim(), work);
    tmp.drop_subsumed();
    if (tmp.disjuncts().size() != work.size())
      changed = true;
    work = tmp.disjuncts();
  }
  return QSet(set.dim(), std::move(work));
}

/// Box `[0, P_1) x ... x [0, P_N)` over which every residue atom of `set` is
/// periodic: `P_d = lcm(s / gcd(f_d, s))` over all residue atoms.
inline DomainBox period_box(const QSet &set) {
  IntVec period(set.dim(), 1);
  for (const auto &c : set.disjuncts())
    for (const auto &r : c.residues())
      for (std::size_t d = 0; d < set.dim(); ++d) {
        const Int g = std::gcd(r.f[d], r.modulus);
        period[d] = std::lcm(period[d], r.modulus / g);
      }
  DomainBox box{IntVec(set.dim(), 0), period};
  for (auto &u : box.upper)
    --u;
  return box;
}

inline bool has_affine_atoms(const QSet &set) {
  return std::any_of(set.disjuncts().begin(), set.disjuncts().end(),
                     [](const Conjunct &c) { return !c.affine().empty(); });
}

/// Region over which emptiness of a set restricted to the spec's domain can
/// be decided exactly: the domain box when bounded, otherwise the period box.
inline DomainBox decision_box(const QSet &set, const ProblemSpec &spec) {
  if (spec.domain)
    return *spec.domain;
  if (has_affine_atoms(set))
    throw Error(ErrorCode::UnsupportedSet,
                "affine constraints over an infinite domain");
  return period_box(set);
}

/// Emptiness of `set` intersected with the spec's domain, decided by
/// enumeration.
inline bool is_empty(const QSet &set, const ProblemSpec &spec,
                     const QSetLimits &limits = {}) {
  if (set.trivially_empty())
    return true;
  const DomainBox box = decision_box(set, spec);
  if (box_volume(box) > limits.point_budget)
    throw Error(ErrorCode::BoxTooLarge,
                "enumeration box has " + std::to_string(box_volume(box)) +
                    " points");
  bool found = false;
  // for_each_box_point has no early exit; the scan below stops on a hit.
  const std::size_t n = box.lower.size();
  IntVec x = box.lower;
  while (!found) {
    if (set.member(x))
      found = true;
    std::size_t d = n;
    bool done = false;
    while (d > 0) {
      --d;
      if (x[d] < box.upper[d]) {
        ++x[d];
        break;
      }
      x[d] = box.lower[d];
      if (d == 0)
        done = true;
    }
    if (done)
      break;
  }
  return !found;
}

/// Pointwise equality over the decision region of both sets.
inline bool equal_sets(const QSet &a, const QSet &b, const ProblemSpec &spec,
                       const QSetLimits &limits = {}) {
  return is_empty(subtract(a, b, limits), spec, limits) &&
         is_empty(subtract(b, a, limits), spec, limits);
}

/// Emptiness decisions over a fixed list of sample points with a per-conjunct
/// cache. Valid whenever the points form a region on which the sets being
/// tested are exactly decided (a period box of all residue forms involved,
/// or a bounded domain).
class EmptinessCache {
public:
  explicit EmptinessCache(std::vector<IntVec> points)
      : points_(std::move(points)) {}

  [[nodiscard]] bool empty(const Conjunct &c) {
    if (c.infeasible())
      return true;
    if (auto it = cache_.find(c); it != cache_.end())
      return it->second;
    const bool e = std::none_of(points_.begin(), points_.end(),
                                [&](const IntVec &x) { return c.holds(x); });
    cache_.emplace(c, e);
    return e;
  }

  [[nodiscard]] bool empty(const QSet &s) {
    return std::all_of(s.disjuncts().begin(), s.disjuncts().end(),
                       [&](const Conjunct &c) { return empty(c); });
  }

  /// Same set with every empty conjunct removed.
  [[nodiscard]] QSet prune(const QSet &s) {
    QSet out(s.dim());
    for (const auto &c : s.disjuncts())
      if (!empty(c))
        out.push(c);
    return out;
  }

  [[nodiscard]] std::size_t size() const { return cache_.size(); }
  [[nodiscard]] const std::vector<IntVec> &points() const { return points_; }

private:
  std::vector<IntVec> points_;
  std::unordered_map<Conjunct, bool, ConjunctHash> cache_;
};

// ---------------------------------------------------------------------------
// Text rendering, e.g. "i ≡ 3 [4] ∧ ¬(j ≡ 3 [4])".

inline std::string format_linear(std::span<const Int> f,
                                 const std::vector<std::string> &names) {
  std::string s;
  for (std::size_t d = 0; d < f.size(); ++d) {
    const Int c = f[d];
    if (c == 0)
      continue;
    if (s.empty()) {
      if (c == -1)
        s += "-";
      else if (c != 1)
        s += std::to_string(c);
    } else {
      s += c < 0 ? " - " : " + ";
      if (std::abs(c) != 1)
        s += std::to_string(std::abs(c));
    }
    s += names[d];
  }
  return s.empty() ? "0" : s;
}

inline std::string format_atom(const Atom &atom,
                               const std::vector<std::string> &names) {
  if (const auto *r = std::get_if<ResidueInterval>(&atom)) {
    const std::string form = format_linear(r->f, names);
    const std::string mod = " [" + std::to_string(r->modulus) + "]";
    if (r->lo == r->hi)
      return form + " ≡ " + std::to_string(r->lo) + mod;
    if (r->lo == 0 && r->hi == r->modulus - 2)
      return "¬(" + form + " ≡ " + std::to_string(r->modulus - 1) + mod + ")";
    if (r->lo == 1 && r->hi == r->modulus - 1)
      return "¬(" + form + " ≡ 0" + mod + ")";
    const bool compound =
        std::count_if(r->f.begin(), r->f.end(), [](Int v) { return v != 0; }) > 1;
    const std::string lhs = compound ? "(" + form + ")" : form;
    return std::to_string(r->lo) + " ≤ " + lhs + " mod " +
           std::to_string(r->modulus) + " ≤ " + std::to_string(r->hi);
  }
  const auto &a = std::get<AffineIneq>(atom);
  const auto nz = std::count_if(a.a.begin(), a.a.end(), [](Int v) { return v != 0; });
  if (nz == 1) {
    const auto it = std::find_if(a.a.begin(), a.a.end(), [](Int v) { return v != 0; });
    const std::size_t d = static_cast<std::size_t>(it - a.a.begin());
    if (*it == -1)
      return names[d] + " ≤ " + std::to_string(a.c);
    if (*it == 1)
      return names[d] + " ≥ " + std::to_string(-a.c);
  }
  return format_linear(a.a, names) + " ≥ " + std::to_string(-a.c);
}

inline std::string to_string(const Conjunct &c,
                             const std::vector<std::string> &names) {
  if (c.infeasible())
    return "false";
  if (c.is_universe())
    return "true";
  std::string s;
  for (const auto &atom : c.atoms()) {
    if (!s.empty())
      s += " ∧ ";
    s += format_atom(atom, names);
  }
  return s;
}

inline std::string to_string(const QSet &set,
                             const std::vector<std::string> &names) {
  if (set.trivially_empty())
    return "false";
  if (set.disjuncts().size() == 1)
    return to_string(set.disjuncts().front(), names);
  std::string s;
  for (const auto &c : set.disjuncts()) {
    if (!s.empty())
      s += " ∨ ";
    const bool wrap = c.atoms().size() > 1;
    s += wrap ? "(" + to_string(c, names) + ")" : to_string(c, names);
  }
  return s;
}

inline std::string to_string(const QSet &set) {
  return to_string(set, default_iterators(set.dim()));
}

} // namespace mars
