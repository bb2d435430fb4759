#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace mars;

namespace {

ResidueInterval eq(IntVec f, Int s, Int r) { return {std::move(f), s, r, r}; }

const IntVec I{1, 0};
const IntVec J{0, 1};

ProblemSpec plane(std::optional<DomainBox> box = std::nullopt) {
  ProblemSpec p;
  p.name = "plane";
  p.dim = 2;
  p.dependences = {{1, 0}};
  p.hyperplanes = {{I, 4}, {J, 4}};
  p.domain = std::move(box);
  return p;
}

// Pointwise check of a binary operation over random points.
template <typename Op, typename Pred>
void check_pointwise(const QSet &a, const QSet &b, Op op, Pred pred, std::mt19937 &rng) {
  const QSet c = op(a, b);
  for (int i = 0; i < 1000; ++i) {
    const IntVec x = gen::vec(rng, a.dim(), -30, 30);
    REQUIRE(member(c, x) == pred(member(a, x), member(b, x)));
  }
}

bool brute_empty(const QSet &s, Int radius) {
  bool found = false;
  for_each_box_point(DomainBox{IntVec(s.dim(), -radius), IntVec(s.dim(), radius)},
                     [&](const IntVec &x) { found = found || s.member(x); });
  return !found;
}

} // namespace

TEST_CASE("membership in a residue set") {
  const auto s = QSet::of(2, eq(I, 4, 3));
  CHECK(member(s, IntVec{3, 0}));
  CHECK_FALSE(member(s, IntVec{2, 0}));
  CHECK(member(s, IntVec{-1, 5}));
  CHECK_FALSE(member(QSet::empty(2), IntVec{3, 0}));
  CHECK(member(QSet::universe(2), IntVec{3, 0}));
}

TEST_CASE("residue atoms built from the negative representative") {
  const auto r = ResidueInterval::from_negative_range(I, 4, -1, -1);
  CHECK(r.lo == 3);
  CHECK(r.hi == 3);
  const auto w = ResidueInterval::from_negative_range({1, 1}, 4, -2, -1);
  CHECK(w.lo == 2);
  CHECK(w.hi == 3);
}

TEST_CASE("intersection examples") {
  const auto a = QSet::of(2, eq(I, 4, 3));
  const auto b = QSet::of(2, eq(J, 4, 3));
  const auto ab = intersect(a, b);
  REQUIRE(ab.disjuncts().size() == 1);
  CHECK(to_string(ab) == "i ≡ 3 [4] ∧ j ≡ 3 [4]");
  CHECK(intersect(a, QSet::empty(2)).trivially_empty());
  CHECK(intersect(a, QSet::of(2, eq(I, 4, 2))).trivially_empty());
}

TEST_CASE("union examples") {
  const auto a = QSet::of(2, eq(I, 4, 3));
  const auto b = QSet::of(2, eq(J, 4, 3));
  const auto u = unite(a, b);
  CHECK(u.disjuncts().size() == 2);
  CHECK(member(u, IntVec{3, 0}));
  CHECK(member(u, IntVec{0, 3}));
  CHECK_FALSE(member(u, IntVec{0, 0}));
  CHECK(unite(a, QSet::empty(2)) == a);
  CHECK(unite(a, a) == a);
}

TEST_CASE("atom complements") {
  const auto n = complement_atom(eq(I, 4, 3), 2);
  REQUIRE(n.disjuncts().size() == 1);
  CHECK(to_string(n) == "¬(i ≡ 3 [4])");
  CHECK(n.disjuncts()[0].residues()[0] == ResidueInterval{I, 4, 0, 2});

  const auto ge = complement_atom(AffineIneq{I, 0}, 2);
  REQUIRE(ge.disjuncts().size() == 1);
  CHECK(ge.disjuncts()[0].affine()[0] == AffineIneq{{-1, 0}, -1});
  CHECK(to_string(ge) == "i ≤ -1");

  const auto split = complement_atom(ResidueInterval{I, 4, 1, 2}, 2);
  CHECK(split.disjuncts().size() == 2);
  for (Int i = -8; i < 8; ++i) {
    const Int r = ref::fmod(i, 4);
    CHECK(member(split, IntVec{i, 0}) == (r == 0 || r == 3));
  }
}

TEST_CASE("residue intervals on the same form merge") {
  Conjunct c;
  c.add(ResidueInterval{I, 4, 0, 2});
  c.add(ResidueInterval{I, 4, 2, 3});
  REQUIRE(c.residues().size() == 1);
  CHECK(c.residues()[0] == ResidueInterval{I, 4, 2, 2});
  c.add(ResidueInterval{I, 4, 3, 3});
  CHECK(c.infeasible());
}

TEST_CASE("subtraction examples") {
  std::mt19937 rng(11);
  const auto a = QSet::of(2, eq(I, 4, 3));
  const auto b = QSet::of(2, eq(J, 4, 3));
  auto minus = [](const QSet &x, const QSet &y) { return subtract(x, y); };
  auto pred = [](bool x, bool y) { return x && !y; };
  check_pointwise(a, b, minus, pred, rng);
  check_pointwise(unite(a, b), b, minus, pred, rng);
  check_pointwise(a, QSet::empty(2), minus, pred, rng);
  CHECK(to_string(subtract(a, b)) == "i ≡ 3 [4] ∧ ¬(j ≡ 3 [4])");
}

TEST_CASE("set operations agree with boolean operations pointwise") {
  std::mt19937 rng(31337);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const QSet a = gen::qset(rng, n);
    const QSet b = gen::qset(rng, n);
    check_pointwise(a, b, [](auto &x, auto &y) { return unite(x, y); },
                    [](bool x, bool y) { return x || y; }, rng);
    check_pointwise(a, b, [](auto &x, auto &y) { return intersect(x, y); },
                    [](bool x, bool y) { return x && y; }, rng);
    check_pointwise(a, b, [](auto &x, auto &y) { return subtract(x, y); },
                    [](bool x, bool y) { return x && !y; }, rng);
    check_pointwise(a, b, [](auto &x, auto &) { return complement(x); },
                    [](bool x, bool) { return !x; }, rng);
    check_pointwise(a, b, [](auto &x, auto &) { return simplify(x); },
                    [](bool x, bool) { return x; }, rng);
  }
}

TEST_CASE("double complement is the identity pointwise") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const QSet a = gen::qset(rng, n);
    const QSet nn = complement(complement(a));
    for (int i = 0; i < 1000; ++i) {
      const IntVec x = gen::vec(rng, n, -30, 30);
      REQUIRE(member(nn, x) == member(a, x));
    }
  }
}

TEST_CASE("emptiness examples") {
  const auto p = plane();
  Conjunct c;
  c.add(eq(I, 4, 3));
  c.add(eq(I, 4, 2));
  CHECK(is_empty(QSet(2, {c}), p));
  CHECK_FALSE(is_empty(intersect(QSet::of(2, eq(I, 4, 3)), QSet::of(2, eq(J, 4, 3))), p));
  // Feasible syntactically, empty over the integers: i + j odd and both even.
  Conjunct d;
  d.add(eq({1, 1}, 2, 1));
  d.add(eq(I, 2, 0));
  d.add(eq(J, 2, 0));
  CHECK_FALSE(d.infeasible());
  CHECK(is_empty(QSet(2, {d}), p));
}

TEST_CASE("period boxes") {
  const auto box = period_box(QSet::of(2, ResidueInterval{{2, 1}, 4, 0, 0}));
  CHECK(box.upper == IntVec{1, 3});
  const auto box2 = period_box(unite(QSet::of(2, eq(I, 4, 1)), QSet::of(2, eq(J, 6, 1))));
  CHECK(box2.upper == IntVec{3, 5});
}

TEST_CASE("emptiness of random residue sets matches a wide scan") {
  std::mt19937 rng(99);
  const auto p = plane();
  std::size_t empties = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const QSet a = gen::qset(rng, 2, false);
    const QSet b = gen::qset(rng, 2, false);
    const QSet s = intersect(a, b);
    const bool e = is_empty(s, p);
    CHECK(e == brute_empty(s, 30));
    empties += e ? 1 : 0;
  }
  CHECK(empties > 10);
}

TEST_CASE("emptiness with affine atoms needs a bounded domain") {
  std::mt19937 rng(3);
  const auto bounded = plane(DomainBox{{-12, -12}, {12, 12}});
  for (int trial = 0; trial < 300; ++trial) {
    const QSet s = gen::qset(rng, 2);
    bool found = false;
    for_each_box_point(*bounded.domain, [&](const IntVec &x) { found = found || s.member(x); });
    CHECK(is_empty(s, bounded) == !found);
  }
  CHECK_THROWS_AS(is_empty(QSet::of(2, AffineIneq{I, 0}), plane()), Error);
}

TEST_CASE("emptiness agrees with enumeration on the 2D benchmark sets") {
  for (const auto &b : benchmarks::all()) {
    const auto &p = b.spec;
    if (p.dim != 2)
      continue;
    CAPTURE(p.name);
    std::vector<QSet> sets;
    for (auto dir : {Direction::Forward, Direction::Backward}) {
      const auto f = flow(p, dir);
      sets.push_back(f.whole);
      for (const auto &[k, s] : f.per_dependence)
        sets.push_back(s);
    }
    for (const auto &o : all_neighbor_offsets(p.hyperplanes.size()))
      for (std::size_t j = 0; j < p.dependences.size(); ++j) {
        sets.push_back(exact_crossing_set(p, j, o, Direction::Forward));
        sets.push_back(complement(exact_crossing_set(p, j, o, Direction::Forward)));
      }
    for (const auto &m : mars_partition(p, {.exhaustive = true}).mars)
      sets.push_back(m.set);
    for (std::size_t i = 0; i < sets.size(); ++i)
      for (std::size_t j = i; j < sets.size(); ++j) {
        const QSet s = intersect(sets[i], sets[j]);
        REQUIRE(is_empty(s, p) == brute_empty(s, 20));
      }
  }
}

TEST_CASE("enumeration budget and disjunct cap") {
  const auto p = plane();
  const auto big = QSet::of(2, ResidueInterval{I, 1000, 999, 999}) ;
  const auto s = intersect(big, QSet::of(2, ResidueInterval{J, 1000, 999, 999}));
  CHECK_THROWS_MATCHES(is_empty(s, p, {.max_disjuncts = 100, .point_budget = 1000}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error &e) {
                         return e.code() == ErrorCode::BoxTooLarge;
                       }));
  CHECK_FALSE(is_empty(s, p));

  QSet wide(2);
  for (Int r = 0; r < 4; ++r)
    wide.push(Conjunct::of(eq(I, 8, r)));
  QSet other(2);
  for (Int r = 0; r < 4; ++r)
    other.push(Conjunct::of(eq(J, 8, r)));
  CHECK(intersect(wide, other).disjuncts().size() == 16);
  CHECK_THROWS_MATCHES(intersect(wide, other, {.max_disjuncts = 10}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error &e) {
                         return e.code() == ErrorCode::SetTooComplex;
                       }));
}

TEST_CASE("set equality by enumeration") {
  const auto p = plane();
  const auto a = unite(QSet::of(2, ResidueInterval{I, 4, 0, 1}),
                       QSet::of(2, ResidueInterval{I, 4, 2, 3}));
  CHECK(equal_sets(a, QSet::universe(2), p));
  CHECK(simplify(a) == QSet::universe(2));
  CHECK_FALSE(equal_sets(a, QSet::of(2, eq(I, 4, 0)), p));
}

TEST_CASE("text rendering") {
  const std::vector<std::string> names{"t", "i"};
  CHECK(format_linear(IntVec{1, -1}, names) == "t - i");
  CHECK(format_linear(IntVec{4, 2}, names) == "4t + 2i");
  CHECK(format_linear(IntVec{-1, 0}, names) == "-t");
  CHECK(format_atom(ResidueInterval{{1, 1}, 4, 2, 3}, names) == "2 ≤ (t + i) mod 4 ≤ 3");
  CHECK(format_atom(ResidueInterval{{1, 0}, 4, 1, 3}, names) == "¬(t ≡ 0 [4])");
  CHECK(format_atom(AffineIneq{{1, 1}, -3}, names) == "t + i ≥ 3");
  CHECK(to_string(QSet::empty(2)) == "false");
  CHECK(to_string(QSet::universe(2)) == "true");
}

TEST_CASE("emptiness cache agrees with direct decisions") {
  std::mt19937 rng(8);
  const auto p = plane();
  std::vector<IntVec> pts;
  for_each_box_point(DomainBox{{0, 0}, {59, 59}}, [&](const IntVec &x) { pts.push_back(x); });
  EmptinessCache cache(pts);
  for (int trial = 0; trial < 200; ++trial) {
    const QSet s = gen::qset(rng, 2, false);
    CHECK(cache.empty(s) == is_empty(s, p));
    const QSet pruned = cache.prune(s);
    for (int i = 0; i < 100; ++i) {
      const IntVec x = gen::vec(rng, 2, -30, 30);
      REQUIRE(member(pruned, x) == member(s, x));
    }
  }
}
