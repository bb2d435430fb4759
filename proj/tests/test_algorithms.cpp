#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace mars;

namespace {

ProblemSpec sq() { return benchmarks::sw_square().spec; }

std::set<IntVec> tile_members(const QSet &s, const ProblemSpec &p, const IntVec &tile) {
  std::set<IntVec> out;
  for (const auto &x : ref::tile_points(p, tile))
    if (member(s, x))
      out.insert(x);
  return out;
}

std::vector<ProblemSpec> sized_benchmarks() {
  std::vector<ProblemSpec> out;
  for (const auto &b : benchmarks::all()) {
    const std::vector<Int> sizes = b.spec.dim == 2 ? std::vector<Int>{4, 8} : std::vector<Int>{8};
    for (Int s : sizes)
      out.push_back(with_tile_sizes(b.spec, std::vector<Int>{s}));
  }
  return out;
}

std::size_t bits(const NeighborOffset &o) {
  return static_cast<std::size_t>(std::count(o.offsets.begin(), o.offsets.end(), 1));
}

} // namespace

TEST_CASE("crossing sets of single dependences") {
  const auto p = sq();
  const auto right = crossing_set(0, 0, p);
  CHECK(to_string(right, iterator_names(p)) == "i ≡ 3 [4]");
  CHECK(crossing_set(0, 1, p).trivially_empty());

  const auto jac = benchmarks::jacobi_1d().spec;
  // Dependence (1,1) has width 2 against the t + i family.
  std::size_t j = 0;
  while (jac.dependences[j] != IntVec{1, 1})
    ++j;
  const auto thick = crossing_set(0, j, jac);
  REQUIRE(thick.disjuncts().size() == 1);
  CHECK(thick.disjuncts()[0].residues()[0] == ResidueInterval{{1, 1}, 4, 2, 3});
  // Against the oracle on the sample tile.
  const IntVec tile{2, 2};
  for (const auto &x : ref::tile_points(jac, tile))
    CHECK(member(thick, x) == oracle::crosses(x, jac.dependences[j], 0, jac));
}

TEST_CASE("flow-out closed forms") {
  const auto p = sq();
  const auto f = flow_out(p);
  CHECK(to_string(f.whole, iterator_names(p)) == "j ≡ 3 [4] ∨ i ≡ 3 [4]");
  for (IntVec t : {IntVec{2, 2}, IntVec{-1, 4}}) {
    std::set<IntVec> expected;
    for (const auto &x : ref::tile_points(p, t))
      if (!ref::signature(x, p).empty())
        expected.insert(x);
    CHECK(tile_members(f.whole, p, t) == expected);
    CHECK(expected.size() == 7);
  }

  const auto g = benchmarks::gemm().spec;
  CHECK(to_string(flow_out(g).whole, iterator_names(g)) == "j ≡ 7 [8]");
}

TEST_CASE("flow-out whole is the union of its parts") {
  std::mt19937 rng(1);
  for (const auto &p : sized_benchmarks()) {
    for (auto dir : {Direction::Forward, Direction::Backward}) {
      const auto f = flow(p, dir);
      QSet u = QSet::empty(p.dim);
      for (const auto &[k, s] : f.per_dependence)
        u = unite(u, s);
      for (int i = 0; i < 1000; ++i) {
        const IntVec x = gen::vec(rng, p.dim, -40, 40);
        REQUIRE(member(u, x) == member(f.whole, x));
      }
    }
  }
}

TEST_CASE("flow-out and flow-in match brute force on every benchmark") {
  for (const auto &p : sized_benchmarks()) {
    CAPTURE(p.name, tile_sizes(p));
    const IntVec tile = oracle::sample_tile(p).coords;
    std::set<IntVec> out, readers, producers;
    for (const auto &x : ref::tile_points(p, tile)) {
      if (!ref::signature(x, p).empty())
        out.insert(x);
      for (const auto &b : p.dependences) {
        const IntVec y = ref::minus(x, b);
        if (ref::tile_of(y, p) != tile) {
          readers.insert(x);
          producers.insert(y);
        }
      }
    }
    CHECK(tile_members(flow_out(p).whole, p, tile) == out);
    const auto in = flow_in(p);
    CHECK(tile_members(in.whole, p, tile) == readers);
    CHECK(flow_in_producers(p, in, TileCoord{tile}) == producers);
  }
}

TEST_CASE("flow-in closed forms") {
  const auto p = sq();
  CHECK(to_string(flow_in(p).whole, iterator_names(p)) == "j ≡ 0 [4] ∨ i ≡ 0 [4]");
  const auto g = benchmarks::gemm().spec;
  CHECK(to_string(flow_in(g).whole, iterator_names(g)) == "j ≡ 0 [8]");
  const auto in = flow_in(p);
  CHECK(flow_in_producers(p, in, TileCoord{{1, 1}}) == oracle::flow_in(p, TileCoord{{1, 1}}));
}

TEST_CASE("flow-in of the first tile of a bounded domain") {
  auto p = sq();
  p.name = "sw-bounded";
  p.domain = DomainBox{{0, 0}, {100, 100}};
  const auto in = flow_in(p);
  CHECK(points_in_tile(in.whole, p, TileCoord{{0, 0}}).empty());
  CHECK(flow_in_producers(p, in, TileCoord{{0, 0}}).empty());
  CHECK(points_in_tile(in.whole, p, TileCoord{{1, 1}}).size() == 7);
}

TEST_CASE("realizable consumer tiles") {
  const auto p = sq();
  const auto c = realizable_consumers(p);
  CHECK(c == std::vector<NeighborOffset>{{{0, 1}}, {{1, 0}}, {{1, 1}}});
  CHECK(realizable_consumers(benchmarks::gemm().spec) ==
        std::vector<NeighborOffset>{{{0, 1, 0}}});
  CHECK(realizable_consumers(benchmarks::jacobi_2d_d().spec).size() == 15);
}

TEST_CASE("realizable consumers match tiles reached from a scan") {
  for (const auto &p : sized_benchmarks()) {
    CAPTURE(p.name, tile_sizes(p));
    // Every tile shape occurs within one period box of the tiling forms.
    std::set<IntVec> reached;
    for (const auto &x : decision_points(p))
      for (const auto &o : ref::signature(x, p))
        reached.insert(o);
    std::set<IntVec> got;
    for (const auto &o : realizable_consumers(p))
      got.insert(IntVec(o.offsets.begin(), o.offsets.end()));
    CHECK(got == reached);
  }
}

TEST_CASE("worked example partition") {
  const auto p = sq();
  const auto r = mars_partition(p);
  REQUIRE(r.mars.size() == 3);
  std::map<std::string, std::string> forms;
  for (const auto &m : r.mars)
    forms[m.signature.to_string()] = to_string(m.set, iterator_names(p));
  CHECK(forms.at("{(1,0)}") == "i ≡ 3 [4] ∧ ¬(j ≡ 3 [4])");
  CHECK(forms.at("{(0,1)}") == "¬(i ≡ 3 [4]) ∧ j ≡ 3 [4]");
  CHECK(forms.at("{(0,1),(1,0),(1,1)}") == "i ≡ 3 [4] ∧ j ≡ 3 [4]");
}

TEST_CASE("reference partition counts") {
  for (const auto &b : benchmarks::all()) {
    CAPTURE(b.spec.name);
    const auto r = mars_partition(b.spec);
    const auto tile = oracle::sample_tile(b.spec);
    std::size_t in_tile = 0, singles = 0;
    for (const auto &m : r.mars) {
      const auto n = points_in_tile(m.set, b.spec, tile).size();
      in_tile += n > 0;
      singles += n == 1;
    }
    CHECK(realizable_consumers(b.spec).size() == b.expected.consumer_tiles);
    CHECK(r.mars.size() == b.expected.mars_raw);
    CHECK(in_tile == b.expected.mars);
    CHECK(singles == b.expected.singletons);
  }
}

TEST_CASE("exhaustive candidates give the same partition") {
  for (const auto &b : benchmarks::all()) {
    const auto pruned = mars_partition(b.spec);
    const auto full = mars_partition(b.spec, {.exhaustive = true});
    CHECK(full.candidates_total == (std::size_t{1} << ((std::size_t{1} << b.spec.hyperplanes.size()) - 1)) - 1);
    REQUIRE(pruned.mars.size() == full.mars.size());
    for (std::size_t i = 0; i < pruned.mars.size(); ++i) {
      CHECK(pruned.mars[i].signature == full.mars[i].signature);
      CHECK(pruned.mars[i].set == full.mars[i].set);
    }
  }
}

TEST_CASE("partition equals the reference grouping on sample tiles") {
  for (const auto &p : sized_benchmarks()) {
    CAPTURE(p.name, tile_sizes(p));
    const IntVec tile = oracle::sample_tile(p).coords;
    const auto expected = ref::blocks(p, tile);
    ref::Blocks got;
    for (const auto &m : mars_partition(p).mars) {
      auto pts = tile_members(m.set, p, tile);
      if (!pts.empty())
        got[ref::to_sig(m.signature)] = std::move(pts);
    }
    CHECK(got == expected);
  }
}

TEST_CASE("partition blocks are disjoint and cover the flow-out") {
  for (const auto &p : sized_benchmarks()) {
    CAPTURE(p.name, tile_sizes(p));
    const auto r = mars_partition(p);
    const auto whole = flow_out(p).whole;
    // Sample tile plus one period box of the tiling forms.
    std::vector<IntVec> pts = ref::tile_points(p, oracle::sample_tile(p).coords);
    const auto box = decision_points(p);
    pts.insert(pts.end(), box.begin(), box.end());
    for (const auto &x : pts) {
      std::size_t hits = 0;
      for (const auto &m : r.mars)
        hits += member(m.set, x);
      REQUIRE(hits == (member(whole, x) ? 1u : 0u));
    }
  }
}

TEST_CASE("every point of a block has the block signature") {
  for (const auto &p : sized_benchmarks()) {
    const IntVec tile = oracle::sample_tile(p).coords;
    for (const auto &m : mars_partition(p).mars) {
      CHECK_FALSE(m.signature.empty());
      for (const auto &x : tile_members(m.set, p, tile))
        REQUIRE(ref::signature(x, p) == ref::to_sig(m.signature));
    }
  }
}

TEST_CASE("oracle signatures use only realizable consumers") {
  for (const auto &p : sized_benchmarks()) {
    const auto cons = realizable_consumers(p);
    const std::set<NeighborOffset> allowed(cons.begin(), cons.end());
    for (const auto &[s, pts] : oracle::mars(p, oracle::sample_tile(p)))
      for (const auto &o : s.tiles())
        CHECK(allowed.contains(o));
  }
}

TEST_CASE("partition size respects the subset bound") {
  CHECK(mars_upper_bound(2) == 7);
  CHECK(mars_upper_bound(3) == 127);
  CHECK(mars_upper_bound(4) == 32767);
  for (const auto &p : sized_benchmarks())
    CHECK(mars_partition(p).mars.size() <= mars_upper_bound(p.hyperplanes.size()));
}

TEST_CASE("flow-out and flow-in volumes of interior tiles agree") {
  for (const auto &p : sized_benchmarks()) {
    CAPTURE(p.name, tile_sizes(p));
    const auto tile = oracle::sample_tile(p);
    std::size_t out = 0;
    for (const auto &m : mars_partition(p).mars)
      out += points_in_tile(m.set, p, tile).size();
    // Flow-in here is the reader side: points of the tile reading a value
    // from elsewhere, i.e. the flow-out of the reversed dependences.
    CHECK(out == points_in_tile(flow_in(p).whole, p, tile).size());
    CHECK(out == oracle::reader_points(p, tile).size());
    CHECK(out == points_in_tile(flow_out(p).whole, p, tile).size());
  }
}

TEST_CASE("bounded domain partition matches the oracle tile by tile") {
  auto p = sq();
  p.domain = DomainBox{{0, 0}, {13, 9}};
  const auto r = mars_partition(p);
  for (Int a = 0; a <= 3; ++a)
    for (Int b = 0; b <= 2; ++b) {
      const IntVec tile{a, b};
      CAPTURE(tile);
      ref::Blocks got;
      for (const auto &m : r.mars) {
        auto pts = tile_members(m.set, p, tile);
        if (!pts.empty())
          got[ref::to_sig(m.signature)] = std::move(pts);
      }
      CHECK(got == ref::blocks(p, tile));
    }
}

TEST_CASE("candidate budget") {
  const auto p = benchmarks::jacobi_2d_d().spec;
  CHECK_THROWS_MATCHES(mars_partition(p, {.candidate_budget = 1000}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error &e) {
                         return e.code() == ErrorCode::CandidateExplosion;
                       }));
  // Only the realizable subsets reachable through nonempty intersections are
  // evaluated.
  const auto r = mars_partition(p);
  CHECK(r.candidates_total == (std::size_t{1} << 15) - 1);
  CHECK(r.candidates_evaluated < r.candidates_total);
  for (const auto &o : r.candidate_tiles)
    CHECK(bits(o) >= 1);
}
