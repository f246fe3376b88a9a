#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "srbf/sampling.hpp"

using namespace srbf;

TEST_CASE("grid interiors") {
  const PointSet p1 = sample_interior_grid(1, 0.25);
  REQUIRE(p1.size() == 3);
  CHECK(p1[0][0] == 0.25);
  CHECK(p1[1][0] == 0.5);
  CHECK(p1[2][0] == 0.75);

  const PointSet p2 = sample_interior_grid(2, 0.5);
  REQUIRE(p2.size() == 1);
  CHECK(p2[0][0] == 0.5);
  CHECK(p2[0][1] == 0.5);

  CHECK(sample_interior_grid(2, 0.002).size() == 499u * 499u);
  CHECK(sample_interior_grid(3, 0.1).size() == 729u);
}

TEST_CASE("grid spacing must divide the unit interval") {
  CHECK(cells_for_spacing(0.002) == 500);
  CHECK(cells_for_spacing(1.0 / 512) == 512);
  CHECK_THROWS_AS(cells_for_spacing(0.3), ConfigError);
  CHECK_THROWS_AS(cells_for_spacing(0.0), ConfigError);
  CHECK_THROWS_AS(cells_for_spacing(-0.5), ConfigError);
}

TEST_CASE("random interiors are open-domain and seeded") {
  Rng a = make_rng(9, 100);
  Rng b = make_rng(9, 100);
  const PointSet pa = sample_interior_random(1, 10000, a);
  const PointSet pb = sample_interior_random(1, 10000, b);
  REQUIRE(pa.size() == 10000);
  CHECK(std::equal(pa.coords().begin(), pa.coords().end(), pb.coords().begin()));
  for (double v : pa.coords()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  Rng c = make_rng(10, 100);
  const PointSet pc = sample_interior_random(3, 500, c);
  CHECK(pc.size() == 500);
  for (double v : pc.coords()) CHECK((v > 0.0 && v < 1.0));
}

TEST_CASE("boundary sets") {
  const PointSet b1 = sample_boundary(1, 7);
  REQUIRE(b1.size() == 2);
  CHECK(b1[0][0] == 0.0);
  CHECK(b1[1][0] == 1.0);

  const PointSet b2 = sample_boundary(2, 4);
  CHECK(b2.size() == 16);
  for (std::size_t i = 0; i < b2.size(); ++i) {
    const double x = b2[i][0];
    const double y = b2[i][1];
    CHECK(std::min({x, y, 1.0 - x, 1.0 - y}) == 0.0);
    CHECK((x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0));
  }
  CHECK(sample_boundary(2, 512).size() == 2048);

  const PointSet b3 = sample_boundary(3, 267);
  CHECK(b3.size() == 6u * 17u * 17u);
  for (std::size_t i = 0; i < b3.size(); ++i) {
    const auto p = b3[i];
    CHECK(std::min({p[0], p[1], p[2], 1.0 - p[0], 1.0 - p[1], 1.0 - p[2]}) == 0.0);
  }
}

TEST_CASE("regular grid indexing") {
  const RegularGrid g(2, 4);
  CHECK(g.node_count() == 25);
  CHECK(g.nodes_per_axis() == 5);
  const auto idx = g.unflatten(7);
  CHECK(idx[0] == 1);
  CHECK(idx[1] == 2);
  CHECK(g.flatten(idx) == 7);
  const auto x = g.node(7);
  CHECK(x[0] == 0.25);
  CHECK(x[1] == 0.5);
  CHECK(g.on_boundary(0));
  CHECK(g.on_boundary(4));
  CHECK_FALSE(g.on_boundary(6));
  const PointSet nodes = g.nodes();
  CHECK(nodes.size() == 25);
  CHECK(nodes[24][0] == 1.0);
  CHECK(nodes[24][1] == 1.0);
}
