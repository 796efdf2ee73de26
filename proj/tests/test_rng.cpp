#include <doctest.h>

#include <cmath>

#include "ucfl/rng.hpp"

using namespace ucfl;

TEST_SUITE("rng") {

TEST_CASE("same seed and fork path reproduce the identical sequence") {
  RngStream a = RngStream(42).fork(7).fork(3);
  RngStream b = RngStream(42).fork(7).fork(3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("forks are independent of parent consumption") {
  RngStream parent(42);
  RngStream before = parent.fork(1);
  parent.next_u64();
  parent.next_u64();
  RngStream after = parent.fork(1);
  CHECK(before.next_u64() == after.next_u64());
}

TEST_CASE("different tags give different streams") {
  RngStream root(42);
  CHECK(root.fork(1).next_u64() != root.fork(2).next_u64());
  CHECK(RngStream(1).next_u64() != RngStream(2).next_u64());
}

TEST_CASE("uniform doubles live in [0, 1) with a sane mean") {
  RngStream rng(7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("next_below respects the bound") {
  RngStream rng(9);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 10000; ++i) ++counts[static_cast<std::size_t>(rng.next_below(5))];
  for (int c : counts) CHECK(c > 1700);  // roughly uniform
}

TEST_CASE("normals have the right first two moments") {
  RngStream rng(13);
  double sum = 0.0, sq = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sq += z * z;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(1).scale(0.02));
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("gamma draws match the target mean and stay positive") {
  RngStream rng(17);
  for (double shape : {0.4, 1.0, 3.5}) {
    double sum = 0.0;
    const int n = 30000;
    for (int i = 0; i < n; ++i) {
      const double g = rng.next_gamma(shape);
      REQUIRE(g > 0.0);
      sum += g;
    }
    CHECK(sum / n == doctest::Approx(shape).epsilon(0.05));
  }
}

TEST_CASE("dirichlet draws normalize") {
  RngStream rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = rng.next_dirichlet(0.4, 6);
    double sum = 0.0;
    for (double v : p) {
      REQUIRE(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("shuffle is a permutation and deterministic") {
  RngStream a(3), b(3);
  std::vector<int> va{0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<int> vb = va;
  a.shuffle(va);
  b.shuffle(vb);
  CHECK(va == vb);
  std::vector<int> sorted = va;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

}  // TEST_SUITE
