#include <doctest.h>

#include "ucfl/numerics.hpp"
#include "ucfl/rng.hpp"

using namespace ucfl;

namespace {

Params make(std::initializer_list<double> vals) {
  Params p(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double v : vals) p[i++] = v;
  return p;
}

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("weighted_combine midpoint") {
  const auto out = weighted_combine(make({0.5, 0.5}), {make({1, 1}), make({3, 3})});
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == doctest::Approx(2.0));
}

TEST_CASE("weighted_combine identity coefficient returns the operand bitwise") {
  const auto in = make({7, -2});
  const auto out = weighted_combine(make({1.0}), {in});
  CHECK(out[0] == 7.0);
  CHECK(out[1] == -2.0);
}

TEST_CASE("weighted_combine matches elementwise arithmetic") {
  // 0.25*[0,4] + 0.75*[4,0] = [3,1]
  const auto out = weighted_combine(make({0.25, 0.75}), {make({0, 4}), make({4, 0})});
  CHECK(out[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("weighted_combine skips exact zeros exactly") {
  const auto theta = make({0.125, -3.5, 42.0});
  const auto out = weighted_combine(make({0.0, 1.0, 0.0}),
                                    {make({9, 9, 9}), theta, make({-1, -1, -1})});
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(out[i] == theta[i]);
}

TEST_CASE("weighted_combine is linear in the coefficients") {
  RngStream rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    Vec coeffs(3);
    std::vector<Params> params;
    for (int j = 0; j < 3; ++j) {
      coeffs[j] = rng.next_normal();
      Params p(5);
      for (int k = 0; k < 5; ++k) p[k] = rng.next_normal();
      params.push_back(p);
    }
    const double alpha = rng.next_normal();
    const auto scaled = weighted_combine((alpha * coeffs).eval(), params);
    const auto ref = alpha * weighted_combine(coeffs, params);
    CHECK((scaled - ref).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("weighted_combine rejects bad input") {
  CHECK_THROWS_AS(weighted_combine(make({0.5}), {make({1, 2}), make({3, 4})}), dimension_error);
  CHECK_THROWS_AS(weighted_combine(make({0.5, 0.5}), {make({1, 2}), make({3})}), dimension_error);
  Vec bad(1);
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(weighted_combine(bad, {make({1})}), validation_error);
}

TEST_CASE("l2_distance_sq basics") {
  CHECK(l2_distance_sq(make({0, 0}), make({3, 4})) == doctest::Approx(25.0));
  const auto x = make({1.5, -2.25, 0.75});
  CHECK(l2_distance_sq(x, x) == 0.0);
  // hand oracle: (1-2)^2 + (2-0)^2 + (3-3)^2 = 5
  CHECK(l2_distance_sq(make({1, 2, 3}), make({2, 0, 3})) == doctest::Approx(5.0));
  CHECK_THROWS_AS(l2_distance_sq(make({1}), make({1, 2})), dimension_error);
}

TEST_CASE("l2_distance_sq is symmetric") {
  RngStream rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    Params a(4), b(4);
    for (int k = 0; k < 4; ++k) {
      a[k] = rng.next_normal();
      b[k] = rng.next_normal();
    }
    CHECK(l2_distance_sq(a, b) == l2_distance_sq(b, a));
    CHECK(l2_distance_sq(a, b) >= 0.0);
  }
}

TEST_CASE("finite differences are exact on quadratics") {
  const auto quad = [](const Params& x) { return 0.5 * x.squaredNorm(); };
  const auto g = finite_diff_gradient(quad, make({1, -2}), 1e-5);
  CHECK(std::abs(g[0] - 1.0) < 1e-8);
  CHECK(std::abs(g[1] + 2.0) < 1e-8);
}

TEST_CASE("finite differences vanish on constants") {
  const auto g = finite_diff_gradient([](const Params&) { return 3.25; }, make({1, 2, 3}), 1e-5);
  CHECK(g.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("finite differences reject bad input") {
  CHECK_THROWS_AS(finite_diff_gradient([](const Params& x) { return x.sum(); }, make({1}), 0.0),
                  validation_error);
  CHECK_THROWS_AS(finite_diff_gradient(
                      [](const Params&) { return std::numeric_limits<double>::infinity(); },
                      make({1}), 1e-5),
                  numeric_error);
}

}  // TEST_SUITE
