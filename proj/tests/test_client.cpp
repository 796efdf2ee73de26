#include <doctest.h>

#include "ucfl/client.hpp"
#include "ucfl/datagen.hpp"

using namespace ucfl;

namespace {

const ModelSpec kSpec{ModelKind::SoftmaxLinear, 2, 4};

LabeledDataset blobs(int n, double spread, std::uint64_t seed) {
  return make_gaussian_blobs(4, 2, n, spread, RngStream(seed));
}

}  // namespace

TEST_SUITE("client") {

TEST_CASE("vanishing learning rate keeps the start point") {
  const auto data = blobs(40, 0.4, 1);
  const auto start = init_params(kSpec, RngStream(2));
  LocalTrainConfig cfg{3, 8, 1e-12, 0.9};
  const auto end = client_update(kSpec, start, data, cfg, RngStream(3));
  CHECK((end - start).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("one full-batch epoch without momentum is one gradient step") {
  const auto data = blobs(32, 0.4, 4);
  const auto start = init_params(kSpec, RngStream(5));
  LocalTrainConfig cfg{1, 32, 0.25, 0.0};
  const auto end = client_update(kSpec, start, data, cfg, RngStream(6));
  const Params expected = start - 0.25 * full_gradient(kSpec, start, data);
  CHECK(end == expected);  // bitwise: the sorted full batch is the dataset itself
}

TEST_CASE("training lowers the loss on separable data") {
  const auto data = blobs(60, 0.15, 7);
  const auto start = init_params(kSpec, RngStream(8));
  LocalTrainConfig cfg{5, 10, 0.1, 0.9};
  const auto end = client_update(kSpec, start, data, cfg, RngStream(9));
  CHECK(loss(kSpec, end, data) < loss(kSpec, start, data));
}

TEST_CASE("client_update is deterministic and leaves the start untouched") {
  const auto data = blobs(30, 0.4, 10);
  const auto start = init_params(kSpec, RngStream(11));
  const Params start_copy = start;
  LocalTrainConfig cfg{2, 7, 0.1, 0.9};
  const auto a = client_update(kSpec, start, data, cfg, RngStream(12));
  const auto b = client_update(kSpec, start, data, cfg, RngStream(12));
  CHECK(a == b);
  CHECK(start == start_copy);
}

TEST_CASE("divergence raises a numeric error naming the epoch") {
  const auto data = blobs(20, 0.4, 13);
  const auto start = init_params(kSpec, RngStream(14));
  LocalTrainConfig cfg{50, 4, 1e12, 0.99};
  CHECK_THROWS_AS(client_update(kSpec, start, data, cfg, RngStream(15)), numeric_error);
}

TEST_CASE("full_gradient equals gradient over the whole set and averages over halves") {
  const auto data = blobs(40, 0.4, 16);
  const auto theta = init_params(kSpec, RngStream(17));
  CHECK(full_gradient(kSpec, theta, data) == gradient(kSpec, theta, data));

  // concatenation of equal halves -> mean of the two half gradients
  std::vector<int> lo, hi;
  for (int i = 0; i < 20; ++i) lo.push_back(i);
  for (int i = 20; i < 40; ++i) hi.push_back(i);
  const Params mean_of_halves = 0.5 * (full_gradient(kSpec, theta, data.select(lo)) +
                                       full_gradient(kSpec, theta, data.select(hi)));
  CHECK((full_gradient(kSpec, theta, data) - mean_of_halves).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("identical clients report identical gradients") {
  const auto data = blobs(25, 0.4, 18);
  const auto theta = init_params(kSpec, RngStream(19));
  CHECK(full_gradient(kSpec, theta, data) == full_gradient(kSpec, theta, data));
}

TEST_CASE("variance of a constant dataset is zero") {
  LabeledDataset one;
  one.classes = 4;
  one.features.resize(1, 2);
  one.features << 0.3, -0.7;
  one.labels = {2};
  std::vector<int> idx(12, 0);
  const auto repeated = one.select(idx);
  const auto theta = init_params(kSpec, RngStream(20));
  CHECK(gradient_variance(kSpec, theta, repeated, 3, RngStream(21)) == 0.0);
}

TEST_CASE("variance with a single full batch is zero") {
  const auto data = blobs(30, 0.4, 22);
  const auto theta = init_params(kSpec, RngStream(23));
  CHECK(gradient_variance(kSpec, theta, data, 30, RngStream(24)) == 0.0);
}

TEST_CASE("smaller variance batches give larger estimates") {
  const auto data = blobs(200, 0.5, 25);
  const auto theta = init_params(kSpec, RngStream(26));
  double small = 0.0, large = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    small += gradient_variance(kSpec, theta, data, 10, RngStream(27).fork(s));
    large += gradient_variance(kSpec, theta, data, 100, RngStream(27).fork(s));
  }
  CHECK(small / 20 > large / 20);
}

TEST_CASE("variance estimate is reproducible and rejects oversized batches") {
  const auto data = blobs(50, 0.4, 28);
  const auto theta = init_params(kSpec, RngStream(29));
  CHECK(gradient_variance(kSpec, theta, data, 7, RngStream(30)) ==
        gradient_variance(kSpec, theta, data, 7, RngStream(30)));
  CHECK(gradient_variance(kSpec, theta, data, 7, RngStream(30)) >= 0.0);
  CHECK_THROWS_AS(gradient_variance(kSpec, theta, data, 51, RngStream(30)), validation_error);
  CHECK_THROWS_AS(gradient_variance(kSpec, theta, data, 0, RngStream(30)), validation_error);
}

}  // TEST_SUITE
