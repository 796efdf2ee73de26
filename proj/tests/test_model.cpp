#include <doctest.h>

#include <cmath>

#include "ucfl/datagen.hpp"
#include "ucfl/model.hpp"
#include "ucfl/numerics.hpp"

using namespace ucfl;

namespace {

LabeledDataset random_batch(const ModelSpec& spec, int n, RngStream& rng) {
  LabeledDataset batch;
  batch.classes = spec.classes;
  batch.features.resize(n, spec.input_dim);
  batch.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < spec.input_dim; ++j) batch.features(i, j) = rng.next_normal();
    batch.labels[static_cast<std::size_t>(i)] =
        static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spec.classes)));
  }
  return batch;
}

Params random_params(const ModelSpec& spec, RngStream& rng) {
  Params p(spec.param_dim());
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = 0.5 * rng.next_normal();
  return p;
}

// Worst mixed absolute/relative coordinate error against central differences.
double gradcheck(const ModelSpec& spec, const Params& params, const LabeledDataset& batch) {
  const Params analytic = gradient(spec, params, batch);
  const Params numeric = finite_diff_gradient(
      [&](const Params& x) { return loss(spec, x, batch); }, params, 1e-5);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double scale = std::max({std::abs(numeric[i]), std::abs(analytic[i]), 1e-3});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
  }
  return worst;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("parameter dimensions follow the spec formulas") {
  CHECK(ModelSpec{ModelKind::SoftmaxLinear, 2, 2}.param_dim() == 6);
  CHECK(ModelSpec{ModelKind::Mlp1, 4, 3, 8}.param_dim() == 67);
}

TEST_CASE("init is deterministic with zero biases") {
  const ModelSpec spec{ModelKind::Mlp1, 4, 3, 8};
  const auto a = init_params(spec, RngStream(5));
  const auto b = init_params(spec, RngStream(5));
  CHECK(a == b);
  // bias block of layer 1 sits right after the 4*8 weights
  for (int i = 0; i < 8; ++i) CHECK(a[32 + i] == 0.0);
  const double bound = std::sqrt(6.0 / (4 + 8));
  for (int i = 0; i < 32; ++i) CHECK(std::abs(a[i]) <= bound);
}

TEST_CASE("zero parameters give the uniform-softmax loss") {
  RngStream rng(7);
  const ModelSpec two{ModelKind::SoftmaxLinear, 3, 2};
  auto batch2 = random_batch(two, 17, rng);
  CHECK(loss(two, Params::Zero(two.param_dim()), batch2) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const ModelSpec ten{ModelKind::SoftmaxLinear, 3, 10};
  auto batch10 = random_batch(ten, 17, rng);
  CHECK(loss(ten, Params::Zero(ten.param_dim()), batch10) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("gradients match finite differences across kinds and activations") {
  const std::vector<ModelSpec> specs = {
      {ModelKind::SoftmaxLinear, 3, 4},
      {ModelKind::Mlp1, 3, 4, 6, Activation::Tanh},
  };
  RngStream rng(11);
  for (const auto& spec : specs) {
    for (int rep = 0; rep < 25; ++rep) {
      auto batch = random_batch(spec, 9, rng);
      const auto params = random_params(spec, rng);
      CHECK(gradcheck(spec, params, batch) < 1e-5);
    }
  }
}

TEST_CASE("relu gradients check away from the kink") {
  const ModelSpec spec{ModelKind::Mlp1, 3, 3, 5, Activation::Relu};
  RngStream rng(13);
  int checked = 0;
  while (checked < 10) {
    auto batch = random_batch(spec, 6, rng);
    const auto params = random_params(spec, rng);
    // Skip draws with a pre-activation close enough to 0 to corrupt the
    // central difference.
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w1(
        params.data(), 5, 3);
    const Vec b1 = params.segment(15, 5);
    const Mat pre = (batch.features * w1.transpose()).rowwise() + b1.transpose();
    if (pre.array().abs().minCoeff() < 1e-3) continue;
    CHECK(gradcheck(spec, params, batch) < 1e-5);
    ++checked;
  }
}

TEST_CASE("loss and gradient ignore sample order; duplication keeps the mean") {
  const ModelSpec spec{ModelKind::SoftmaxLinear, 2, 3};
  RngStream rng(17);
  auto batch = random_batch(spec, 8, rng);
  const auto params = random_params(spec, rng);

  std::vector<int> perm = {5, 2, 7, 0, 3, 6, 1, 4};
  const auto shuffled = batch.select(perm);
  CHECK(loss(spec, params, shuffled) == doctest::Approx(loss(spec, params, batch)).epsilon(1e-15));
  CHECK((gradient(spec, params, shuffled) - gradient(spec, params, batch))
            .lpNorm<Eigen::Infinity>() < 1e-14);

  std::vector<int> doubled;
  for (int i = 0; i < 8; ++i) {
    doubled.push_back(i);
    doubled.push_back(i);
  }
  const auto twice = batch.select(doubled);
  CHECK((gradient(spec, params, twice) - gradient(spec, params, batch)).lpNorm<Eigen::Infinity>() <
        1e-14);
}

TEST_CASE("symmetric two-class batch has zero bias gradient at zero params") {
  const ModelSpec spec{ModelKind::SoftmaxLinear, 2, 2};
  LabeledDataset batch;
  batch.classes = 2;
  batch.features.resize(4, 2);
  batch.features << 1, 0, -1, 0, 0, 2, 0, -2;
  batch.labels = {0, 0, 1, 1};
  const auto g = gradient(spec, Params::Zero(spec.param_dim()), batch);
  CHECK(std::abs(g[4]) < 1e-15);
  CHECK(std::abs(g[5]) < 1e-15);
}

TEST_CASE("argmax ties break toward the smallest class") {
  const ModelSpec spec{ModelKind::SoftmaxLinear, 2, 2};
  LabeledDataset batch;
  batch.classes = 2;
  batch.features.resize(4, 2);
  batch.features << 1, 1, 2, 2, 3, 3, 4, 4;
  batch.labels = {0, 1, 0, 1};
  CHECK(accuracy(spec, Params::Zero(spec.param_dim()), batch) == 0.5);
}

TEST_CASE("a separating hyperplane scores perfectly") {
  const auto data = make_gaussian_blobs(2, 2, 50, 0.05, RngStream(19));
  const ModelSpec spec{ModelKind::SoftmaxLinear, 2, 2};
  // centers are at angle 0 and pi on the unit circle; x-coordinate separates
  Params params = Params::Zero(spec.param_dim());
  params[0] = 10.0;   // class 0 weight on x
  params[2] = -10.0;  // class 1 weight on x
  CHECK(accuracy(spec, params, data) == 1.0);
}

TEST_CASE("random labels score near chance") {
  const ModelSpec spec{ModelKind::SoftmaxLinear, 2, 10};
  RngStream rng(23);
  auto batch = random_batch(spec, 10000, rng);
  const auto params = random_params(spec, rng);
  const double acc = accuracy(spec, params, batch);
  CHECK(acc > 0.08);
  CHECK(acc < 0.12);
}

TEST_CASE("constant logit shift keeps every prediction") {
  const ModelSpec spec{ModelKind::SoftmaxLinear, 3, 4};
  RngStream rng(29);
  auto data = random_batch(spec, 40, rng);
  Params params = random_params(spec, rng);
  const double base = accuracy(spec, params, data);
  Params shifted = params;
  for (int c = 0; c < 4; ++c) shifted[3 * 4 + c] += 2.5;  // all biases up together
  CHECK(accuracy(spec, shifted, data) == base);
}

TEST_CASE("dimension mismatches throw") {
  const ModelSpec spec{ModelKind::SoftmaxLinear, 3, 4};
  RngStream rng(31);
  auto batch = random_batch(spec, 5, rng);
  CHECK_THROWS_AS(loss(spec, Params::Zero(3), batch), dimension_error);
  LabeledDataset empty;
  empty.classes = 4;
  empty.features.resize(0, 3);
  CHECK_THROWS_AS(loss(spec, Params::Zero(spec.param_dim()), empty), validation_error);
}

}  // TEST_SUITE
