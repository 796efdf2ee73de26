#include <doctest.h>

#include <algorithm>
#include <map>

#include "ucfl/client.hpp"
#include "ucfl/datagen.hpp"
#include "ucfl/model.hpp"

using namespace ucfl;

namespace {

// Multiset of (features, label) rows for exhaustiveness checks.
std::multiset<std::pair<std::vector<double>, int>> row_multiset(const LabeledDataset& d) {
  std::multiset<std::pair<std::vector<double>, int>> rows;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    std::vector<double> feat(static_cast<std::size_t>(d.dim()));
    for (Eigen::Index j = 0; j < d.dim(); ++j) feat[static_cast<std::size_t>(j)] = d.features(i, j);
    rows.emplace(std::move(feat), d.labels[static_cast<std::size_t>(i)]);
  }
  return rows;
}

int total_samples(const FederationData& fed) {
  int n = 0;
  for (const auto& c : fed.clients) n += static_cast<int>(c.size());
  return n;
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("blob labels are balanced and deterministic") {
  const auto a = make_gaussian_blobs(4, 2, 401, 0.3, RngStream(1));
  const auto hist = a.label_histogram();
  const int lo = *std::min_element(hist.begin(), hist.end());
  const int hi = *std::max_element(hist.begin(), hist.end());
  CHECK(hi - lo <= 1);

  const auto b = make_gaussian_blobs(4, 2, 401, 0.3, RngStream(1));
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
}

TEST_CASE("separable blobs admit a perfect linear fit") {
  const auto data = make_gaussian_blobs(2, 2, 10, 0.01, RngStream(2));
  ModelSpec spec{ModelKind::SoftmaxLinear, 2, 2};
  LocalTrainConfig train{100, 10, 0.5, 0.0};
  const auto fitted = client_update(spec, init_params(spec, RngStream(3)), data, train, RngStream(4));
  CHECK(accuracy(spec, fitted, data) == 1.0);
}

TEST_CASE("blob validation") {
  CHECK_THROWS_AS(make_gaussian_blobs(1, 2, 10, 0.1, RngStream(0)), validation_error);
  CHECK_THROWS_AS(make_gaussian_blobs(2, 1, 10, 0.1, RngStream(0)), validation_error);
  CHECK_THROWS_AS(make_gaussian_blobs(4, 2, 3, 0.1, RngStream(0)), validation_error);
  CHECK_THROWS_AS(make_gaussian_blobs(2, 2, 10, 0.0, RngStream(0)), validation_error);
}

TEST_CASE("dirichlet partition with huge alpha is nearly uniform per class") {
  const auto data = make_gaussian_blobs(4, 2, 400, 0.3, RngStream(5));
  const auto fed = dirichlet_label_partition(data, 4, 1e6, RngStream(6));
  CHECK(fed.scenario == Scenario::LabelShift);
  for (const auto& client : fed.clients) {
    const auto hist = client.label_histogram();
    for (int c = 0; c < 4; ++c) CHECK(std::abs(hist[static_cast<std::size_t>(c)] - 25) <= 2);
  }
}

TEST_CASE("dirichlet partition is exhaustive and disjoint") {
  const auto data = make_gaussian_blobs(5, 3, 333, 0.4, RngStream(7));
  const auto fed = dirichlet_label_partition(data, 20, 0.4, RngStream(8));
  CHECK(total_samples(fed) == 333);
  for (const auto& c : fed.clients) CHECK(c.size() >= 1);

  auto expect = row_multiset(data);
  std::multiset<std::pair<std::vector<double>, int>> got;
  for (const auto& c : fed.clients) {
    auto rows = row_multiset(c);
    got.insert(rows.begin(), rows.end());
  }
  CHECK(expect == got);
}

TEST_CASE("single-client partition is the identity") {
  const auto data = make_gaussian_blobs(3, 2, 60, 0.2, RngStream(9));
  const auto fed = dirichlet_label_partition(data, 1, 0.4, RngStream(10));
  REQUIRE(fed.clients.size() == 1);
  CHECK(fed.clients[0].features == data.features);
  CHECK(fed.clients[0].labels == data.labels);
}

TEST_CASE("uniform split balances client sizes") {
  const auto data = make_gaussian_blobs(4, 2, 103, 0.2, RngStream(11));
  const auto fed = split_uniform(data, 10, RngStream(12));
  CHECK(total_samples(fed) == 103);
  for (const auto& c : fed.clients) CHECK((c.size() == 10 || c.size() == 11));
}

TEST_CASE("zero rotation leaves features bitwise unchanged") {
  const auto data = make_gaussian_blobs(4, 2, 80, 0.2, RngStream(13));
  auto fed = split_uniform(data, 8, RngStream(14));
  const auto before = fed.clients[3].features;
  fed = rotate_covariates(std::move(fed), 4, {0.0, 0.0, 0.0, 0.0});
  CHECK(fed.clients[3].features == before);
  CHECK(fed.scenario == Scenario::LabelCovariateShift);
}

TEST_CASE("planar half-turn negates every point") {
  const auto data = make_gaussian_blobs(2, 2, 40, 0.2, RngStream(15));
  auto fed = split_uniform(data, 4, RngStream(16));
  const auto before = fed.clients[0].features;
  fed = rotate_covariates(std::move(fed), 1, {180.0});
  CHECK((fed.clients[0].features + before).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("rotation preserves sample counts and labels") {
  const auto data = make_gaussian_blobs(4, 2, 120, 0.2, RngStream(17));
  auto fed = split_uniform(data, 12, RngStream(18));
  const auto labels_before = fed.clients[5].labels;
  const auto sizes_before = [&] {
    std::vector<Eigen::Index> s;
    for (const auto& c : fed.clients) s.push_back(c.size());
    return s;
  }();
  fed = rotate_covariates(std::move(fed), 4, {0.0, 90.0, 180.0, 270.0});
  CHECK(fed.clients[5].labels == labels_before);
  for (std::size_t i = 0; i < fed.clients.size(); ++i)
    CHECK(fed.clients[i].size() == sizes_before[i]);
  CHECK(fed.group_of == contiguous_groups(12, 4));
}

TEST_CASE("grid rotation needs right angles") {
  LabeledDataset grid;
  grid.classes = 2;
  grid.features.resize(4, 4);  // 2x2 grids
  grid.features << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16;
  grid.labels = {0, 1, 0, 1};
  FederationData fed;
  fed.clients = {grid};
  fed.group_of = {0};

  CHECK_THROWS_AS(rotate_covariates(fed, 1, {45.0}), validation_error);

  const auto turned = rotate_covariates(fed, 1, {90.0});
  // counterclockwise quarter turn of [[1,2],[3,4]] is [[2,4],[1,3]]
  CHECK(turned.clients[0].features(0, 0) == 2);
  CHECK(turned.clients[0].features(0, 1) == 4);
  CHECK(turned.clients[0].features(0, 2) == 1);
  CHECK(turned.clients[0].features(0, 3) == 3);

  // four quarter turns are the identity
  auto full = rotate_covariates(fed, 1, {360.0});
  CHECK(full.clients[0].features == fed.clients[0].features);
}

TEST_CASE("label permutation: identity group, histogram preservation") {
  const auto data = make_gaussian_blobs(10, 2, 400, 0.3, RngStream(19));
  auto fed = split_uniform(data, 20, RngStream(20));
  const auto group0_labels = fed.clients[0].labels;
  const auto hist_before = fed.clients[17].label_histogram();

  auto shifted = permute_labels(fed, 4, RngStream(21));
  CHECK(shifted.scenario == Scenario::ConceptShift);
  CHECK(shifted.clients[0].labels == group0_labels);  // group 0 keeps identity

  // multiset of histogram counts is invariant under a permutation
  auto hist_after = shifted.clients[17].label_histogram();
  auto a = hist_before, b = hist_after;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);

  // single group: nothing changes anywhere
  auto same = permute_labels(fed, 1, RngStream(22));
  for (std::size_t i = 0; i < fed.clients.size(); ++i)
    CHECK(same.clients[i].labels == fed.clients[i].labels);
}

TEST_CASE("same group maps the same original label identically") {
  const auto data = make_gaussian_blobs(6, 2, 240, 0.3, RngStream(23));
  auto fed = split_uniform(data, 8, RngStream(24));
  auto shifted = permute_labels(fed, 4, RngStream(25));
  // clients 2 and 3 share group 1 under contiguous grouping of 8 into 4
  REQUIRE(shifted.group_of[2] == shifted.group_of[3]);
  std::map<int, int> seen;
  for (std::size_t i = 0; i < fed.clients[2].labels.size(); ++i)
    seen[fed.clients[2].labels[i]] = shifted.clients[2].labels[i];
  for (std::size_t i = 0; i < fed.clients[3].labels.size(); ++i) {
    const int orig = fed.clients[3].labels[i];
    if (seen.count(orig)) CHECK(shifted.clients[3].labels[i] == seen[orig]);
  }
}

TEST_CASE("holdout split is disjoint and exhaustive") {
  const auto data = make_gaussian_blobs(4, 2, 50, 0.3, RngStream(26));
  const auto split = split_holdout(data, 0.2, RngStream(27));
  CHECK(split.train.size() == 40);
  CHECK(split.holdout.size() == 10);
  auto expect = row_multiset(data);
  auto got = row_multiset(split.train);
  auto hold = row_multiset(split.holdout);
  got.insert(hold.begin(), hold.end());
  CHECK(expect == got);
}

}  // TEST_SUITE
