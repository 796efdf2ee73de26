#include "ucfl/model.hpp"

#include <cmath>

namespace ucfl {

namespace {

using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using WeightView = Eigen::Map<const RowMat>;
using WeightMut = Eigen::Map<RowMat>;

void check_batch(const ModelSpec& spec, const Params& params, const LabeledDataset& batch) {
  spec.validate();
  if (params.size() != spec.param_dim())
    throw dimension_error("model: parameter vector has dim " + std::to_string(params.size()) +
                          ", spec requires " + std::to_string(spec.param_dim()));
  if (batch.size() < 1) throw validation_error("model: empty batch");
  if (batch.dim() != spec.input_dim)
    throw dimension_error("model: batch feature dim " + std::to_string(batch.dim()) +
                          " vs spec input dim " + std::to_string(spec.input_dim));
  if (batch.classes > spec.classes)
    throw dimension_error("model: batch carries more classes than the spec");
}

Mat activate(const Mat& pre, Activation act) {
  if (act == Activation::Relu) return pre.cwiseMax(0.0);
  return pre.array().tanh().matrix();
}

Mat activate_grad(const Mat& pre, Activation act) {
  if (act == Activation::Relu)
    return (pre.array() > 0.0).cast<Scalar>().matrix();
  const Mat t = pre.array().tanh().matrix();
  return (1.0 - t.array().square()).matrix();
}

// Logits for the whole batch, n x C.
Mat logits(const ModelSpec& spec, const Params& params, const Mat& x) {
  const int p = spec.input_dim, C = spec.classes, H = spec.hidden;
  if (spec.kind == ModelKind::SoftmaxLinear) {
    WeightView w(params.data(), C, p);
    const Vec b = params.segment(static_cast<Eigen::Index>(C) * p, C);
    return ((x * w.transpose()).rowwise() + b.transpose());
  }
  WeightView w1(params.data(), H, p);
  const Vec b1 = params.segment(static_cast<Eigen::Index>(H) * p, H);
  WeightView w2(params.data() + H * p + H, C, H);
  const Vec b2 = params.segment(static_cast<Eigen::Index>(H) * p + H + static_cast<Eigen::Index>(C) * H, C);
  const Mat hidden = activate(((x * w1.transpose()).rowwise() + b1.transpose()), spec.activation);
  return ((hidden * w2.transpose()).rowwise() + b2.transpose());
}

// Row-wise softmax with max shift; also returns per-row log-sum-exp.
Mat softmax_rows(const Mat& z, Vec* lse_out = nullptr) {
  Mat p(z.rows(), z.cols());
  if (lse_out) lse_out->resize(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Scalar zmax = z.row(i).maxCoeff();
    const Eigen::ArrayXd shifted = z.row(i).array() - zmax;
    const Eigen::ArrayXd ex = shifted.exp();
    const Scalar denom = ex.sum();
    p.row(i) = (ex / denom).matrix();
    if (lse_out) (*lse_out)[i] = zmax + std::log(denom);
  }
  return p;
}

}  // namespace

Eigen::Index ModelSpec::param_dim() const {
  const auto p = static_cast<Eigen::Index>(input_dim);
  const auto C = static_cast<Eigen::Index>(classes);
  const auto H = static_cast<Eigen::Index>(hidden);
  if (kind == ModelKind::SoftmaxLinear) return p * C + C;
  return p * H + H + H * C + C;
}

void ModelSpec::validate() const {
  if (input_dim < 1) throw validation_error("model spec: input dim must be positive");
  if (classes < 2) throw validation_error("model spec: need at least 2 classes");
  if (kind == ModelKind::Mlp1 && hidden < 1)
    throw validation_error("model spec: MLP hidden width must be positive");
}

Params init_params(const ModelSpec& spec, RngStream rng) {
  spec.validate();
  Params params = Params::Zero(spec.param_dim());
  const int p = spec.input_dim, C = spec.classes, H = spec.hidden;
  const auto fill_layer = [&](Eigen::Index offset, int rows, int cols) {
    const double a = std::sqrt(6.0 / (cols + rows));  // fan_in + fan_out
    WeightMut w(params.data() + offset, rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) w(r, c) = a * (2.0 * rng.next_double() - 1.0);
  };
  if (spec.kind == ModelKind::SoftmaxLinear) {
    fill_layer(0, C, p);
  } else {
    fill_layer(0, H, p);
    fill_layer(static_cast<Eigen::Index>(H) * p + H, C, H);
  }
  return params;
}

Scalar loss(const ModelSpec& spec, const Params& params, const LabeledDataset& batch) {
  check_batch(spec, params, batch);
  const Mat z = logits(spec, params, batch.features);
  Vec lse;
  softmax_rows(z, &lse);
  Scalar total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    total += lse[i] - z(i, batch.labels[static_cast<std::size_t>(i)]);
  const Scalar value = total / static_cast<Scalar>(z.rows());
  if (!std::isfinite(value)) throw numeric_error("loss: non-finite value");
  return value;
}

Params gradient(const ModelSpec& spec, const Params& params, const LabeledDataset& batch) {
  check_batch(spec, params, batch);
  const Mat& x = batch.features;
  const auto n = x.rows();
  const int p = spec.input_dim, C = spec.classes, H = spec.hidden;

  Params grad = Params::Zero(params.size());

  if (spec.kind == ModelKind::SoftmaxLinear) {
    Mat d = softmax_rows(logits(spec, params, x));
    for (Eigen::Index i = 0; i < n; ++i) d(i, batch.labels[static_cast<std::size_t>(i)]) -= 1.0;
    d /= static_cast<Scalar>(n);
    WeightMut gw(grad.data(), C, p);
    gw = d.transpose() * x;
    grad.segment(static_cast<Eigen::Index>(C) * p, C) = d.colwise().sum().transpose();
  } else {
    WeightView w1(params.data(), H, p);
    const Vec b1 = params.segment(static_cast<Eigen::Index>(H) * p, H);
    WeightView w2(params.data() + H * p + H, C, H);
    const Vec b2 = params.segment(static_cast<Eigen::Index>(H) * p + H + static_cast<Eigen::Index>(C) * H, C);

    const Mat pre = ((x * w1.transpose()).rowwise() + b1.transpose());
    const Mat hid = activate(pre, spec.activation);
    const Mat z = ((hid * w2.transpose()).rowwise() + b2.transpose());

    Mat d = softmax_rows(z);
    for (Eigen::Index i = 0; i < n; ++i) d(i, batch.labels[static_cast<std::size_t>(i)]) -= 1.0;
    d /= static_cast<Scalar>(n);

    const Mat dpre = (d * w2).cwiseProduct(activate_grad(pre, spec.activation));

    WeightMut gw1(grad.data(), H, p);
    gw1 = dpre.transpose() * x;
    grad.segment(static_cast<Eigen::Index>(H) * p, H) = dpre.colwise().sum().transpose();
    WeightMut gw2(grad.data() + H * p + H, C, H);
    gw2 = d.transpose() * hid;
    grad.segment(static_cast<Eigen::Index>(H) * p + H + static_cast<Eigen::Index>(C) * H, C) =
        d.colwise().sum().transpose();
  }

  if (!grad.allFinite()) throw numeric_error("gradient: non-finite value");
  return grad;
}

Scalar accuracy(const ModelSpec& spec, const Params& params, const LabeledDataset& data) {
  check_batch(spec, params, data);
  const Mat z = logits(spec, params, data.features);
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < spec.classes; ++c)
      if (z(i, c) > z(i, best)) best = c;  // strict: ties keep the smaller index
    if (best == data.labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<Scalar>(correct) / static_cast<Scalar>(z.rows());
}

}  // namespace ucfl
