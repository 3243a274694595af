#include "multiop/mlp.hpp"

#include <cmath>

#include "multiop/errors.hpp"

namespace multiop {

void MlpGradients::set_zero() {
  for (Matrix& w : weights) w.setZero();
  for (Vector& b : biases) b.setZero();
}

Mlp::Mlp(std::vector<int> layer_sizes, bool residual)
    : sizes_(std::move(layer_sizes)), residual_(residual) {
  if (sizes_.size() < 2)
    throw std::invalid_argument("Mlp: need at least input and output sizes");
  for (int s : sizes_)
    if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
  if (residual_ && sizes_.front() != sizes_.back())
    throw DimensionMismatch("Mlp: residual connection needs input size == output size");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weights_.emplace_back(Matrix::Zero(sizes_[l + 1], sizes_[l]));
    biases_.emplace_back(Vector::Zero(sizes_[l + 1]));
  }
}

Mlp Mlp::random(std::vector<int> layer_sizes, bool residual, Rng& rng,
                bool zero_last_layer) {
  Mlp net(std::move(layer_sizes), residual);
  const int last = net.layer_count() - 1;
  for (int l = 0; l <= last; ++l) {
    if (zero_last_layer && l == last) break;
    Matrix& w = net.weight(l);
    const double scale = std::sqrt(2.0 / static_cast<double>(w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = scale * rng.normal();
  }
  return net;
}

Vector Mlp::forward(const Vector& v) const {
  return Vector(forward(Matrix(v)));
}

Matrix Mlp::forward(const Matrix& v) const {
  Trace trace;
  return forward(v, trace);
}

Matrix Mlp::forward(const Matrix& v, Trace& trace) const {
  if (v.rows() != input_size())
    throw DimensionMismatch("Mlp::forward: input size mismatch");
  trace.input = v;
  trace.pre_activations.clear();
  trace.pre_activations.reserve(weights_.size());
  Matrix h = v;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix a = (weights_[l] * h).colwise() + biases_[l];
    trace.pre_activations.push_back(a);
    if (l + 1 < weights_.size())
      h = a.cwiseMax(0.0);
    else
      h = std::move(a);
  }
  if (residual_) h += v;
  return h;
}

Matrix Mlp::backward(const Trace& trace, const Matrix& upstream,
                     MlpGradients& grads) const {
  const auto layers = weights_.size();
  if (grads.weights.size() != layers || grads.biases.size() != layers)
    throw DimensionMismatch("Mlp::backward: gradient container shape mismatch");
  if (upstream.rows() != output_size() || upstream.cols() != trace.input.cols())
    throw DimensionMismatch("Mlp::backward: upstream shape mismatch");

  Matrix g = upstream;
  for (std::size_t l = layers; l-- > 0;) {
    // Activation of the previous layer feeding layer l.
    if (l == 0) {
      grads.weights[0] += g * trace.input.transpose();
    } else {
      grads.weights[l] +=
          g * trace.pre_activations[l - 1].cwiseMax(0.0).transpose();
    }
    grads.biases[l] += g.rowwise().sum();
    if (l > 0) {
      g = weights_[l].transpose() * g;
      // Rectifier gate; subgradient at 0 is 0, so strict inequality.
      g.array() *= (trace.pre_activations[l - 1].array() > 0.0).cast<double>();
    } else {
      g = weights_[0].transpose() * g;
    }
  }
  if (residual_) g += upstream;
  return g;
}

std::pair<MlpGradients, Vector> Mlp::backward(const Vector& v,
                                              const Vector& upstream) const {
  Trace trace;
  forward(Matrix(v), trace);
  MlpGradients grads = zero_gradients();
  Matrix in_grad = backward(trace, Matrix(upstream), grads);
  return {std::move(grads), Vector(in_grad)};
}

MlpGradients Mlp::zero_gradients() const {
  MlpGradients g;
  for (const Matrix& w : weights_) g.weights.emplace_back(Matrix::Zero(w.rows(), w.cols()));
  for (const Vector& b : biases_) g.biases.emplace_back(Vector::Zero(b.size()));
  return g;
}

Eigen::Index Mlp::parameter_count() const {
  Eigen::Index total = 0;
  for (const Matrix& w : weights_) total += w.size();
  for (const Vector& b : biases_) total += b.size();
  return total;
}

Vector reconstruct(const Mlp& net, const Vector& y, const LinearOperator& a) {
  return net.forward(a.pinv_apply(y));
}

Matrix reconstruct(const Mlp& net, const Matrix& y, const LinearOperator& a) {
  return net.forward(a.pinv_apply(y));
}

Vector pack_parameters(const Mlp& net) {
  Vector flat(net.parameter_count());
  Eigen::Index at = 0;
  for (int l = 0; l < net.layer_count(); ++l) {
    const Matrix& w = net.weight(l);
    flat.segment(at, w.size()) = Eigen::Map<const Vector>(w.data(), w.size());
    at += w.size();
    const Vector& b = net.bias(l);
    flat.segment(at, b.size()) = b;
    at += b.size();
  }
  return flat;
}

void unpack_parameters(Mlp& net, const Vector& flat) {
  if (flat.size() != net.parameter_count())
    throw DimensionMismatch("unpack_parameters: flat size mismatch");
  Eigen::Index at = 0;
  for (int l = 0; l < net.layer_count(); ++l) {
    Matrix& w = net.weight(l);
    Eigen::Map<Vector>(w.data(), w.size()) = flat.segment(at, w.size());
    at += w.size();
    Vector& b = net.bias(l);
    b = flat.segment(at, b.size());
    at += b.size();
  }
}

Vector pack_gradients(const Mlp& net, const MlpGradients& grads) {
  Vector flat(net.parameter_count());
  Eigen::Index at = 0;
  for (int l = 0; l < net.layer_count(); ++l) {
    const Matrix& w = grads.weights[static_cast<std::size_t>(l)];
    flat.segment(at, w.size()) = Eigen::Map<const Vector>(w.data(), w.size());
    at += w.size();
    const Vector& b = grads.biases[static_cast<std::size_t>(l)];
    flat.segment(at, b.size()) = b;
    at += b.size();
  }
  return flat;
}

} // namespace multiop
