#include "multiop/unrolled.hpp"

#include "multiop/errors.hpp"

namespace multiop {

UnrolledNet::UnrolledNet(int steps, std::vector<int> denoiser_sizes, bool residual,
                         double eta_init) {
  if (steps < 1) throw std::invalid_argument("UnrolledNet: need at least one step");
  if (denoiser_sizes.size() < 2)
    throw std::invalid_argument("UnrolledNet: need at least input and output sizes");
  if (denoiser_sizes.front() != denoiser_sizes.back())
    throw DimensionMismatch("UnrolledNet: denoisers must map R^n to R^n");
  denoisers_.reserve(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) denoisers_.emplace_back(denoiser_sizes, residual);
  eta_ = Vector::Constant(steps, eta_init);
}

UnrolledNet UnrolledNet::random(int steps, std::vector<int> denoiser_sizes,
                                bool residual, Rng& rng, double eta_init,
                                bool zero_last_layer) {
  UnrolledNet net(steps, denoiser_sizes, residual, eta_init);
  for (int t = 0; t < steps; ++t)
    net.denoisers_[static_cast<std::size_t>(t)] =
        Mlp::random(denoiser_sizes, residual, rng, zero_last_layer);
  return net;
}

Matrix UnrolledNet::forward(const Matrix& y, const LinearOperator& a) const {
  Trace trace;
  return forward(y, a, trace);
}

Vector UnrolledNet::forward(const Vector& y, const LinearOperator& a) const {
  return Vector(forward(Matrix(y), a));
}

Matrix UnrolledNet::forward(const Matrix& y, const LinearOperator& a,
                            Trace& trace) const {
  if (a.cols() != signal_size())
    throw DimensionMismatch("UnrolledNet::forward: operator domain mismatch");
  trace.data_gradients.clear();
  trace.denoiser_traces.assign(denoisers_.size(), {});
  Matrix x = a.pinv_apply(y);
  for (std::size_t t = 0; t < denoisers_.size(); ++t) {
    Matrix s = a.adjoint(Matrix(a.apply(x) - y));
    trace.data_gradients.push_back(s);
    x = denoisers_[t].forward(Matrix(x - eta_(static_cast<Eigen::Index>(t)) * s),
                              trace.denoiser_traces[t]);
  }
  return x;
}

void UnrolledNet::Gradients::set_zero() {
  for (MlpGradients& g : denoisers) g.set_zero();
  eta.setZero();
}

UnrolledNet::Gradients UnrolledNet::zero_gradients() const {
  Gradients g;
  for (const Mlp& d : denoisers_) g.denoisers.push_back(d.zero_gradients());
  g.eta = Vector::Zero(steps());
  return g;
}

void UnrolledNet::backward(const Trace& trace, const LinearOperator& a,
                           const Matrix& upstream, Gradients& grads) const {
  if (grads.denoisers.size() != denoisers_.size() || grads.eta.size() != steps())
    throw DimensionMismatch("UnrolledNet::backward: gradient container mismatch");
  Matrix g = upstream;
  for (std::size_t t = denoisers_.size(); t-- > 0;) {
    // Through the denoiser down to its input r_t = x_t - eta_t s_t.
    Matrix g_r = denoisers_[t].backward(trace.denoiser_traces[t], g, grads.denoisers[t]);
    grads.eta(static_cast<Eigen::Index>(t)) -=
        (g_r.array() * trace.data_gradients[t].array()).sum();
    // dr/dx_t = I - eta_t A^T A.
    g = g_r - eta_(static_cast<Eigen::Index>(t)) * a.adjoint(a.apply(g_r));
  }
}

Eigen::Index UnrolledNet::parameter_count() const {
  Eigen::Index total = eta_.size();
  for (const Mlp& d : denoisers_) total += d.parameter_count();
  return total;
}

Vector pack_parameters(const UnrolledNet& net) {
  Vector flat(net.parameter_count());
  Eigen::Index at = 0;
  for (int t = 0; t < net.steps(); ++t) {
    Vector part = pack_parameters(net.denoiser(t));
    flat.segment(at, part.size()) = part;
    at += part.size();
  }
  flat.segment(at, net.steps()) = net.step_sizes();
  return flat;
}

void unpack_parameters(UnrolledNet& net, const Vector& flat) {
  if (flat.size() != net.parameter_count())
    throw DimensionMismatch("unpack_parameters: flat size mismatch");
  Eigen::Index at = 0;
  for (int t = 0; t < net.steps(); ++t) {
    Mlp& d = net.denoiser(t);
    unpack_parameters(d, Vector(flat.segment(at, d.parameter_count())));
    at += d.parameter_count();
  }
  net.step_sizes() = flat.segment(at, net.steps());
}

Vector pack_gradients(const UnrolledNet& net, const UnrolledNet::Gradients& grads) {
  Vector flat(net.parameter_count());
  Eigen::Index at = 0;
  for (int t = 0; t < net.steps(); ++t) {
    Vector part = pack_gradients(net.denoiser(t), grads.denoisers[static_cast<std::size_t>(t)]);
    flat.segment(at, part.size()) = part;
    at += part.size();
  }
  flat.segment(at, net.steps()) = grads.eta;
  return flat;
}

} // namespace multiop
