#include "multiop/losses.hpp"

#include "multiop/errors.hpp"

namespace multiop {

LossResult loss_supervised(const Mlp& net, const Matrix& y, const LinearOperator& a,
                           const Matrix& x) {
  if (y.cols() != x.cols())
    throw DimensionMismatch("loss_supervised: batch size mismatch");
  const double batch = static_cast<double>(y.cols());

  Mlp::Trace trace;
  Matrix x_hat = net.forward(a.pinv_apply(y), trace);
  Matrix diff = x_hat - x;

  LossResult out;
  out.value = diff.squaredNorm() / batch;
  out.gradients = net.zero_gradients();
  net.backward(trace, Matrix((2.0 / batch) * diff), out.gradients);
  return out;
}

LossResult loss_moi(const Mlp& net, const Matrix& y, const LinearOperator& a_g,
                    const LinearOperator& a_s, double cross_weight) {
  const double batch = static_cast<double>(y.cols());

  // First pass: x_hat = net(A_g^+ y).
  Mlp::Trace trace_g;
  Matrix x_hat = net.forward(a_g.pinv_apply(y), trace_g);
  Matrix meas_residual = y - a_g.apply(x_hat);

  // Second pass: re-measure x_hat with A_s and reconstruct again.
  Mlp::Trace trace_s;
  Matrix x_cross = net.forward(a_s.pinv_apply(a_s.apply(x_hat)), trace_s);
  Matrix cross_diff = x_hat - x_cross;

  LossResult out;
  out.value = (meas_residual.squaredNorm() +
               cross_weight * cross_diff.squaredNorm()) /
              batch;
  out.gradients = net.zero_gradients();

  // d loss / d x_cross, through the second network evaluation; its input
  // gradient then flows back into x_hat via A_s^+ A_s.
  Matrix up_cross = (-2.0 * cross_weight / batch) * cross_diff;
  Matrix into_second_input = net.backward(trace_s, up_cross, out.gradients);

  Matrix up_hat = (2.0 * cross_weight / batch) * cross_diff;
  up_hat.noalias() -= (2.0 / batch) * a_g.adjoint(meas_residual);
  up_hat.noalias() += a_s.adjoint(a_s.pinv_adjoint(into_second_input));
  net.backward(trace_g, up_hat, out.gradients);
  return out;
}

LossResult loss_splitting(const Mlp& net, const Matrix& y, const LinearOperator& a,
                          double split_fraction, Rng& rng) {
  if (y.rows() != a.rows())
    throw DimensionMismatch("loss_splitting: measurement length mismatch");
  const double batch = static_cast<double>(y.cols());

  SplitOperator split = split_operator(a, split_fraction, rng);
  Matrix y1(split.first.rows(), y.cols());
  Matrix y2(split.second.rows(), y.cols());
  for (std::size_t i = 0; i < split.first_rows.size(); ++i)
    y1.row(static_cast<Eigen::Index>(i)) = y.row(split.first_rows[i]);
  for (std::size_t i = 0; i < split.second_rows.size(); ++i)
    y2.row(static_cast<Eigen::Index>(i)) = y.row(split.second_rows[i]);

  Mlp::Trace trace;
  Matrix x_hat = net.forward(split.first.pinv_apply(y1), trace);
  Matrix residual = y2 - split.second.apply(x_hat);

  LossResult out;
  out.value = residual.squaredNorm() / batch;
  out.gradients = net.zero_gradients();
  net.backward(trace, Matrix((-2.0 / batch) * split.second.adjoint(residual)),
               out.gradients);
  return out;
}

LossResult loss_supervised(const Mlp& net, const Vector& y, const LinearOperator& a,
                           const Vector& x) {
  return loss_supervised(net, Matrix(y), a, Matrix(x));
}

LossResult loss_moi(const Mlp& net, const Vector& y, const LinearOperator& a_g,
                    const LinearOperator& a_s, double cross_weight) {
  return loss_moi(net, Matrix(y), a_g, a_s, cross_weight);
}

LossResult loss_splitting(const Mlp& net, const Vector& y, const LinearOperator& a,
                          double split_fraction, Rng& rng) {
  return loss_splitting(net, Matrix(y), a, split_fraction, rng);
}

} // namespace multiop
