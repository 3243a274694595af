#pragma once

#include <iosfwd>
#include <string>

#include "multiop/config.hpp"
#include "multiop/result_table.hpp"

namespace multiop {

/// Monte Carlo recovery probability over a (k, G, m) grid. Cells run on the
/// configured worker count, each from its own derived seed; rows come out in
/// grid order regardless of completion order.
///
/// Config fields: n, k (list), G (list), m (list or {from,to,step}),
/// trials, samples_per_k (default 150) or samples (fixed N), svt{...}.
ResultTable cmd_phase_transition(const LoadedConfig& cfg);

/// Trains a reconstruction network per (G, m) cell on synthetic union-of-
/// subspaces data and reports test PSNR improvement over the pseudo-inverse.
/// A failed cell is tagged in its status column; the grid always completes.
///
/// Config fields: n, k, components, G (list), m (list), train_samples,
/// test_samples, noise_sigma, operator (gaussian|inpainting),
/// net {hidden, residual}, train {loss, epochs, batch_size, lr, ...}.
ResultTable cmd_moi_grid(const LoadedConfig& cfg);

/// The worked 3-D example: a line model observed through the three
/// coordinate-plane projections. Reports the plausible-signal set left by
/// one, two and all three projections.
std::string cmd_toy();

/// Identifiability report for a configured operator bank (and optionally a
/// model): per-operator sizes, stacked rank, necessary/sufficient verdicts,
/// and whether the bank pins the model down exactly.
///
/// Config fields: bank {kind, ...}, optional model {k | basis}, optional k.
std::string cmd_identify(const LoadedConfig& cfg);

/// Noise-removal demo on a circular grid: draws a random distribution,
/// convolves it with the configured noise kernel, deconvolves, and reports
/// the total-variation distance of the round trip. A kernel whose spectrum
/// touches zero is reported as not invertible rather than thrown at the user.
///
/// Config fields: grid, kernel {kind, ...}, tol.
std::string cmd_deconv(const LoadedConfig& cfg);

/// Trains a network on synthetic or IDX image data and writes a checkpoint.
///
/// Config fields: data {...}, net {hidden, residual}, train {...},
/// checkpoint (output path).
std::string cmd_train(const LoadedConfig& cfg);

/// Loads a checkpoint and evaluates it on a freshly drawn test set.
///
/// Config fields: checkpoint, data {...}.
std::string cmd_eval(const LoadedConfig& cfg);

/// Dispatches on cfg.kind, writes table/report output to cfg.out_path when
/// set, and prints a short summary (or the full report) to `out`.
void run_command(const LoadedConfig& cfg, std::ostream& out);

} // namespace multiop
