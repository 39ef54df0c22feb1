#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "pbessel/errors.hpp"

namespace pbessel {

template <std::size_t N>
using OdeState = std::array<std::complex<double>, N>;

struct OdeOptions {
  double abs_tol = 1e-11;
  double rel_tol = 1e-9;
  // Cap on the step size, mainly to guarantee dense enough sampling for
  // oscillation counting.  0 means no cap.
  double max_step = 0.0;
  // First trial step; 0 picks a fraction of the span.
  double initial_step = 0.0;
  long max_steps = 4000000;
  // Renormalize the state (valid for linear systems only) once its magnitude
  // leaves [1/rescale_at, rescale_at]; the factor moves into log_scale.
  bool rescale = true;
  double rescale_at = 1e8;
};

// Dormand-Prince 5(4) driver over a fixed checkpoint partition.  The right
// hand side is evaluated only inside one partition cell at a time, so
// potential discontinuities placed on checkpoints never straddle a step.
//
//   rhs(x, y, dy)                      derivative evaluation
//   on_checkpoint(k, x, y, log_scale)  after reaching checkpoints[k]
//   on_step(x, y, log_scale)          after every accepted step
//
// checkpoints must be strictly monotone and start after (or before, for
// leftward runs) x0; the last entry is the final point.
template <std::size_t N, class RHS, class CheckpointFn, class StepFn>
void integrate_ode(RHS&& rhs, double x0, OdeState<N> y,
                   const std::vector<double>& checkpoints,
                   const OdeOptions& opt, CheckpointFn&& on_checkpoint,
                   StepFn&& on_step) {
  static constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double kA[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double kE[7] = {71.0 / 57600,     0.0,        -71.0 / 16695,
                                   71.0 / 1920,      -17253.0 / 339200,
                                   22.0 / 525,       -1.0 / 40};

  if (checkpoints.empty()) return;
  const double dir = (checkpoints.back() > x0) ? 1.0 : -1.0;

  double x = x0;
  double log_scale = 0.0;
  std::array<double, N> amp{};
  for (std::size_t i = 0; i < N; ++i) amp[i] = std::abs(y[i]);

  std::array<OdeState<N>, 7> k;
  rhs(x, y, k[0]);
  long steps = 0;
  double h = 0.0;

  auto renormalize = [&] {
    if (!opt.rescale) return;
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(y[i]));
    if (m == 0.0) return;
    if (m > opt.rescale_at || m < 1.0 / opt.rescale_at) {
      const double f = 1.0 / m;
      for (std::size_t i = 0; i < N; ++i) {
        y[i] *= f;
        k[0][i] *= f;
        amp[i] *= f;
      }
      log_scale += std::log(m);
    }
  };
  renormalize();

  for (std::size_t seg = 0; seg < checkpoints.size(); ++seg) {
    const double x_end = checkpoints[seg];
    if ((x_end - x) * dir < 0.0) {
      throw std::invalid_argument("integrate_ode: checkpoints not monotone");
    }
    if (h == 0.0) {
      if (opt.initial_step > 0.0) {
        h = dir * opt.initial_step;
      } else {
        double span = std::abs(checkpoints.back() - x0);
        h = dir * std::max(span * 1e-4, 1e-10);
      }
    }
    while ((x_end - x) * dir > 0.0) {
      if (++steps > opt.max_steps) {
        throw AccuracyError("integrate_ode: step budget exhausted at x = " +
                            std::to_string(x));
      }
      if (opt.max_step > 0.0 && std::abs(h) > opt.max_step) h = dir * opt.max_step;
      bool clipped = false;
      if ((x + h - x_end) * dir > 0.0) {
        h = x_end - x;
        clipped = true;
      }
      if (std::abs(h) < 1e-15 * (std::abs(x) + 1e-3)) {
        throw AccuracyError("integrate_ode: step size underflow at x = " +
                            std::to_string(x));
      }

      OdeState<N> y_stage, y1, err;
      for (int s = 1; s < 7; ++s) {
        for (std::size_t i = 0; i < N; ++i) {
          std::complex<double> acc = 0.0;
          for (int j = 0; j < s; ++j) acc += kA[s][j] * k[j][i];
          y_stage[i] = y[i] + h * acc;
        }
        rhs(x + kC[s] * h, y_stage, k[s]);
      }
      y1 = y_stage;  // stage 7 uses the 5th order weights, so y_stage == y1
      for (std::size_t i = 0; i < N; ++i) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < 7; ++j) acc += kE[j] * k[j][i];
        err[i] = h * acc;
      }

      double err_norm = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double mag = std::max({std::abs(y[i]), std::abs(y1[i]), 0.01 * amp[i]});
        const double sc = opt.abs_tol + opt.rel_tol * mag;
        const double ae = std::abs(err[i]);
        const double e = (sc > 0.0) ? ae / sc : (ae > 0.0 ? 1e6 : 0.0);
        err_norm += e * e;
      }
      err_norm = std::sqrt(err_norm / N);

      if (err_norm <= 1.0) {
        x = clipped ? x_end : x + h;
        y = y1;
        k[0] = k[6];  // FSAL
        for (std::size_t i = 0; i < N; ++i) amp[i] = std::max(amp[i], std::abs(y[i]));
        renormalize();
        on_step(x, y, log_scale);
        const double grow = (err_norm > 0.0)
                                ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)))
                                : 5.0;
        h *= grow;
      } else {
        h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
      }
    }
    // The checkpoint was hit exactly (step clipped onto it); k[0] is not
    // reusable across a potential discontinuity, so refresh it.
    rhs(x, y, k[0]);
    on_checkpoint(seg, x, y, log_scale);
  }
}

template <std::size_t N, class RHS, class CheckpointFn>
void integrate_ode(RHS&& rhs, double x0, OdeState<N> y,
                   const std::vector<double>& checkpoints,
                   const OdeOptions& opt, CheckpointFn&& on_checkpoint) {
  integrate_ode<N>(
      std::forward<RHS>(rhs), x0, std::move(y), checkpoints, opt,
      std::forward<CheckpointFn>(on_checkpoint),
      [](double, const OdeState<N>&, double) {});
}

}  // namespace pbessel
