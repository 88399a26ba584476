#pragma once

// =============================================================================
// Scaled conjugate gradient minimizer (Moller's algorithm).
//
// Full-batch second-order-free CG with adaptive Levenberg-Marquardt style
// damping. Steps are accepted only when the objective does not increase, so
// the accepted-loss trace is non-increasing by construction.
// =============================================================================

#include <functional>
#include <vector>

namespace fcmli {

struct ScgOptions {
    int max_iters = 500;
    double sigma0 = 1e-4;       // secant step scale for the curvature estimate
    double lambda0 = 1e-6;      // initial damping
    double grad_tol = 1e-7;     // stop when the gradient norm drops below
    double lambda_max = 1e15;   // stop when damping explodes (no descent possible)
};

/// Objective: fills `grad` (same length as theta) and returns the loss.
using ScgObjective =
    std::function<double(const std::vector<double>& theta, std::vector<double>& grad)>;

/// Called after every accepted step with (iteration, loss, theta);
/// return false to stop early.
using ScgStepCallback =
    std::function<bool(int iter, double loss, const std::vector<double>& theta)>;

struct ScgResult {
    std::vector<double> theta;
    double loss = 0.0;
    int iters = 0;
    bool gradient_converged = false;
    std::vector<double> accepted_losses;
};

ScgResult scg_minimize(const ScgObjective& objective, std::vector<double> theta,
                       const ScgOptions& opts, const ScgStepCallback& on_step = {});

}  // namespace fcmli
