#include "fcmli/scg.hpp"

#include <cmath>

namespace fcmli {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        s += a[k] * b[k];
    }
    return s;
}

}  // namespace

ScgResult scg_minimize(const ScgObjective& objective, std::vector<double> theta,
                       const ScgOptions& opts, const ScgStepCallback& on_step) {
    const std::size_t n = theta.size();

    std::vector<double> grad(n), grad_new(n), grad_sigma(n);
    std::vector<double> dir(n), step(n), theta_try(n);

    double loss = objective(theta, grad);

    // p = r = -E'(w)
    for (std::size_t k = 0; k < n; ++k) {
        dir[k] = -grad[k];
    }
    std::vector<double> resid = dir;

    double lambda = opts.lambda0;
    double lambda_bar = 0.0;
    bool success = true;
    double delta = 0.0;
    double mu = 0.0;

    ScgResult result;
    result.accepted_losses.push_back(loss);

    int iter = 0;
    for (iter = 1; iter <= opts.max_iters; ++iter) {
        const double dir_norm2 = dot(dir, dir);
        const double dir_norm = std::sqrt(dir_norm2);
        if (!(dir_norm > 0.0)) {
            result.gradient_converged = true;
            break;
        }

        if (success) {
            // Second-order information from a secant along the search direction.
            const double sigma = opts.sigma0 / dir_norm;
            for (std::size_t k = 0; k < n; ++k) {
                theta_try[k] = theta[k] + sigma * dir[k];
            }
            objective(theta_try, grad_sigma);
            delta = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                delta += dir[k] * (grad_sigma[k] - grad[k]) / sigma;
            }
        }

        // Scale the curvature with the damping term.
        delta += (lambda - lambda_bar) * dir_norm2;
        if (delta <= 0.0) {
            // Make the Hessian surrogate positive definite.
            lambda_bar = 2.0 * (lambda - delta / dir_norm2);
            delta = -delta + lambda * dir_norm2;
            lambda = lambda_bar;
        }

        mu = dot(dir, resid);
        const double alpha = mu / delta;

        for (std::size_t k = 0; k < n; ++k) {
            theta_try[k] = theta[k] + alpha * dir[k];
        }
        const double loss_try = objective(theta_try, grad_new);
        const double comparison = 2.0 * delta * (loss - loss_try) / (mu * mu);

        if (comparison >= 0.0) {
            // Accept: the objective did not increase.
            theta.swap(theta_try);
            loss = loss_try;
            result.accepted_losses.push_back(loss);

            std::vector<double> resid_new(n);
            for (std::size_t k = 0; k < n; ++k) {
                resid_new[k] = -grad_new[k];
            }
            grad.swap(grad_new);
            lambda_bar = 0.0;
            success = true;

            const double resid_norm2 = dot(resid_new, resid_new);
            if (std::sqrt(resid_norm2) < opts.grad_tol) {
                resid.swap(resid_new);
                result.gradient_converged = true;
                if (on_step && !on_step(iter, loss, theta)) {
                    break;
                }
                break;
            }

            // Restart in the steepest-descent direction every n accepted
            // steps, otherwise Polak-Ribiere style update.
            if (iter % static_cast<int>(n) == 0) {
                dir = resid_new;
            } else {
                const double beta = (resid_norm2 - dot(resid_new, resid)) / mu;
                for (std::size_t k = 0; k < n; ++k) {
                    dir[k] = resid_new[k] + beta * dir[k];
                }
            }
            resid.swap(resid_new);

            if (comparison >= 0.75) {
                lambda *= 0.25;
            }
            if (on_step && !on_step(iter, loss, theta)) {
                break;
            }
        } else {
            // Reject: raise the damping and retry along the same direction.
            lambda_bar = lambda;
            success = false;
        }

        if (comparison < 0.25) {
            lambda += delta * (1.0 - comparison) / dir_norm2;
        }
        if (lambda > opts.lambda_max) {
            break;
        }
    }

    result.theta = std::move(theta);
    result.loss = loss;
    result.iters = iter;
    return result;
}

}  // namespace fcmli
