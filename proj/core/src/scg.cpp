#include "ocrhmm/scg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ocrhmm/types.hpp"

namespace ocrhmm {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_finite(double loss) {
  if (!std::isfinite(loss)) throw ModelError("non-finite loss during SCG training");
}

}  // namespace

ScgResult scg_minimize(const Objective& objective, std::vector<double>& weights,
                       const ScgConfig& config, const Monitor* validation) {
  const std::size_t n = weights.size();
  constexpr double kLambdaMin = 1e-15;
  constexpr double kLambdaMax = 1e100;

  std::vector<double> grad(n), grad_old(n), direction(n), trial(n), grad_trial(n);
  double loss = objective(weights, grad);
  check_finite(loss);
  for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];

  ScgResult result;
  std::vector<double> best_weights = weights;
  if (validation) {
    result.best_validation = (*validation)(weights);
    check_finite(result.best_validation);
  }
  int failures = 0;
  double lambda = config.lambda;
  bool success = true;
  std::size_t successes = 0;
  double mu = 0.0, kappa = 0.0, theta = 0.0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    result.epochs = epoch;
    if (success) {
      mu = dot(direction, grad);
      if (mu >= 0.0) {
        for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
        mu = dot(direction, grad);
      }
      kappa = dot(direction, direction);
      if (kappa < std::numeric_limits<double>::epsilon()) {
        result.stop_reason = "step direction vanished";
        break;
      }
      const double step = config.sigma / std::sqrt(kappa);
      for (std::size_t i = 0; i < n; ++i) trial[i] = weights[i] + step * direction[i];
      check_finite(objective(trial, grad_trial));
      theta = 0.0;
      for (std::size_t i = 0; i < n; ++i) theta += direction[i] * (grad_trial[i] - grad[i]);
      theta /= step;
    }

    double delta = theta + lambda * kappa;
    if (delta <= 0.0) {
      delta = lambda * kappa;
      lambda -= theta / kappa;
    }
    const double alpha = -mu / delta;
    for (std::size_t i = 0; i < n; ++i) trial[i] = weights[i] + alpha * direction[i];
    const double trial_loss = objective(trial, grad_trial);
    check_finite(trial_loss);
    const double comparison = 2.0 * (trial_loss - loss) / (alpha * mu);

    if (comparison >= 0.0) {
      success = true;
      ++successes;
      weights.swap(trial);
      grad_old.swap(grad);
      grad.swap(grad_trial);
      loss = trial_loss;
    } else {
      success = false;
    }

    if (comparison < 0.25) lambda = std::min(4.0 * lambda, kLambdaMax);
    if (comparison > 0.75) lambda = std::max(0.5 * lambda, kLambdaMin);

    if (validation) {
      const double v = (*validation)(weights);
      check_finite(v);
      if (v < result.best_validation) {
        result.best_validation = v;
        result.best_epoch = epoch;
        best_weights = weights;
        failures = 0;
      } else if (v > result.best_validation && ++failures >= config.patience) {
        result.stop_reason = "validation stop";
        break;
      }
    }

    if (loss <= config.goal) {
      result.stop_reason = "performance goal met";
      break;
    }
    if (success && std::sqrt(dot(grad, grad)) < config.min_gradient) {
      result.stop_reason = "minimum gradient reached";
      break;
    }

    if (successes == n) {
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
      successes = 0;
    } else if (success) {
      double beta = 0.0;
      for (std::size_t i = 0; i < n; ++i) beta += (grad_old[i] - grad[i]) * grad[i];
      beta /= mu;
      for (std::size_t i = 0; i < n; ++i) direction[i] = beta * direction[i] - grad[i];
    }
  }
  if (result.stop_reason.empty()) result.stop_reason = "maximum epochs reached";

  if (validation) {
    weights = best_weights;
    std::vector<double> scratch(n);
    result.training_loss = objective(weights, scratch);
  } else {
    result.training_loss = loss;
    result.best_epoch = result.epochs;
  }
  return result;
}

}  // namespace ocrhmm
