#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ocrhmm {

/// Scaled conjugate gradient (Moller) constants and stopping rules.
struct ScgConfig {
  double sigma = 5e-5;   ///< finite-difference step for the curvature estimate
  double lambda = 5e-7;  ///< initial Levenberg-Marquardt style scale
  int max_epochs = 1000;
  int patience = 6;  ///< consecutive validation failures before stopping
  double min_gradient = 1e-6;
  double goal = 0.0;  ///< stop once the training loss reaches this
};

/// Returns the loss at `w` and writes its gradient into `grad`.
using Objective = std::function<double(std::span<const double> w, std::span<double> grad)>;
/// Loss on held-out data at `w`.
using Monitor = std::function<double(std::span<const double> w)>;

struct ScgResult {
  int epochs = 0;
  int best_epoch = 0;
  double training_loss = 0.0;
  double best_validation = 0.0;
  std::string stop_reason;
};

/// Minimises `objective` from `weights` in place. With a monitor, weights
/// are restored to the epoch of lowest validation loss and training stops
/// after `patience` consecutive epochs without a new best. Throws
/// ModelError if the loss becomes non-finite.
ScgResult scg_minimize(const Objective& objective, std::vector<double>& weights,
                       const ScgConfig& config, const Monitor* validation = nullptr);

}  // namespace ocrhmm
