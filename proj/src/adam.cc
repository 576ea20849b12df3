// src/adam.cc

// Copyright 2026  The nda-backend Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "nda/adam.h"

#include <cmath>
#include <stdexcept>

namespace nda {

Adam::Adam(std::size_t num_params, const AdamConfig &config)
    : config_(config), m_(num_params, 0.0), v_(num_params, 0.0) {
  if (!(config.learning_rate > 0.0))
    throw std::invalid_argument("learning rate must be > 0");
  if (!(config.beta1 > 0.0 && config.beta1 < 1.0) ||
      !(config.beta2 > 0.0 && config.beta2 < 1.0))
    throw std::invalid_argument("Adam betas must lie in (0, 1)");
  if (!(config.eps > 0.0)) throw std::invalid_argument("Adam eps must be > 0");
}

void Adam::Step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("Adam step: size mismatch");
  ++step_;
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(config_.beta1, t);
  const double correction2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
    const double m_hat = m_[i] / correction1;
    const double v_hat = v_[i] / correction2;
    params[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.eps);
  }
}

}  // namespace nda
