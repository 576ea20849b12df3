// nda/adam.h

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

#ifndef NDA_ADAM_H_
#define NDA_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

namespace nda {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction, minimizing. Callers maximizing an objective
// pass the negated gradient.
class Adam {
 public:
  Adam(std::size_t num_params, const AdamConfig &config);

  void Step(std::span<double> params, std::span<const double> grad);
  std::uint64_t steps() const { return step_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t step_ = 0;
};

}  // namespace nda

#endif  // NDA_ADAM_H_
