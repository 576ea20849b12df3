// src/mlp.cc

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

#include "nda/mlp.h"

#include <cmath>
#include <stdexcept>

#include "nda/kernels.h"

namespace nda {

Mlp::Mlp(std::vector<std::size_t> sizes, std::size_t offset)
    : sizes_(std::move(sizes)), offset_(offset) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least in and out sizes");
  std::size_t at = offset_;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] == 0 || sizes_[l + 1] == 0)
      throw std::invalid_argument("Mlp layer sizes must be positive");
    weight_offsets_.push_back(at);
    at += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
  param_count_ = at - offset_;
}

void Mlp::Forward(std::span<const double> params, std::span<const double> input,
                  Trace *trace) const {
  const auto &k = kernels::Active();
  auto &acts = trace->acts;
  acts.resize(sizes_.size());
  acts[0].assign(input.begin(), input.end());
  const std::size_t last = num_dense() - 1;
  for (std::size_t l = 0; l <= last; ++l) {
    acts[l + 1].resize(sizes_[l + 1]);
    k.gemv(params.data() + weight_offset(l), acts[l].data(),
           params.data() + bias_offset(l), acts[l + 1].data(), sizes_[l + 1],
           sizes_[l]);
    if (l != last)
      for (double &a : acts[l + 1]) a = std::tanh(a);
  }
}

void Mlp::Backward(std::span<const double> params, const Trace &trace,
                   std::span<const double> grad_output,
                   std::span<double> grad_params,
                   std::span<double> grad_input) const {
  const auto &k = kernels::Active();
  const auto &acts = trace.acts;
  std::vector<double> g(grad_output.begin(), grad_output.end());
  std::vector<double> g_prev;
  for (std::size_t l = num_dense(); l-- > 0;) {
    const std::size_t rows = sizes_[l + 1];
    const std::size_t cols = sizes_[l];
    double *gb = grad_params.data() + bias_offset(l);
    for (std::size_t r = 0; r < rows; ++r) gb[r] += g[r];
    k.ger_acc(g.data(), acts[l].data(), grad_params.data() + weight_offset(l),
              rows, cols);
    if (l == 0) {
      k.gemv_t_acc(params.data() + weight_offset(l), g.data(), grad_input.data(),
                   rows, cols);
    } else {
      g_prev.assign(cols, 0.0);
      k.gemv_t_acc(params.data() + weight_offset(l), g.data(), g_prev.data(),
                   rows, cols);
      // acts[l] = tanh(pre), d tanh = 1 - tanh^2
      for (std::size_t c = 0; c < cols; ++c)
        g_prev[c] *= 1.0 - acts[l][c] * acts[l][c];
      g.swap(g_prev);
    }
  }
}

}  // namespace nda
