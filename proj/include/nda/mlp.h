// nda/mlp.h

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

#ifndef NDA_MLP_H_
#define NDA_MLP_H_

#include <cstddef>
#include <span>
#include <vector>

namespace nda {

// Fully connected tanh network with a linear output layer. The network owns
// no parameters; it is a view at a fixed offset into a flat parameter buffer.
// Layout per dense layer: weight (out x in, row-major), then bias (out).
class Mlp {
 public:
  // sizes = {in, hidden..., out}; at least {in, out}.
  Mlp(std::vector<std::size_t> sizes, std::size_t offset);

  std::size_t in_dim() const { return sizes_.front(); }
  std::size_t out_dim() const { return sizes_.back(); }
  std::size_t num_dense() const { return sizes_.size() - 1; }
  const std::vector<std::size_t> &sizes() const { return sizes_; }
  std::size_t offset() const { return offset_; }
  std::size_t param_count() const { return param_count_; }

  // Offsets (relative to the flat buffer) of dense layer l's weight and bias.
  std::size_t weight_offset(std::size_t l) const { return weight_offsets_[l]; }
  std::size_t bias_offset(std::size_t l) const {
    return weight_offsets_[l] + sizes_[l + 1] * sizes_[l];
  }

  // acts[0] is the input, acts[l] the l-th activation, acts.back() the
  // output. Buffers are resized on first use and reused afterwards.
  struct Trace {
    std::vector<std::vector<double>> acts;
  };

  void Forward(std::span<const double> params, std::span<const double> input,
               Trace *trace) const;

  // Accumulates dL/dparams into grad_params (full flat buffer) and
  // dL/dinput into grad_input, given dL/doutput.
  void Backward(std::span<const double> params, const Trace &trace,
                std::span<const double> grad_output,
                std::span<double> grad_params,
                std::span<double> grad_input) const;

 private:
  std::vector<std::size_t> sizes_;
  std::size_t offset_;
  std::vector<std::size_t> weight_offsets_;
  std::size_t param_count_ = 0;
};

}  // namespace nda

#endif  // NDA_MLP_H_
