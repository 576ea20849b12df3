// nda/flow.h

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

#ifndef NDA_FLOW_H_
#define NDA_FLOW_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "nda/mlp.h"
#include "nda/types.h"

namespace nda {

// One affine coupling layer. Coordinates with mask[i] == true pass through;
// the rest are transformed with a scale and shift computed from the
// pass-through coordinates:
//
//   generative (z -> x):   x_b = z_b * exp(s(z_a)) + t(z_a)
//   inverse    (x -> z):   z_b = (x_b - t(x_a)) * exp(-s(x_a))
//
// with s = scale_cap * tanh(scale_net(.)) and t = shift_net(.).
struct CouplingLayer {
  std::vector<bool> mask;
  std::vector<std::size_t> pass;       // indices with mask true
  std::vector<std::size_t> transform;  // indices with mask false
  Mlp scale_net;
  Mlp shift_net;
  double scale_cap;
};

struct CouplingSpec {
  std::vector<bool> mask;
  std::vector<std::size_t> hidden;  // hidden widths, shared by both nets
  double scale_cap = 2.0;
};

class FlowModel;

// Everything the backward pass needs from an inverse pass over a batch.
class FlowTape {
 public:
  const RowMatrix &z() const { return z_; }
  const Vector &log_j() const { return log_j_; }

  // Per-row, per-layer intermediates of the inverse pass.
  struct LayerTrace {
    std::vector<double> input;   // u, the layer's x-side input
    std::vector<double> gather;  // u restricted to the pass coordinates
    Mlp::Trace scale;
    Mlp::Trace shift;
    std::vector<double> tanh_raw;  // tanh(scale_net output)
    std::vector<double> exp_neg_s;
    std::vector<double> output;  // v, the z-side output
  };

 private:
  friend class FlowModel;
  RowMatrix z_;
  Vector log_j_;
  std::vector<std::vector<LayerTrace>> rows_;  // [row][layer]
};

struct FlowGrads {
  std::vector<double> params;  // aligned with FlowModel::params()
  RowMatrix x;                 // dL/dx, one row per input
};

// Stack of coupling layers. The inverse map f^-1 applies layer 0 first;
// the generative map f applies the last layer first.
//
// Parameter order (the flat buffer, gradients and serialization all use it):
// layer-major; within a layer the scale net then the shift net; within a
// net the dense layers in order, each as row-major weights then biases.
class FlowModel {
 public:
  FlowModel(std::size_t dim, const std::vector<CouplingSpec> &specs);

  std::size_t dim() const { return dim_; }
  std::size_t num_layers() const { return layers_.size(); }
  const CouplingLayer &layer(std::size_t i) const { return layers_[i]; }
  std::size_t param_count() const { return params_.size(); }
  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }
  void set_params(std::span<const double> values);

  // z = f^-1(x) and log J_x = log |det d f^-1 / dx|.
  std::pair<Vector, double> InverseWithLogdet(std::span<const double> x) const;
  void InverseBatch(const RowMatrix &x, RowMatrix *z, Vector *log_j) const;

  // x = f(z).
  Vector Forward(std::span<const double> z) const;
  // x = f(z) and log |det d f / dz|.
  std::pair<Vector, double> ForwardWithLogdet(std::span<const double> z) const;

  // Inverse pass over a batch, keeping the intermediates for Backprop.
  FlowTape Record(const RowMatrix &x) const;

  // Gradients of L = sum_r (grad_z_r . z(x_r) + grad_log_j_r * log_j(x_r))
  // with respect to every parameter and every input. Rows are accumulated
  // in order, so the result is bit-reproducible.
  FlowGrads Backprop(const RowMatrix &x, const RowMatrix &grad_z,
                     const Vector &grad_log_j) const;
  FlowGrads Backprop(const FlowTape &tape, const RowMatrix &grad_z,
                     const Vector &grad_log_j) const;

  std::vector<CouplingSpec> specs() const;

 private:
  std::size_t dim_;
  std::vector<CouplingLayer> layers_;
  std::vector<double> params_;
};

struct FlowOptions {
  // Hidden layers per net; 0 picks 2 for dim <= 64 and 1 above.
  std::size_t hidden_layers = 0;
  double scale_cap = 2.0;
};

// Alternating half masks (layer 0 passes the first dim/2 coordinates).
// Output layers start at zero, so the flow starts as the identity; hidden
// weights and biases are uniform in +-1/sqrt(fan_in) from the seed.
FlowModel InitFlow(std::size_t dim, std::size_t num_layers, std::size_t hidden,
                   std::uint64_t seed, const FlowOptions &options = {});

}  // namespace nda

#endif  // NDA_FLOW_H_
