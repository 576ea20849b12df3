// src/flow.cc

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

#include "nda/flow.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nda/random.h"

namespace nda {
namespace {

using LayerTrace = FlowTape::LayerTrace;

void CheckFinite(std::span<const double> v, std::size_t layer, const char *dir) {
  for (double x : v)
    if (!std::isfinite(x))
      throw NumericalError(std::string("non-finite value in flow ") + dir +
                           " pass at layer " + std::to_string(layer));
}

// One inverse step u -> v; returns the layer's log-det contribution.
double InverseStep(const CouplingLayer &layer, std::span<const double> params,
                   LayerTrace *tr) {
  tr->gather.resize(layer.pass.size());
  for (std::size_t i = 0; i < layer.pass.size(); ++i)
    tr->gather[i] = tr->input[layer.pass[i]];
  layer.scale_net.Forward(params, tr->gather, &tr->scale);
  layer.shift_net.Forward(params, tr->gather, &tr->shift);
  const auto &raw = tr->scale.acts.back();
  const auto &shift = tr->shift.acts.back();
  tr->output = tr->input;
  tr->tanh_raw.resize(layer.transform.size());
  tr->exp_neg_s.resize(layer.transform.size());
  double log_det = 0.0;
  for (std::size_t k = 0; k < layer.transform.size(); ++k) {
    const std::size_t i = layer.transform[k];
    const double th = std::tanh(raw[k]);
    const double s = layer.scale_cap * th;
    tr->tanh_raw[k] = th;
    tr->exp_neg_s[k] = std::exp(-s);
    tr->output[i] = (tr->input[i] - shift[k]) * tr->exp_neg_s[k];
    log_det -= s;
  }
  return log_det;
}

}  // namespace

FlowModel::FlowModel(std::size_t dim, const std::vector<CouplingSpec> &specs)
    : dim_(dim) {
  if (dim < 2) throw InputError("a coupling flow needs dim >= 2");
  std::size_t offset = 0;
  for (std::size_t l = 0; l < specs.size(); ++l) {
    const auto &spec = specs[l];
    if (spec.mask.size() != dim)
      throw InputError("coupling layer " + std::to_string(l) + " mask has wrong length");
    if (!(spec.scale_cap > 0.0) || !std::isfinite(spec.scale_cap))
      throw InputError("coupling layer " + std::to_string(l) + " scale_cap must be > 0");
    std::vector<std::size_t> pass, transform;
    for (std::size_t i = 0; i < dim; ++i)
      (spec.mask[i] ? pass : transform).push_back(i);
    if (pass.empty() || transform.empty())
      throw InputError("coupling layer " + std::to_string(l) +
                       " mask must have both pass-through and transformed entries");
    std::vector<std::size_t> sizes{pass.size()};
    sizes.insert(sizes.end(), spec.hidden.begin(), spec.hidden.end());
    sizes.push_back(transform.size());
    Mlp scale(sizes, offset);
    offset += scale.param_count();
    Mlp shift(sizes, offset);
    offset += shift.param_count();
    layers_.push_back({spec.mask, std::move(pass), std::move(transform), std::move(scale),
                       std::move(shift), spec.scale_cap});
  }
  params_.assign(offset, 0.0);
}

std::vector<CouplingSpec> FlowModel::specs() const {
  std::vector<CouplingSpec> out;
  for (const auto &layer : layers_) {
    const auto &sizes = layer.scale_net.sizes();
    out.push_back({layer.mask, std::vector<std::size_t>(sizes.begin() + 1, sizes.end() - 1),
                   layer.scale_cap});
  }
  return out;
}

void FlowModel::set_params(std::span<const double> values) {
  if (values.size() != params_.size())
    throw InputError("flow expects " + std::to_string(params_.size()) +
                     " parameters, got " + std::to_string(values.size()));
  params_.assign(values.begin(), values.end());
}

std::pair<Vector, double> FlowModel::InverseWithLogdet(std::span<const double> x) const {
  if (x.size() != dim_)
    throw InputError("flow input has dimension " + std::to_string(x.size()) +
                     ", expected " + std::to_string(dim_));
  LayerTrace tr;
  tr.input.assign(x.begin(), x.end());
  double log_j = 0.0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    log_j += InverseStep(layers_[l], params_, &tr);
    CheckFinite(tr.output, l, "inverse");
    tr.input.swap(tr.output);
  }
  Vector z = Eigen::Map<const Vector>(tr.input.data(), static_cast<Eigen::Index>(dim_));
  return {std::move(z), log_j};
}

void FlowModel::InverseBatch(const RowMatrix &x, RowMatrix *z, Vector *log_j) const {
  z->resize(x.rows(), static_cast<Eigen::Index>(dim_));
  log_j->resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    auto [zr, lj] = InverseWithLogdet(
        std::span<const double>(x.row(r).data(), static_cast<std::size_t>(x.cols())));
    z->row(r) = zr.transpose();
    (*log_j)(r) = lj;
  }
}

std::pair<Vector, double> FlowModel::ForwardWithLogdet(std::span<const double> z) const {
  if (z.size() != dim_)
    throw InputError("flow input has dimension " + std::to_string(z.size()) +
                     ", expected " + std::to_string(dim_));
  std::vector<double> v(z.begin(), z.end());
  std::vector<double> gather;
  Mlp::Trace scale, shift;
  double log_det = 0.0;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto &layer = layers_[l];
    gather.resize(layer.pass.size());
    for (std::size_t i = 0; i < layer.pass.size(); ++i) gather[i] = v[layer.pass[i]];
    layer.scale_net.Forward(params_, gather, &scale);
    layer.shift_net.Forward(params_, gather, &shift);
    for (std::size_t k = 0; k < layer.transform.size(); ++k) {
      const std::size_t i = layer.transform[k];
      const double s = layer.scale_cap * std::tanh(scale.acts.back()[k]);
      v[i] = v[i] * std::exp(s) + shift.acts.back()[k];
      log_det += s;
    }
    CheckFinite(v, l, "forward");
  }
  return {Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(dim_)), log_det};
}

Vector FlowModel::Forward(std::span<const double> z) const {
  return ForwardWithLogdet(z).first;
}

FlowTape FlowModel::Record(const RowMatrix &x) const {
  if (static_cast<std::size_t>(x.cols()) != dim_)
    throw InputError("flow input has dimension " + std::to_string(x.cols()) +
                     ", expected " + std::to_string(dim_));
  FlowTape tape;
  tape.z_.resize(x.rows(), x.cols());
  tape.log_j_.resize(x.rows());
  tape.rows_.resize(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    auto &traces = tape.rows_[static_cast<std::size_t>(r)];
    traces.resize(layers_.size());
    std::vector<double> u(x.row(r).data(), x.row(r).data() + dim_);
    double log_j = 0.0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      traces[l].input = u;
      log_j += InverseStep(layers_[l], params_, &traces[l]);
      CheckFinite(traces[l].output, l, "inverse");
      u = traces[l].output;
    }
    std::copy(u.begin(), u.end(), tape.z_.row(r).data());
    tape.log_j_(r) = log_j;
  }
  return tape;
}

FlowGrads FlowModel::Backprop(const RowMatrix &x, const RowMatrix &grad_z,
                              const Vector &grad_log_j) const {
  return Backprop(Record(x), grad_z, grad_log_j);
}

FlowGrads FlowModel::Backprop(const FlowTape &tape, const RowMatrix &grad_z,
                              const Vector &grad_log_j) const {
  const auto rows = static_cast<Eigen::Index>(tape.rows_.size());
  if (grad_z.rows() != rows || static_cast<std::size_t>(grad_z.cols()) != dim_ ||
      grad_log_j.size() != rows)
    throw InputError("flow backprop: inconsistent shapes");
  FlowGrads out;
  out.params.assign(params_.size(), 0.0);
  out.x.resize(rows, static_cast<Eigen::Index>(dim_));

  std::vector<double> g(dim_), g_raw, g_shift, g_pass;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto &traces = tape.rows_[static_cast<std::size_t>(r)];
    g.assign(grad_z.row(r).data(), grad_z.row(r).data() + dim_);
    const double gl = grad_log_j(r);
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const auto &layer = layers_[l];
      const auto &tr = traces[l];
      const std::size_t nb = layer.transform.size();
      g_raw.resize(nb);
      g_shift.resize(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        const std::size_t i = layer.transform[k];
        const double gv = g[i];
        // v = (u - t) e^{-s}; log_j gets -s
        g_shift[k] = -gv * tr.exp_neg_s[k];
        const double g_s = -gv * tr.output[i] - gl;
        g_raw[k] = g_s * layer.scale_cap * (1.0 - tr.tanh_raw[k] * tr.tanh_raw[k]);
        g[i] = gv * tr.exp_neg_s[k];
      }
      g_pass.assign(layer.pass.size(), 0.0);
      layer.scale_net.Backward(params_, tr.scale, g_raw, out.params, g_pass);
      layer.shift_net.Backward(params_, tr.shift, g_shift, out.params, g_pass);
      for (std::size_t i = 0; i < layer.pass.size(); ++i) g[layer.pass[i]] += g_pass[i];
    }
    std::copy(g.begin(), g.end(), out.x.row(r).data());
  }
  return out;
}

FlowModel InitFlow(std::size_t dim, std::size_t num_layers, std::size_t hidden,
                   std::uint64_t seed, const FlowOptions &options) {
  if (dim < 2) throw InputError("a coupling flow needs dim >= 2");
  if (num_layers < 1) throw InputError("a flow needs at least one layer");
  if (hidden < 1) throw InputError("hidden width must be >= 1");
  const std::size_t depth =
      options.hidden_layers != 0 ? options.hidden_layers : (dim <= 64 ? 2 : 1);
  const std::size_t half = dim / 2;
  std::vector<CouplingSpec> specs;
  for (std::size_t l = 0; l < num_layers; ++l) {
    CouplingSpec spec;
    spec.mask.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) spec.mask[i] = (i < half) == (l % 2 == 0);
    spec.hidden.assign(depth, hidden);
    spec.scale_cap = options.scale_cap;
    specs.push_back(std::move(spec));
  }
  FlowModel flow(dim, specs);

  Rng rng(seed);
  auto params = flow.mutable_params();
  for (std::size_t l = 0; l < flow.num_layers(); ++l) {
    for (const Mlp *net : {&flow.layer(l).scale_net, &flow.layer(l).shift_net}) {
      // the last dense layer stays zero
      for (std::size_t d = 0; d + 1 < net->num_dense(); ++d) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(net->sizes()[d]));
        const std::size_t count = net->sizes()[d + 1] * net->sizes()[d] + net->sizes()[d + 1];
        for (std::size_t p = 0; p < count; ++p)
          params[net->weight_offset(d) + p] = rng.Uniform(-bound, bound);
      }
    }
  }
  return flow;
}

}  // namespace nda
