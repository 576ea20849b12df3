// src/synth.cc

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

#include "nda/synth.h"

#include <cmath>
#include <cstdio>

#include "nda/linear_gaussian.h"
#include "nda/random.h"

namespace nda {

namespace {

// Real root of t + s t^3 = x for s > 0. The larger-magnitude Cardano term
// is formed first so that small |x| does not suffer cancellation; two Newton
// steps clean up the cube roots.
double SolveCubic(double s, double x) {
  if (s == 0.0) return x;
  const double p = 1.0 / s;
  const double half_q = -0.5 * x / s;
  const double root = std::sqrt(half_q * half_q + p * p * p / 27.0);
  const double a = std::cbrt(half_q <= 0.0 ? -half_q + root : -half_q - root);
  double t = a - p / (3.0 * a);
  for (int it = 0; it < 2; ++it) {
    const double f = t + s * t * t * t - x;
    t -= f / (1.0 + 3.0 * s * t * t);
  }
  return t;
}

std::string Id(const char *prefix, std::size_t k, std::size_t width) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, static_cast<int>(width), k);
  return buf;
}

std::size_t Width(std::size_t n) {
  std::size_t w = 1;
  for (std::size_t v = n > 0 ? n - 1 : 0; v >= 10; v /= 10) ++w;
  return w;
}

}  // namespace

const char *WarpKindName(WarpKind kind) {
  switch (kind) {
    case WarpKind::kIdentity:
      return "identity";
    case WarpKind::kSinhArcsinh:
      return "sinh_arcsinh";
    case WarpKind::kRotationThenCubic:
      return "rotation_then_cubic";
  }
  return "?";
}

WarpKind ParseWarpKind(const std::string &name) {
  if (name == "identity") return WarpKind::kIdentity;
  if (name == "sinh_arcsinh" || name == "elementwise_sinh_arcsinh")
    return WarpKind::kSinhArcsinh;
  if (name == "rotation_then_cubic") return WarpKind::kRotationThenCubic;
  throw InputError("unknown warp '" + name +
                   "' (expected identity, sinh_arcsinh or rotation_then_cubic)");
}

Vector SynthSpec::PriorVariances() const {
  if (prior_variances.size() == 0) return Vector::Ones(static_cast<Eigen::Index>(dim));
  return prior_variances;
}

void SynthSpec::Validate() const {
  if (dim < 1) throw InputError("dim must be >= 1");
  if (n_train_speakers < 1) throw InputError("n_train_speakers must be >= 1");
  if (n_eval_speakers < 2)
    throw InputError("n_eval_speakers must be >= 2 to form nontarget trials");
  if (utts_per_speaker < 2)
    throw InputError("utts_per_speaker must be >= 2 (each trial needs an enrollment and a test)");
  if (nontargets_per_target < 1) throw InputError("nontargets_per_target must be >= 1");
  if (prior_variances.size() != 0 &&
      static_cast<std::size_t>(prior_variances.size()) != dim)
    throw InputError("prior_variances has " + std::to_string(prior_variances.size()) +
                     " entries, expected " + std::to_string(dim));
  for (Eigen::Index j = 0; j < prior_variances.size(); ++j)
    if (!(prior_variances(j) > 0.0) || !std::isfinite(prior_variances(j)))
      throw InputError("prior variances must be positive and finite");
  if (!std::isfinite(warp.skew)) throw InputError("warp skew must be finite");
  if (!(warp.tail > 0.0) || !std::isfinite(warp.tail))
    throw InputError("warp tail must be > 0");
  if (!(warp.strength >= 0.0) || !std::isfinite(warp.strength))
    throw InputError("warp strength must be >= 0");
}

Vector OracleModel::Apply(std::span<const double> z) const {
  const auto d = static_cast<Eigen::Index>(z.size());
  Eigen::Map<const Vector> zv(z.data(), d);
  switch (warp.kind) {
    case WarpKind::kIdentity:
      return zv;
    case WarpKind::kSinhArcsinh: {
      Vector x(d);
      for (Eigen::Index j = 0; j < d; ++j)
        x(j) = std::sinh((std::asinh(zv(j)) + warp.skew) / warp.tail);
      return x;
    }
    case WarpKind::kRotationThenCubic: {
      Vector t = rotation * zv;
      return t.array() + warp.strength * t.array().cube();
    }
  }
  return zv;
}

Vector OracleModel::Invert(std::span<const double> x) const {
  const auto d = static_cast<Eigen::Index>(x.size());
  Eigen::Map<const Vector> xv(x.data(), d);
  switch (warp.kind) {
    case WarpKind::kIdentity:
      return xv;
    case WarpKind::kSinhArcsinh: {
      Vector z(d);
      for (Eigen::Index j = 0; j < d; ++j)
        z(j) = std::sinh(warp.tail * std::asinh(xv(j)) - warp.skew);
      return z;
    }
    case WarpKind::kRotationThenCubic: {
      Vector t(d);
      for (Eigen::Index j = 0; j < d; ++j) t(j) = SolveCubic(warp.strength, xv(j));
      return rotation.transpose() * t;
    }
  }
  return xv;
}

RowMatrix OracleModel::InvertRows(const RowMatrix &x) const {
  RowMatrix z(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    z.row(i) = Invert({x.row(i).data(), static_cast<std::size_t>(x.cols())}).transpose();
  return z;
}

double OracleModel::InverseLogDet(std::span<const double> x) const {
  double total = 0.0;
  switch (warp.kind) {
    case WarpKind::kIdentity:
      return 0.0;
    case WarpKind::kSinhArcsinh:
      for (double v : x) {
        const double a = warp.tail * std::asinh(v) - warp.skew;
        total += std::log(warp.tail * std::cosh(a)) - 0.5 * std::log1p(v * v);
      }
      return total;
    case WarpKind::kRotationThenCubic:
      // rotation has |det| = 1
      for (double v : x) {
        const double t = SolveCubic(warp.strength, v);
        total -= std::log1p(3.0 * warp.strength * t * t);
      }
      return total;
  }
  return total;
}

void OracleModel::Validate() const {
  const auto d = prior_variances.size();
  if (d < 1) throw InputError("oracle has no dimensions");
  for (Eigen::Index j = 0; j < d; ++j)
    if (!(prior_variances(j) > 0.0)) throw InputError("oracle prior variances must be > 0");
  if (warp.kind == WarpKind::kRotationThenCubic) {
    if (rotation.rows() != d || rotation.cols() != d)
      throw InputError("oracle rotation has the wrong shape");
    if (!(warp.strength >= 0.0)) throw InputError("warp strength must be >= 0");
  }
  if (warp.kind == WarpKind::kSinhArcsinh && !(warp.tail > 0.0))
    throw InputError("warp tail must be > 0");
}

Matrix RandomOrthogonal(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = rng.Normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Corpus GenerateCorpus(const SynthSpec &spec) {
  spec.Validate();
  Corpus corpus;
  corpus.oracle.warp = spec.warp;
  corpus.oracle.prior_variances = spec.PriorVariances();
  // the rotation gets its own stream so that changing the warp does not
  // reshuffle the speakers
  if (spec.warp.kind == WarpKind::kRotationThenCubic)
    corpus.oracle.rotation = RandomOrthogonal(spec.dim, spec.seed ^ 0x9e3779b97f4a7c15ULL);

  Rng rng(spec.seed);
  const Vector sd = corpus.oracle.prior_variances.cwiseSqrt();
  const auto d = static_cast<Eigen::Index>(spec.dim);
  const std::size_t u_width = Width(spec.utts_per_speaker);

  auto make_set = [&](const char *prefix, std::size_t n_speakers) {
    EmbeddingSet set(spec.dim);
    set.Reserve(n_speakers * spec.utts_per_speaker);
    const std::size_t s_width = Width(n_speakers);
    Vector mu(d), z(d);
    for (std::size_t k = 0; k < n_speakers; ++k) {
      for (Eigen::Index j = 0; j < d; ++j) mu(j) = sd(j) * rng.Normal();
      const std::string spk = Id(prefix, k, s_width);
      for (std::size_t u = 0; u < spec.utts_per_speaker; ++u) {
        for (Eigen::Index j = 0; j < d; ++j) z(j) = mu(j) + rng.Normal();
        Vector x = corpus.oracle.Apply({z.data(), spec.dim});
        set.Add(spk + Id("-u", u, u_width), spk,
                std::vector<double>(x.data(), x.data() + d));
      }
    }
    return set;
  };
  corpus.train = make_set("train", spec.n_train_speakers);
  corpus.eval = make_set("eval", spec.n_eval_speakers);

  const std::size_t n_eval = spec.n_eval_speakers;
  const std::size_t u_count = spec.utts_per_speaker;
  auto utt = [&](std::size_t k, std::size_t u) {
    return corpus.eval[k * u_count + u].utt_id;
  };
  corpus.trials.reserve(n_eval * (u_count - 1) * (1 + spec.nontargets_per_target));
  for (std::size_t k = 0; k < n_eval; ++k) {
    const std::string enroll = utt(k, 0);
    for (std::size_t u = 1; u < u_count; ++u) {
      corpus.trials.push_back({{enroll}, utt(k, u), true});
      for (std::size_t r = 0; r < spec.nontargets_per_target; ++r) {
        const std::size_t other = (k + 1 + rng.Below(n_eval - 1)) % n_eval;
        const std::size_t test = 1 + rng.Below(u_count - 1);
        corpus.trials.push_back({{enroll}, utt(other, test), false});
      }
    }
  }
  return corpus;
}

double OracleScore(const OracleModel &oracle, const RowMatrix &enroll,
                   std::span<const double> test) {
  const auto d = static_cast<Eigen::Index>(oracle.dim());
  if (enroll.rows() < 1) throw InputError("oracle score needs at least one enrollment vector");
  if (enroll.cols() != d || static_cast<Eigen::Index>(test.size()) != d)
    throw InputError("vector dimension does not match the oracle");
  RowMatrix z_enroll = oracle.InvertRows(enroll);
  Vector z_test = oracle.Invert(test);
  if (!z_enroll.allFinite() || !z_test.allFinite())
    throw NumericalError("vector lies outside the invertible range of the warp");
  return LatentLogLikelihoodRatio(oracle.prior_variances, z_enroll,
                                  {z_test.data(), oracle.dim()});
}

}  // namespace nda
