// tests/unit/test_flow.cc

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

#include <cmath>

#include "doctest.h"
#include "nda/flow.h"
#include "nda/random.h"

using namespace nda;

namespace {

void Randomize(FlowModel *flow, std::uint64_t seed, double scale) {
  Rng rng(seed);
  for (double &p : flow->mutable_params()) p = rng.Uniform(-scale, scale);
}

RowMatrix Draw(Rng &rng, Eigen::Index n, Eigen::Index d) {
  RowMatrix x(n, d);
  for (auto &v : x.reshaped()) v = rng.Normal();
  return x;
}

// L = sum_r grad_z_r . z_r + grad_lj_r * log_j_r
double Loss(const FlowModel &flow, const RowMatrix &x, const RowMatrix &gz, const Vector &gl) {
  RowMatrix z;
  Vector lj;
  flow.InverseBatch(x, &z, &lj);
  return (z.array() * gz.array()).sum() + lj.dot(gl);
}

}  // namespace

TEST_CASE("fresh flow is the identity") {
  FlowModel flow = InitFlow(7, 5, 16, 3);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    Vector x(7);
    for (auto &v : x) v = 3.0 * rng.Normal();
    auto [z, lj] = flow.InverseWithLogdet({x.data(), 7});
    CHECK(z == x);
    CHECK(lj == 0.0);
    CHECK(flow.Forward({x.data(), 7}) == x);
  }
}

TEST_CASE("masks alternate between halves") {
  FlowModel flow = InitFlow(4, 2, 8, 0);
  CHECK(flow.layer(0).mask == std::vector<bool>{true, true, false, false});
  CHECK(flow.layer(1).mask == std::vector<bool>{false, false, true, true});
  FlowModel odd = InitFlow(5, 2, 8, 0);
  CHECK(odd.layer(0).pass.size() == 2);
  CHECK(odd.layer(1).pass.size() == 3);
}

TEST_CASE("parameter count follows the layer arithmetic") {
  const std::size_t h = 8;
  FlowModel flow = InitFlow(512, 10, h, 0);  // one hidden layer above dim 64
  CHECK(flow.param_count() == 10 * 2 * ((256 * h + h) + (h * 256 + 256)));
  FlowModel small = InitFlow(6, 3, 4, 0);  // two hidden layers
  CHECK(small.param_count() == 3 * 2 * ((3 * 4 + 4) + (4 * 4 + 4) + (4 * 3 + 3)));
}

TEST_CASE("constant log-scale layer halves the transformed coordinate") {
  CouplingSpec spec{{true, false}, {1}, 2.0};
  FlowModel flow(2, {spec});
  const CouplingLayer &layer = flow.layer(0);
  // zero weights, output bias chosen so that cap * tanh(bias) = ln 2
  flow.mutable_params()[layer.scale_net.bias_offset(1)] = std::atanh(std::log(2.0) / 2.0);
  const double x[] = {0.7, 3.0};
  auto [z, lj] = flow.InverseWithLogdet(x);
  CHECK(z(0) == 0.7);
  CHECK(z(1) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(lj == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  Vector fwd = flow.Forward(x);
  CHECK(fwd(1) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("log-det matches a finite-difference Jacobian") {
  Rng rng(4);
  for (int draw = 0; draw < 10; ++draw) {
    const std::size_t d = 2 + draw % 5;
    FlowModel flow = InitFlow(d, 3, 6, static_cast<std::uint64_t>(draw));
    Randomize(&flow, 100 + draw, 0.5);
    Vector x(static_cast<Eigen::Index>(d));
    for (auto &v : x) v = rng.Normal();
    const double lj = flow.InverseWithLogdet({x.data(), d}).second;
    Matrix jac(d, d);
    const double h = 1e-6;
    for (std::size_t k = 0; k < d; ++k) {
      Vector p = x, m = x;
      p(static_cast<Eigen::Index>(k)) += h;
      m(static_cast<Eigen::Index>(k)) -= h;
      jac.col(static_cast<Eigen::Index>(k)) =
          (flow.InverseWithLogdet({p.data(), d}).first - flow.InverseWithLogdet({m.data(), d}).first) /
          (2 * h);
    }
    CHECK(std::exp(lj) == doctest::Approx(std::abs(jac.determinant())).epsilon(1e-4));
  }
}

TEST_CASE("round trip and volume consistency") {
  FlowModel flow = InitFlow(12, 6, 16, 9);
  Randomize(&flow, 9, 0.3);
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    Vector x(12);
    for (auto &v : x) v = 2.0 * rng.Normal();
    auto [z, lj] = flow.InverseWithLogdet({x.data(), 12});
    auto [back, lf] = flow.ForwardWithLogdet({z.data(), 12});
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(lj + lf) < 1e-10);
  }
}

TEST_CASE("backprop matches finite differences for every parameter and input") {
  FlowOptions options;
  options.hidden_layers = 2;
  FlowModel flow = InitFlow(4, 4, 8, 2, options);
  Randomize(&flow, 21, 0.4);
  Rng rng(22);
  RowMatrix x = Draw(rng, 16, 4), gz = Draw(rng, 16, 4);
  Vector gl(16);
  for (auto &v : gl) v = rng.Normal();
  FlowGrads g = flow.Backprop(x, gz, gl);
  REQUIRE(g.params.size() == flow.param_count());
  const double h = 1e-5;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < flow.param_count(); ++i) {
    FlowModel p = flow, m = flow;
    p.mutable_params()[i] += h;
    m.mutable_params()[i] -= h;
    const double fd = (Loss(p, x, gz, gl) - Loss(m, x, gz, gl)) / (2 * h);
    const double err = std::abs(fd - g.params[i]);
    if (err > std::max(1e-4 * std::max(std::abs(fd), std::abs(g.params[i])), 1e-7)) ++bad;
  }
  CHECK(bad == 0);
  for (Eigen::Index r = 0; r < 16; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) {
      RowMatrix p = x, m = x;
      p(r, c) += h;
      m(r, c) -= h;
      const double fd = (Loss(flow, p, gz, gl) - Loss(flow, m, gz, gl)) / (2 * h);
      CHECK(std::abs(fd - g.x(r, c)) <= std::max(1e-4 * std::abs(fd), 1e-7));
    }
}

TEST_CASE("backprop is linear in the upstream gradient and additive over rows") {
  FlowModel flow = InitFlow(6, 3, 8, 5);
  Randomize(&flow, 5, 0.3);
  Rng rng(7);
  RowMatrix x = Draw(rng, 3, 6), gz = Draw(rng, 3, 6);
  Vector gl(3);
  gl << 0.5, -1.0, 2.0;
  FlowGrads zero = flow.Backprop(x, RowMatrix::Zero(3, 6), Vector::Zero(3));
  for (double v : zero.params) CHECK(v == 0.0);

  RowMatrix one = x.topRows(1), two(2, 6);
  two << x.row(0), x.row(0);
  RowMatrix gz1 = gz.topRows(1), gz2(2, 6);
  gz2 << gz.row(0), gz.row(0);
  FlowGrads a = flow.Backprop(one, gz1, gl.head(1));
  FlowGrads b = flow.Backprop(two, gz2, Vector::Constant(2, gl(0)));
  for (std::size_t i = 0; i < a.params.size(); ++i) CHECK(b.params[i] == 2.0 * a.params[i]);
}

TEST_CASE("recorded tape and direct backprop agree bit for bit") {
  FlowModel flow = InitFlow(8, 4, 8, 1);
  Randomize(&flow, 1, 0.3);
  Rng rng(3);
  RowMatrix x = Draw(rng, 5, 8), gz = Draw(rng, 5, 8);
  Vector gl = Vector::Ones(5);
  FlowTape tape = flow.Record(x);
  RowMatrix z;
  Vector lj;
  flow.InverseBatch(x, &z, &lj);
  CHECK(tape.z() == z);
  CHECK(tape.log_j() == lj);
  CHECK(flow.Backprop(tape, gz, gl).params == flow.Backprop(x, gz, gl).params);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(InitFlow(1, 2, 4, 0), InputError);
  CHECK_THROWS_AS(FlowModel(3, {CouplingSpec{{true, true, true}, {4}, 2.0}}), InputError);
  CHECK_THROWS_AS(FlowModel(2, {CouplingSpec{{true, false}, {4}, 0.0}}), InputError);
  FlowModel flow = InitFlow(4, 2, 4, 0);
  const double x[] = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(flow.InverseWithLogdet(x), InputError);
}

TEST_CASE("pathological parameters raise a numerical error naming the layer") {
  FlowModel flow = InitFlow(2, 1, 2, 0);
  for (double &p : flow.mutable_params()) p = 1e308;
  const double x[] = {1e308, 1e308};
  CHECK_THROWS_AS(flow.InverseWithLogdet(x), NumericalError);
}
