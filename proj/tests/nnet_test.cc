// Copyright 2026 The kgx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kgx/nnet.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "oracles.h"

namespace kgx {
namespace {

DenseNet RandomNet(std::size_t in, std::vector<LayerShape> layers,
                   std::uint64_t seed) {
  DenseNet net(in, std::move(layers));
  Rng rng(seed);
  for (double& p : net.params()) p = rng.uniform(-1.0, 1.0);
  return net;
}

TEST(DenseNet, ForwardMatchesReference) {
  Rng rng(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DenseNet net = RandomNet(4,
                             {{4, 6, Activation::kRelu},
                              {6, 5, Activation::kIdentity},
                              {5, 3, Activation::kSigmoid}},
                             seed);
    std::vector<double> x(4);
    for (double& v : x) v = rng.normal();
    const auto got = net.Forward(x);
    const auto want = oracle::ReferenceForward(net, x);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(DenseNet, EmptyNetIsIdentity) {
  DenseNet net(3, {});
  const std::vector<double> x = {1.0, -2.0, 0.5};
  EXPECT_EQ(net.Forward(x), x);
  EXPECT_EQ(net.output_width(), 3u);
}

TEST(DenseNet, RejectsBrokenChain) {
  EXPECT_THROW(DenseNet(3, {{3, 4, Activation::kRelu}, {5, 1, Activation::kIdentity}}),
               std::invalid_argument);
}

TEST(DenseNet, GlorotBoundsAndZeroBias) {
  DenseNet net = DenseNet::OneHidden(10, 6, 2, Activation::kRelu, Activation::kSigmoid);
  Rng rng(1);
  net.InitGlorot(rng);
  const auto p = net.params();
  const double b1 = std::sqrt(6.0 / 16.0);
  for (std::size_t i = 0; i < 60; ++i) EXPECT_LE(std::abs(p[i]), b1);
  for (std::size_t i = 60; i < 66; ++i) EXPECT_EQ(p[i], 0.0);
}

TEST(DenseNet, BackwardMatchesFiniteDifferences) {
  Rng rng(9);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DenseNet net = RandomNet(3,
                             {{3, 5, Activation::kSigmoid},
                              {5, 4, Activation::kIdentity},
                              {4, 2, Activation::kSigmoid}},
                             seed);
    std::vector<double> x(3);
    for (double& v : x) v = rng.normal();
    const std::vector<double> w = {0.7, -1.3};
    auto loss = [&] {
      const auto y = net.Forward(x);
      return w[0] * y[0] + w[1] * y[1];
    };
    const auto g = net.Backward(x, w);
    const auto np = oracle::NumericGradient(loss, net.params());
    EXPECT_LT(oracle::MaxRelativeError(g.params, np), 1e-5);
    const auto nx = oracle::NumericGradient(loss, x);
    EXPECT_LT(oracle::MaxRelativeError(g.input, nx), 1e-5);
  }
}

TEST(Bce, KnownValuesAndClamp) {
  const std::vector<double> p = {0.9, 0.2};
  const std::vector<double> y = {1.0, 0.0};
  EXPECT_NEAR(bce_loss(p, y), -(std::log(0.9) + std::log(0.8)) / 2.0, 1e-12);
  const std::vector<double> extreme = {0.0};
  const std::vector<double> one = {1.0};
  EXPECT_NEAR(bce_loss(extreme, one), -std::log(kProbabilityClamp), 1e-9);
  EXPECT_EQ(bce_loss_grad(extreme, one)[0], 0.0);
}

TEST(Bce, GradientMatchesFiniteDifferences) {
  std::vector<double> p = {0.3, 0.6, 0.95};
  const std::vector<double> y = {1.0, 0.0, 1.0};
  const auto g = bce_loss_grad(p, y);
  const auto n = oracle::NumericGradient([&] { return bce_loss(p, y); }, p, 1e-7);
  EXPECT_LT(oracle::MaxRelativeError(g, n), 1e-6);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<double> params = {1.0, -1.0, 0.0};
  const std::vector<double> grads = {0.5, -2.0, 0.0};
  AdamState s = AdamState::For(3, 0.01);
  adam_step(params, grads, s);
  EXPECT_NEAR(params[0], 0.99, 1e-8);
  EXPECT_NEAR(params[1], -0.99, 1e-8);
  EXPECT_EQ(params[2], 0.0);
  EXPECT_EQ(s.step, 1u);
}

TEST(Adam, MinimizesQuadratic) {
  std::vector<double> x = {3.0, -4.0};
  AdamState s = AdamState::For(2, 0.05);
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> g = {2.0 * (x[0] - 1.0), 2.0 * (x[1] + 2.0)};
    adam_step(x, g, s);
  }
  EXPECT_NEAR(x[0], 1.0, 1e-3);
  EXPECT_NEAR(x[1], -2.0, 1e-3);
}

TEST(CheckGradient, FlagsWrongGradient) {
  std::vector<double> x = {1.5, -0.5};
  auto loss = [&] { return x[0] * x[0] + 3.0 * x[1]; };
  const std::vector<double> right = {3.0, 3.0};
  const std::vector<double> wrong = {3.0, 2.0};
  EXPECT_LT(CheckGradient(loss, x, right).max_relative_error, 1e-8);
  const auto bad = CheckGradient(loss, x, wrong);
  EXPECT_GT(bad.max_relative_error, 0.1);
  EXPECT_EQ(bad.worst_index, 1u);
  EXPECT_EQ(x[0], 1.5);
}

TEST(Activation, NamesRoundTrip) {
  for (auto a : {Activation::kIdentity, Activation::kRelu, Activation::kSigmoid}) {
    EXPECT_EQ(ParseActivation(ActivationName(a)), a);
  }
  EXPECT_THROW(ParseActivation("tanh"), std::invalid_argument);
}

TEST(DenseNet, IdentityAndZeroWeightLayers) {
  DenseNet id(3, {{3, 3, Activation::kIdentity}});
  for (std::size_t i = 0; i < 3; ++i) id.params()[i * 3 + i] = 1.0;
  const std::vector<double> x = {0.3, -2.0, 7.5};
  EXPECT_EQ(id.Forward(x), x);
  DenseNet zero(3, {{3, 2, Activation::kSigmoid}});
  EXPECT_EQ(zero.Forward(x), (std::vector<double>{0.5, 0.5}));
}

TEST(DenseNet, ForwardIsPure) {
  DenseNet net = RandomNet(3, {{3, 4, Activation::kRelu}, {4, 2, Activation::kSigmoid}}, 3);
  const std::vector<double> x = {0.1, 0.2, -0.3};
  const auto a = net.Forward(x);
  const auto b = net.Forward(x);
  EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0);
}

TEST(DenseNet, LinearLayerInputGradientIsTransposeProduct) {
  DenseNet net = RandomNet(3, {{3, 2, Activation::kIdentity}}, 8);
  const std::vector<double> x = {1.0, 2.0, 3.0};
  const std::vector<double> g = {0.5, -1.0};
  const auto grads = net.Backward(x, g);
  const auto w = net.params();
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_NEAR(grads.input[c], w[c] * g[0] + w[3 + c] * g[1], 1e-15);
  }
  const auto none = net.Backward(x, std::vector<double>{0.0, 0.0});
  for (double v : none.params) EXPECT_EQ(v, 0.0);
  for (double v : none.input) EXPECT_EQ(v, 0.0);
}

TEST(DenseNet, SmallNetPassesLibraryGradientCheck) {
  DenseNet net = RandomNet(4, {{4, 5, Activation::kSigmoid}, {5, 1, Activation::kSigmoid}}, 21);
  const std::vector<double> x = {0.4, -0.1, 0.9, -1.2};
  const std::vector<double> y = {1.0};
  auto loss = [&] { return bce_loss(net.Forward(x), y); };
  const auto out = net.Forward(x);
  const auto g = net.Backward(x, bce_loss_grad(out, y));
  EXPECT_LT(CheckGradient(loss, net.params(), g.params, 1e-4).max_relative_error, 1e-4);
}

TEST(Bce, DegenerateValues) {
  EXPECT_NEAR(bce_loss(std::vector<double>{0.5}, std::vector<double>{1.0}), std::log(2.0), 1e-15);
  EXPECT_NEAR(bce_loss(std::vector<double>{1.0 - 1e-7}, std::vector<double>{1.0}), 1e-7, 1e-12);
  EXPECT_NEAR(bce_loss(std::vector<double>{0.9, 0.2}, std::vector<double>{1.0, 0.0}), 0.16425, 1e-5);
}

TEST(Adam, ZeroGradientDecaysMoments) {
  std::vector<double> p = {1.0};
  AdamState s = AdamState::For(1, 0.1);
  adam_step(p, std::vector<double>{2.0}, s);
  const double after_first = p[0];
  const double m = s.first_moment[0], v = s.second_moment[0];
  adam_step(p, std::vector<double>{0.0}, s);
  EXPECT_DOUBLE_EQ(s.first_moment[0], 0.9 * m);
  EXPECT_DOUBLE_EQ(s.second_moment[0], 0.999 * v);
  // The decayed first moment still moves the parameter; only a zero moment
  // leaves it unchanged.
  std::vector<double> q = {1.0};
  AdamState fresh = AdamState::For(1, 0.1);
  adam_step(q, std::vector<double>{0.0}, fresh);
  EXPECT_EQ(q[0], 1.0);
  EXPECT_LT(p[0], after_first);
}

TEST(Adam, ScalarTraceMatchesReference) {
  const std::vector<double> grads = {0.3, -1.2, 0.05};
  double x = 0.7, m = 0.0, v = 0.0;
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  std::vector<double> p = {0.7};
  AdamState s = AdamState::For(1, lr, b1, b2, eps);
  for (int t = 1; t <= 3; ++t) {
    const double g = grads[t - 1];
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    x -= lr * mh / (std::sqrt(vh) + eps);
    adam_step(p, std::vector<double>{g}, s);
    EXPECT_NEAR(p[0], x, 1e-15);
  }
}

}  // namespace
}  // namespace kgx
