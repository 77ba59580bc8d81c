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

#include "kgx/detector.h"

#include <stdexcept>

namespace kgx {

DetectorBank DetectorBank::Create(std::size_t raw_width, std::size_t dim_e,
                                  std::size_t trunk_hidden,
                                  std::size_t head_hidden,
                                  const Vocabulary& vocab, Rng& rng) {
  DetectorBank bank;
  if (trunk_hidden == 0) {
    if (raw_width != dim_e) {
      throw std::invalid_argument(
          "identity trunk requires raw width == dim_e");
    }
    bank.trunk = DenseNet(raw_width, {});
  } else {
    bank.trunk = DenseNet::OneHidden(raw_width, trunk_hidden, dim_e,
                                     Activation::kRelu, Activation::kIdentity);
  }
  auto head = [&](std::size_t out) {
    return DenseNet::OneHidden(dim_e, head_hidden, out, Activation::kRelu,
                               Activation::kSigmoid);
  };
  bank.individuals = head(vocab.num_individuals());
  bank.classes = head(vocab.num_unary());
  bank.relations = head(vocab.num_binary());
  for (DenseNet* net :
       {&bank.trunk, &bank.individuals, &bank.classes, &bank.relations}) {
    net->InitGlorot(rng);
  }
  return bank;
}

DetectionOutput DetectFromTrunk(const DetectorBank& bank,
                                std::span<const double> trunk_output) {
  return DetectionOutput{bank.individuals.Forward(trunk_output),
                         bank.classes.Forward(trunk_output),
                         bank.relations.Forward(trunk_output)};
}

DetectionOutput detect(const DetectorBank& bank,
                       std::span<const double> encoding) {
  return DetectFromTrunk(bank, bank.trunk.Forward(encoding));
}

PresenceTargets presence_targets(const Example& example,
                                 std::size_t num_individuals,
                                 std::size_t num_classes,
                                 std::size_t num_relations) {
  PresenceTargets t{std::vector<double>(num_individuals, 0.0),
                    std::vector<double>(num_classes, 0.0),
                    std::vector<double>(num_relations, 0.0)};
  for (const auto& f : example.positives) {
    t.individuals.at(f.subject) = 1.0;
    if (f.is_unary()) {
      t.classes.at(f.predicate) = 1.0;
    } else {
      t.individuals.at(f.object) = 1.0;
      t.relations.at(f.predicate) = 1.0;
    }
  }
  return t;
}

double detector_loss(const DetectionOutput& out, const Example& example) {
  const auto t = presence_targets(example, out.individuals.size(),
                                  out.classes.size(), out.relations.size());
  return bce_loss(out.individuals, t.individuals) +
         bce_loss(out.classes, t.classes) +
         bce_loss(out.relations, t.relations);
}

DetectorGradients DetectorGradients::ZerosLike(const DetectorBank& bank) {
  return DetectorGradients{
      std::vector<double>(bank.trunk.num_params(), 0.0),
      std::vector<double>(bank.individuals.num_params(), 0.0),
      std::vector<double>(bank.classes.num_params(), 0.0),
      std::vector<double>(bank.relations.num_params(), 0.0)};
}

void DetectorGradients::Scale(double factor) {
  for (auto* v : {&trunk, &individuals, &classes, &relations}) {
    for (double& x : *v) x *= factor;
  }
}

double DetectorLossAndGrad(const DetectorBank& bank, const Example& example,
                           double weight, DetectorGradients& grads) {
  const auto trunk_trace = bank.trunk.ForwardTrace(example.encoding);
  const auto z = trunk_trace.output();
  const auto t = presence_targets(example, bank.individuals.output_width(),
                                  bank.classes.output_width(),
                                  bank.relations.output_width());

  std::vector<double> grad_z(z.size(), 0.0);
  double loss = 0.0;
  auto head = [&](const DenseNet& net, const std::vector<double>& target,
                  std::vector<double>& net_grads) {
    const auto trace = net.ForwardTrace(z);
    const auto out = trace.output();
    loss += bce_loss(out, target);
    auto g = bce_loss_grad(out, target);
    for (double& x : g) x *= weight;
    const auto gz = net.Backward(trace, g, net_grads);
    for (std::size_t i = 0; i < gz.size(); ++i) grad_z[i] += gz[i];
  };
  head(bank.individuals, t.individuals, grads.individuals);
  head(bank.classes, t.classes, grads.classes);
  head(bank.relations, t.relations, grads.relations);
  bank.trunk.Backward(trunk_trace, grad_z, grads.trunk);
  return loss;
}

}  // namespace kgx
