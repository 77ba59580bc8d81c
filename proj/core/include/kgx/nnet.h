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

// Dense feed-forward networks with hand-written reverse mode, binary
// cross-entropy, Adam, and a central-difference gradient checker.

#ifndef KGX_NNET_H_
#define KGX_NNET_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "kgx/random.h"

namespace kgx {

enum class Activation { kIdentity, kRelu, kSigmoid };

std::string_view ActivationName(Activation act);
Activation ParseActivation(std::string_view name);

double Sigmoid(double x);

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::kIdentity;

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

// A stack of affine layers. Parameters live in one flat vector, layer by
// layer, each as a row-major [out x in] weight block followed by [out]
// biases, so optimizers and checkpoints can treat them as a single span.
// A net with no layers is the identity map on `input_width`.
class DenseNet {
 public:
  // Activations recorded by ForwardTrace; `values[0]` is the input and
  // `values[l + 1]` the post-activation output of layer l.
  struct Trace {
    std::vector<std::vector<double>> values;
    std::span<const double> output() const { return values.back(); }
  };

  struct Gradients {
    std::vector<double> params;
    std::vector<double> input;
  };

  DenseNet() = default;
  // All parameters start at zero. Throws std::invalid_argument if adjacent
  // layer widths do not chain.
  DenseNet(std::size_t input_width, std::vector<LayerShape> layers);

  // in -> hidden (hidden_act) -> out (output_act); hidden == 0 gives a single
  // affine layer.
  static DenseNet OneHidden(std::size_t in, std::size_t hidden,
                            std::size_t out, Activation hidden_act,
                            Activation output_act);

  std::size_t input_width() const { return input_width_; }
  std::size_t output_width() const;
  std::size_t num_layers() const { return layers_.size(); }
  const std::vector<LayerShape>& layers() const { return layers_; }

  std::size_t num_params() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  // Uniform in +-sqrt(6 / (fan_in + fan_out)) for weights, zero biases.
  void InitGlorot(Rng& rng);

  std::vector<double> Forward(std::span<const double> input) const;
  Trace ForwardTrace(std::span<const double> input) const;

  // Reverse pass for d(loss)/d(output) = grad_output. Parameter gradients are
  // added into `param_grads` (length num_params()); the gradient with respect
  // to the input is returned.
  std::vector<double> Backward(const Trace& trace,
                               std::span<const double> grad_output,
                               std::span<double> param_grads) const;

  Gradients Backward(std::span<const double> input,
                     std::span<const double> grad_output) const;

  friend bool operator==(const DenseNet&, const DenseNet&) = default;

 private:
  std::size_t WeightOffset(std::size_t layer) const { return offsets_[layer]; }

  std::size_t input_width_ = 0;
  std::vector<LayerShape> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

inline constexpr double kProbabilityClamp = 1e-7;

// Mean of -[y ln p + (1-y) ln(1-p)] with p clamped to [eps, 1-eps].
double bce_loss(std::span<const double> predictions,
                std::span<const double> labels);

// d(bce_loss)/d(predictions); zero wherever the clamp is active.
std::vector<double> bce_loss_grad(std::span<const double> predictions,
                                  std::span<const double> labels);

struct AdamState {
  std::size_t step = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState For(std::size_t num_params, double lr = 1e-3,
                       double beta1 = 0.9, double beta2 = 0.999,
                       double epsilon = 1e-8);
};

// One bias-corrected Adam update of `params` in place.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

// Compares `analytic` against central differences of `loss` taken by
// perturbing each entry of `params` by +-step. The relative error of one
// entry is |a - n| / max(|a|, |n|, floor).
GradCheckResult CheckGradient(const std::function<double()>& loss,
                              std::span<double> params,
                              std::span<const double> analytic,
                              double step = 1e-4, double floor = 1e-6);

}  // namespace kgx

#endif  // KGX_NNET_H_
