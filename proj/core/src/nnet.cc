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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kgx {
namespace {

void RequireSize(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(got) + " vs " +
                                std::to_string(want) + ")");
  }
}

double Activate(Activation act, double x) {
  switch (act) {
    case Activation::kIdentity:
      return x;
    case Activation::kRelu:
      return x > 0.0 ? x : 0.0;
    case Activation::kSigmoid:
      return Sigmoid(x);
  }
  return x;
}

// Derivative expressed through the post-activation value y.
double ActivationSlope(Activation act, double y) {
  switch (act) {
    case Activation::kIdentity:
      return 1.0;
    case Activation::kRelu:
      return y > 0.0 ? 1.0 : 0.0;
    case Activation::kSigmoid:
      return y * (1.0 - y);
  }
  return 1.0;
}

}  // namespace

std::string_view ActivationName(Activation act) {
  switch (act) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kRelu:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
  }
  return "identity";
}

Activation ParseActivation(std::string_view name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

DenseNet::DenseNet(std::size_t input_width, std::vector<LayerShape> layers)
    : input_width_(input_width), layers_(std::move(layers)) {
  std::size_t width = input_width_;
  std::size_t offset = 0;
  offsets_.reserve(layers_.size());
  for (const auto& layer : layers_) {
    if (layer.in != width || layer.out == 0) {
      throw std::invalid_argument("DenseNet: layer widths do not chain");
    }
    offsets_.push_back(offset);
    offset += layer.out * layer.in + layer.out;
    width = layer.out;
  }
  params_.assign(offset, 0.0);
}

DenseNet DenseNet::OneHidden(std::size_t in, std::size_t hidden,
                             std::size_t out, Activation hidden_act,
                             Activation output_act) {
  if (hidden == 0) return DenseNet(in, {{in, out, output_act}});
  return DenseNet(in, {{in, hidden, hidden_act}, {hidden, out, output_act}});
}

std::size_t DenseNet::output_width() const {
  return layers_.empty() ? input_width_ : layers_.back().out;
}

void DenseNet::InitGlorot(Rng& rng) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    double* w = params_.data() + WeightOffset(l);
    for (std::size_t i = 0; i < layer.out * layer.in; ++i) {
      w[i] = rng.uniform(-limit, limit);
    }
    std::fill_n(w + layer.out * layer.in, layer.out, 0.0);
  }
}

std::vector<double> DenseNet::Forward(std::span<const double> input) const {
  RequireSize(input.size(), input_width_, "DenseNet::Forward");
  std::vector<double> current(input.begin(), input.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const double* w = params_.data() + WeightOffset(l);
    const double* b = w + layer.out * layer.in;
    next.assign(layer.out, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double* row = w + r * layer.in;
      double acc = b[r];
      for (std::size_t c = 0; c < layer.in; ++c) acc += row[c] * current[c];
      next[r] = Activate(layer.activation, acc);
    }
    current.swap(next);
  }
  return current;
}

DenseNet::Trace DenseNet::ForwardTrace(std::span<const double> input) const {
  RequireSize(input.size(), input_width_, "DenseNet::ForwardTrace");
  Trace trace;
  trace.values.reserve(layers_.size() + 1);
  trace.values.emplace_back(input.begin(), input.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const double* w = params_.data() + WeightOffset(l);
    const double* b = w + layer.out * layer.in;
    const auto& x = trace.values.back();
    std::vector<double> y(layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double* row = w + r * layer.in;
      double acc = b[r];
      for (std::size_t c = 0; c < layer.in; ++c) acc += row[c] * x[c];
      y[r] = Activate(layer.activation, acc);
    }
    trace.values.push_back(std::move(y));
  }
  return trace;
}

std::vector<double> DenseNet::Backward(const Trace& trace,
                                       std::span<const double> grad_output,
                                       std::span<double> param_grads) const {
  RequireSize(trace.values.size(), layers_.size() + 1, "DenseNet::Backward");
  RequireSize(grad_output.size(), output_width(), "DenseNet::Backward");
  RequireSize(param_grads.size(), params_.size(), "DenseNet::Backward");
  std::vector<double> grad(grad_output.begin(), grad_output.end());
  std::vector<double> grad_in;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& layer = layers_[l];
    const auto& x = trace.values[l];
    const auto& y = trace.values[l + 1];
    const double* w = params_.data() + WeightOffset(l);
    double* gw = param_grads.data() + WeightOffset(l);
    double* gb = gw + layer.out * layer.in;
    grad_in.assign(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double delta = grad[r] * ActivationSlope(layer.activation, y[r]);
      if (delta == 0.0) continue;
      gb[r] += delta;
      const double* row = w + r * layer.in;
      double* grow = gw + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) {
        grow[c] += delta * x[c];
        grad_in[c] += delta * row[c];
      }
    }
    grad.swap(grad_in);
  }
  return grad;
}

DenseNet::Gradients DenseNet::Backward(
    std::span<const double> input, std::span<const double> grad_output) const {
  Gradients g;
  g.params.assign(params_.size(), 0.0);
  g.input = Backward(ForwardTrace(input), grad_output, g.params);
  return g;
}

double bce_loss(std::span<const double> predictions,
                std::span<const double> labels) {
  RequireSize(predictions.size(), labels.size(), "bce_loss");
  if (predictions.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double p =
        std::clamp(predictions[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    const double y = labels[i];
    total -= y * std::log(p) + (1.0 - y) * std::log1p(-p);
  }
  return total / static_cast<double>(predictions.size());
}

std::vector<double> bce_loss_grad(std::span<const double> predictions,
                                  std::span<const double> labels) {
  RequireSize(predictions.size(), labels.size(), "bce_loss_grad");
  std::vector<double> grad(predictions.size(), 0.0);
  const double n = static_cast<double>(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double p = predictions[i];
    if (p < kProbabilityClamp || p > 1.0 - kProbabilityClamp) continue;
    const double y = labels[i];
    grad[i] = (-y / p + (1.0 - y) / (1.0 - p)) / n;
  }
  return grad;
}

AdamState AdamState::For(std::size_t num_params, double lr, double beta1,
                         double beta2, double epsilon) {
  AdamState s;
  s.first_moment.assign(num_params, 0.0);
  s.second_moment.assign(num_params, 0.0);
  s.lr = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  return s;
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state) {
  RequireSize(grads.size(), params.size(), "adam_step");
  RequireSize(state.first_moment.size(), params.size(), "adam_step");
  RequireSize(state.second_moment.size(), params.size(), "adam_step");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g * g;
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

GradCheckResult CheckGradient(const std::function<double()>& loss,
                              std::span<double> params,
                              std::span<const double> analytic, double step,
                              double floor) {
  RequireSize(analytic.size(), params.size(), "CheckGradient");
  GradCheckResult result;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + step;
    const double up = loss();
    params[i] = saved - step;
    const double down = loss();
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double scale =
        std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    const double rel = std::abs(analytic[i] - numeric) / scale;
    if (rel > result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_index = i;
    }
    ++result.checked;
  }
  return result;
}

}  // namespace kgx
