#pragma once

#include "wavecast/random.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

/// Dense f64 tensors with reverse-mode differentiation over a dynamically
/// recorded graph. Every op returns a new node; parents are held by
/// shared_ptr so the graph lives exactly as long as its outputs.
namespace wavecast::nn {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void()> backward;  // empty for leaves

  void ensure_grad() {
    if (grad.empty()) grad.assign(data.size(), 0.0);
  }
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<double> data, bool requires_grad = false);
  static Tensor scalar(double value);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t size() const { return node_->data.size(); }

  std::span<const double> data() const { return node_->data; }
  std::span<double> mutable_data() { return node_->data; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  bool requires_grad() const { return node_->requires_grad; }
  double item() const;
  void zero_grad();

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& handle() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// While alive, ops on this thread record no graph.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

/// Reverse accumulation from a scalar loss into every reachable leaf that
/// requires a gradient. Leaf gradients accumulate across calls.
void backward(const Tensor& loss);

enum class Padding { Same, Valid };

Tensor matmul(const Tensor& a, const Tensor& b);
/// x [N x in] * w [in x out] + b [out].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor sum(const Tensor& a);
Tensor mse_loss(const Tensor& prediction, const Tensor& target);
Tensor reshape(const Tensor& a, Shape shape);
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
/// Drops `axis`, keeping slice `index`.
Tensor select(const Tensor& a, std::size_t axis, std::size_t index);
/// Multiplies every element of leading-axis slice i by weights[i] (a constant).
Tensor scale_rows(const Tensor& a, std::span<const double> weights);

/// Cross-correlation, stride 1. input [C x H x W] or [N x C x H x W],
/// kernels [Cout x Cin x kH x kW], bias [Cout] (optional).
Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias, Padding padding);
/// Stride-1 max pooling; padded cells never win. Ties route to the first
/// cell in row-major window order.
Tensor maxpool2d(const Tensor& input, std::size_t size, Padding padding);
/// Mean over the two trailing spatial axes.
Tensor global_avg_pool(const Tensor& input);
/// Inverted dropout; identity when !training or rate == 0.
Tensor dropout(const Tensor& input, double rate, bool training, Rng& rng);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }

}  // namespace wavecast::nn
