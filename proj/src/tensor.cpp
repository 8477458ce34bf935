#include "wavecast/tensor.hpp"

#include "wavecast/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace wavecast::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapR = Eigen::Map<RowMat>;
using CMapR = Eigen::Map<const RowMat>;
using MapV = Eigen::Map<Eigen::VectorXd>;
using CMapV = Eigen::Map<const Eigen::VectorXd>;

thread_local bool g_grad_enabled = true;

[[noreturn]] void shape_error(const std::string& op, const std::string& detail) {
  throw Error(ErrorKind::ShapeMismatch, op + ": " + detail);
}

void check_finite(const std::vector<double>& data, const char* op) {
  for (double v : data)
    if (!std::isfinite(v))
      throw Error(ErrorKind::NonFiniteValue, std::string("non-finite output from ") + op);
}

bool needs_grad(std::initializer_list<const Tensor*> inputs) {
  if (!g_grad_enabled) return false;
  for (const Tensor* t : inputs)
    if (t->defined() && t->requires_grad()) return true;
  return false;
}

/// Creates the output node. The backward closure receives the output node
/// and is only stored when a parent needs a gradient.
template <typename Backward>
Tensor make_result(Shape shape, std::vector<double> data, const char* op,
                   std::initializer_list<const Tensor*> parents, Backward&& backward_fn) {
  check_finite(data, op);
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  if (needs_grad(parents)) {
    node->requires_grad = true;
    for (const Tensor* p : parents)
      if (p->defined()) node->parents.push_back(p->handle());
    Node* self = node.get();
    node->backward = [self, fn = std::forward<Backward>(backward_fn)]() mutable { fn(*self); };
  }
  return Tensor(std::move(node));
}

bool wants(const Tensor& t) { return t.defined() && t.requires_grad(); }

std::span<double> grad_of(const Tensor& t) {
  t.node()->ensure_grad();
  return t.node()->grad;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    shape_error(op, shape_string(a.shape()) + " vs " + shape_string(b.shape()));
}

template <typename F, typename DF>
Tensor unary(const Tensor& a, const char* op, F f, DF df_from_output) {
  std::vector<double> out(a.size());
  auto in = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return make_result(a.shape(), std::move(out), op, {&a}, [a, df_from_output](Node& self) {
    auto g = grad_of(a);
    auto x = a.data();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * df_from_output(x[i], self.data[i]);
  });
}

struct Strides {
  std::size_t outer = 1, dim = 1, inner = 1;
};

Strides strides_around(const Shape& shape, std::size_t axis) {
  Strides s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.dim = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

struct ConvGeometry {
  std::size_t batch, cin, h, w, cout, kh, kw, pad_h, pad_w, out_h, out_w;
  bool batched;
};

void im2col(const double* input, const ConvGeometry& g, double* cols) {
  const std::size_t plane = g.out_h * g.out_w;
  for (std::size_t c = 0; c < g.cin; ++c)
    for (std::size_t i = 0; i < g.kh; ++i)
      for (std::size_t j = 0; j < g.kw; ++j) {
        double* row = cols + ((c * g.kh + i) * g.kw + j) * plane;
        for (std::size_t y = 0; y < g.out_h; ++y) {
          const long sy = static_cast<long>(y + i) - static_cast<long>(g.pad_h);
          for (std::size_t x = 0; x < g.out_w; ++x) {
            const long sx = static_cast<long>(x + j) - static_cast<long>(g.pad_w);
            row[y * g.out_w + x] = (sy >= 0 && sy < static_cast<long>(g.h) && sx >= 0 &&
                                    sx < static_cast<long>(g.w))
                                       ? input[(c * g.h + static_cast<std::size_t>(sy)) * g.w +
                                               static_cast<std::size_t>(sx)]
                                       : 0.0;
          }
        }
      }
}

void col2im_add(const double* cols, const ConvGeometry& g, double* input_grad) {
  const std::size_t plane = g.out_h * g.out_w;
  for (std::size_t c = 0; c < g.cin; ++c)
    for (std::size_t i = 0; i < g.kh; ++i)
      for (std::size_t j = 0; j < g.kw; ++j) {
        const double* row = cols + ((c * g.kh + i) * g.kw + j) * plane;
        for (std::size_t y = 0; y < g.out_h; ++y) {
          const long sy = static_cast<long>(y + i) - static_cast<long>(g.pad_h);
          if (sy < 0 || sy >= static_cast<long>(g.h)) continue;
          for (std::size_t x = 0; x < g.out_w; ++x) {
            const long sx = static_cast<long>(x + j) - static_cast<long>(g.pad_w);
            if (sx < 0 || sx >= static_cast<long>(g.w)) continue;
            input_grad[(c * g.h + static_cast<std::size_t>(sy)) * g.w + static_cast<std::size_t>(sx)] +=
                row[y * g.out_w + x];
          }
        }
      }
}

}  // namespace

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = numel(shape);
  return from_data(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data, bool requires_grad) {
  if (numel(shape) != data.size())
    shape_error("from_data", shape_string(shape) + " needs " + std::to_string(numel(shape)) +
                                 " values, got " + std::to_string(data.size()));
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value) { return from_data({1}, {value}); }

double Tensor::item() const {
  if (size() != 1) shape_error("item", "tensor has " + std::to_string(size()) + " elements");
  return node_->data[0];
}

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

void backward(const Tensor& loss) {
  if (loss.size() != 1) shape_error("backward", "loss must be a scalar");
  if (!loss.requires_grad())
    throw Error(ErrorKind::DisconnectedGraph, "loss does not depend on any parameter");

  // Iterative post-order DFS gives parents before children.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{loss.node(), 0}};
  visited.insert(loss.node());
  bool reached_leaf = false;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.push_back({parent, 0});
    } else {
      if (!node->backward) reached_leaf = true;
      order.push_back(node);
      stack.pop_back();
    }
  }
  if (!reached_leaf) throw Error(ErrorKind::DisconnectedGraph, "no parameter reachable from loss");

  loss.node()->ensure_grad();
  loss.node()->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward && !node->grad.empty()) node->backward();
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
    shape_error("matmul", shape_string(a.shape()) + " * " + shape_string(b.shape()));
  const auto m = static_cast<Eigen::Index>(a.dim(0));
  const auto k = static_cast<Eigen::Index>(a.dim(1));
  const auto n = static_cast<Eigen::Index>(b.dim(1));
  std::vector<double> out(static_cast<std::size_t>(m * n));
  MapR(out.data(), m, n).noalias() = CMapR(a.data().data(), m, k) * CMapR(b.data().data(), k, n);
  return make_result({a.dim(0), b.dim(1)}, std::move(out), "matmul", {&a, &b},
                     [a, b, m, k, n](Node& self) {
                       CMapR g(self.grad.data(), m, n);
                       if (wants(a))
                         MapR(grad_of(a).data(), m, k).noalias() +=
                             g * CMapR(b.data().data(), k, n).transpose();
                       if (wants(b))
                         MapR(grad_of(b).data(), k, n).noalias() +=
                             CMapR(a.data().data(), m, k).transpose() * g;
                     });
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.rank() != 2 || w.rank() != 2 || x.dim(1) != w.dim(0) || b.size() != w.dim(1))
    shape_error("linear", shape_string(x.shape()) + " * " + shape_string(w.shape()) + " + " +
                              shape_string(b.shape()));
  const auto m = static_cast<Eigen::Index>(x.dim(0));
  const auto k = static_cast<Eigen::Index>(x.dim(1));
  const auto n = static_cast<Eigen::Index>(w.dim(1));
  std::vector<double> out(static_cast<std::size_t>(m * n));
  MapR o(out.data(), m, n);
  o.noalias() = CMapR(x.data().data(), m, k) * CMapR(w.data().data(), k, n);
  o.rowwise() += CMapV(b.data().data(), n).transpose();
  return make_result({x.dim(0), w.dim(1)}, std::move(out), "linear", {&x, &w, &b},
                     [x, w, b, m, k, n](Node& self) {
                       CMapR g(self.grad.data(), m, n);
                       if (wants(x))
                         MapR(grad_of(x).data(), m, k).noalias() +=
                             g * CMapR(w.data().data(), k, n).transpose();
                       if (wants(w))
                         MapR(grad_of(w).data(), k, n).noalias() +=
                             CMapR(x.data().data(), m, k).transpose() * g;
                       if (wants(b)) MapV(grad_of(b).data(), n) += g.colwise().sum().transpose();
                     });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return make_result(a.shape(), std::move(out), "add", {&a, &b}, [a, b](Node& self) {
    for (const Tensor* t : {&a, &b})
      if (wants(*t)) {
        auto g = grad_of(*t);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
      }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return make_result(a.shape(), std::move(out), "sub", {&a, &b}, [a, b](Node& self) {
    if (wants(a)) {
      auto g = grad_of(a);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants(b)) {
      auto g = grad_of(b);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return make_result(a.shape(), std::move(out), "mul", {&a, &b}, [a, b](Node& self) {
    if (wants(a)) {
      auto g = grad_of(a);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * b.data()[i];
    }
    if (wants(b)) {
      auto g = grad_of(b);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * a.data()[i];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * factor;
  return make_result(a.shape(), std::move(out), "scale", {&a}, [a, factor](Node& self) {
    auto g = grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * factor;
  });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, "sigmoid", [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& a) {
  return unary(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.data()) total += v;
  return make_result({1}, {total}, "sum", {&a}, [a](Node& self) {
    auto g = grad_of(a);
    for (double& v : g) v += self.grad[0];
  });
}

Tensor mse_loss(const Tensor& prediction, const Tensor& target) {
  if (prediction.size() != target.size() || prediction.size() == 0)
    shape_error("mse_loss", shape_string(prediction.shape()) + " vs " + shape_string(target.shape()));
  const std::size_t n = prediction.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = prediction.data()[i] - target.data()[i];
    total += d * d;
  }
  return make_result({1}, {total / static_cast<double>(n)}, "mse_loss", {&prediction, &target},
                     [prediction, target, n](Node& self) {
                       const double scale = 2.0 * self.grad[0] / static_cast<double>(n);
                       if (wants(prediction)) {
                         auto g = grad_of(prediction);
                         for (std::size_t i = 0; i < n; ++i)
                           g[i] += scale * (prediction.data()[i] - target.data()[i]);
                       }
                       if (wants(target)) {
                         auto g = grad_of(target);
                         for (std::size_t i = 0; i < n; ++i)
                           g[i] -= scale * (prediction.data()[i] - target.data()[i]);
                       }
                     });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (numel(shape) != a.size())
    shape_error("reshape", shape_string(a.shape()) + " -> " + shape_string(shape));
  std::vector<double> out(a.data().begin(), a.data().end());
  return make_result(std::move(shape), std::move(out), "reshape", {&a}, [a](Node& self) {
    auto g = grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) shape_error("concat", "no inputs");
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) shape_error("concat", "axis out of range");
  Shape shape = first;
  shape[axis] = 0;
  for (const Tensor& p : parts) {
    Shape probe = p.shape();
    if (probe.size() != first.size()) shape_error("concat", "rank mismatch");
    shape[axis] += probe[axis];
    probe[axis] = first[axis];
    if (probe != first) shape_error("concat", shape_string(p.shape()) + " vs " + shape_string(first));
  }
  const Strides out_s = strides_around(shape, axis);
  std::vector<double> out(numel(shape));
  std::size_t offset = 0;
  std::vector<std::size_t> offsets;
  for (const Tensor& p : parts) {
    const Strides s = strides_around(p.shape(), axis);
    const std::size_t block = s.dim * s.inner;
    for (std::size_t o = 0; o < s.outer; ++o)
      std::copy_n(p.data().begin() + static_cast<std::ptrdiff_t>(o * block), block,
                  out.begin() + static_cast<std::ptrdiff_t>(o * out_s.dim * out_s.inner + offset * out_s.inner));
    offsets.push_back(offset);
    offset += s.dim;
  }
  const Shape part_dims = [&] {
    Shape dims;
    for (const Tensor& p : parts) dims.push_back(p.dim(axis));
    return dims;
  }();
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::move(out);
  check_finite(node->data, "concat");
  const bool any = g_grad_enabled && std::any_of(parts.begin(), parts.end(), wants);
  if (any) {
    node->requires_grad = true;
    for (const Tensor& p : parts) node->parents.push_back(p.handle());
    Node* self = node.get();
    std::vector<Tensor> kept(parts.begin(), parts.end());
    node->backward = [self, kept, offsets, part_dims, out_s]() {
      for (std::size_t k = 0; k < kept.size(); ++k) {
        if (!wants(kept[k])) continue;
        auto g = grad_of(kept[k]);
        const std::size_t block = part_dims[k] * out_s.inner;
        for (std::size_t o = 0; o < out_s.outer; ++o)
          for (std::size_t i = 0; i < block; ++i)
            g[o * block + i] += self->grad[o * out_s.dim * out_s.inner + offsets[k] * out_s.inner + i];
      }
    };
  }
  return Tensor(std::move(node));
}

Tensor select(const Tensor& a, std::size_t axis, std::size_t index) {
  if (axis >= a.rank() || index >= a.dim(axis)) shape_error("select", "index out of range");
  const Strides s = strides_around(a.shape(), axis);
  Shape shape = a.shape();
  shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(axis));
  std::vector<double> out(s.outer * s.inner);
  for (std::size_t o = 0; o < s.outer; ++o)
    std::copy_n(a.data().begin() + static_cast<std::ptrdiff_t>((o * s.dim + index) * s.inner), s.inner,
                out.begin() + static_cast<std::ptrdiff_t>(o * s.inner));
  return make_result(std::move(shape), std::move(out), "select", {&a}, [a, s, index](Node& self) {
    auto g = grad_of(a);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t i = 0; i < s.inner; ++i) g[(o * s.dim + index) * s.inner + i] += self.grad[o * s.inner + i];
  });
}

Tensor scale_rows(const Tensor& a, std::span<const double> weights) {
  if (a.rank() < 1 || a.dim(0) != weights.size())
    shape_error("scale_rows", shape_string(a.shape()) + " with " + std::to_string(weights.size()) +
                                  " weights");
  const std::size_t inner = a.size() / a.dim(0);
  std::vector<double> w(weights.begin(), weights.end());
  std::vector<double> out(a.size());
  for (std::size_t r = 0; r < w.size(); ++r)
    for (std::size_t i = 0; i < inner; ++i) out[r * inner + i] = a.data()[r * inner + i] * w[r];
  return make_result(a.shape(), std::move(out), "scale_rows", {&a}, [a, w, inner](Node& self) {
    auto g = grad_of(a);
    for (std::size_t r = 0; r < w.size(); ++r)
      for (std::size_t i = 0; i < inner; ++i) g[r * inner + i] += self.grad[r * inner + i] * w[r];
  });
}

Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias, Padding padding) {
  if (input.rank() != 3 && input.rank() != 4) shape_error("conv2d", "input must be rank 3 or 4");
  if (kernels.rank() != 4) shape_error("conv2d", "kernels must be [Cout x Cin x kH x kW]");
  ConvGeometry g{};
  g.batched = input.rank() == 4;
  const std::size_t off = g.batched ? 1 : 0;
  g.batch = g.batched ? input.dim(0) : 1;
  g.cin = input.dim(off);
  g.h = input.dim(off + 1);
  g.w = input.dim(off + 2);
  g.cout = kernels.dim(0);
  g.kh = kernels.dim(2);
  g.kw = kernels.dim(3);
  if (kernels.dim(1) != g.cin)
    shape_error("conv2d", "input has " + std::to_string(g.cin) + " channels, kernels expect " +
                              std::to_string(kernels.dim(1)));
  if (bias.defined() && bias.size() != g.cout) shape_error("conv2d", "bias length != Cout");
  if (padding == Padding::Same) {
    if (g.kh % 2 == 0 || g.kw % 2 == 0) shape_error("conv2d", "same padding needs odd kernels");
    g.pad_h = (g.kh - 1) / 2;
    g.pad_w = (g.kw - 1) / 2;
    g.out_h = g.h;
    g.out_w = g.w;
  } else {
    if (g.kh > g.h || g.kw > g.w) shape_error("conv2d", "kernel larger than input");
    g.pad_h = g.pad_w = 0;
    g.out_h = g.h - g.kh + 1;
    g.out_w = g.w - g.kw + 1;
  }
  const bool pointwise = g.kh == 1 && g.kw == 1;
  const auto patch = static_cast<Eigen::Index>(g.cin * g.kh * g.kw);
  const auto plane = static_cast<Eigen::Index>(g.out_h * g.out_w);
  const auto cout = static_cast<Eigen::Index>(g.cout);
  const std::size_t in_stride = g.cin * g.h * g.w;
  const std::size_t out_stride = g.cout * g.out_h * g.out_w;

  std::vector<double> out(g.batch * out_stride);
  std::vector<double> cols(pointwise ? 0 : static_cast<std::size_t>(patch * plane));
  CMapR k(kernels.data().data(), cout, patch);
  for (std::size_t n = 0; n < g.batch; ++n) {
    const double* in_n = input.data().data() + n * in_stride;
    MapR o(out.data() + n * out_stride, cout, plane);
    if (pointwise) {
      o.noalias() = k * CMapR(in_n, patch, plane);
    } else {
      im2col(in_n, g, cols.data());
      o.noalias() = k * CMapR(cols.data(), patch, plane);
    }
    if (bias.defined()) o.colwise() += CMapV(bias.data().data(), cout);
  }
  Shape shape = g.batched ? Shape{g.batch, g.cout, g.out_h, g.out_w} : Shape{g.cout, g.out_h, g.out_w};
  return make_result(std::move(shape), std::move(out), "conv2d", {&input, &kernels, &bias},
                     [input, kernels, bias, g, pointwise, patch, plane, cout, in_stride,
                      out_stride](Node& self) {
                       std::vector<double> cols(pointwise ? 0 : static_cast<std::size_t>(patch * plane));
                       std::vector<double> dcols(pointwise ? 0 : static_cast<std::size_t>(patch * plane));
                       CMapR k(kernels.data().data(), cout, patch);
                       for (std::size_t n = 0; n < g.batch; ++n) {
                         CMapR dout(self.grad.data() + n * out_stride, cout, plane);
                         const double* in_n = input.data().data() + n * in_stride;
                         if (wants(kernels)) {
                           MapR dk(grad_of(kernels).data(), cout, patch);
                           if (pointwise) {
                             dk.noalias() += dout * CMapR(in_n, patch, plane).transpose();
                           } else {
                             im2col(in_n, g, cols.data());
                             dk.noalias() += dout * CMapR(cols.data(), patch, plane).transpose();
                           }
                         }
                         if (wants(bias)) MapV(grad_of(bias).data(), cout) += dout.rowwise().sum();
                         if (wants(input)) {
                           double* din = grad_of(input).data() + n * in_stride;
                           if (pointwise) {
                             MapR(din, patch, plane).noalias() += k.transpose() * dout;
                           } else {
                             MapR(dcols.data(), patch, plane).noalias() = k.transpose() * dout;
                             col2im_add(dcols.data(), g, din);
                           }
                         }
                       }
                     });
}

Tensor maxpool2d(const Tensor& input, std::size_t size, Padding padding) {
  if (input.rank() != 3 && input.rank() != 4) shape_error("maxpool2d", "input must be rank 3 or 4");
  if (size == 0) shape_error("maxpool2d", "window size must be positive");
  const std::size_t r = input.rank();
  const std::size_t h = input.dim(r - 2);
  const std::size_t w = input.dim(r - 1);
  const std::size_t planes = input.size() / (h * w);
  std::size_t pad = 0, out_h = 0, out_w = 0;
  if (padding == Padding::Same) {
    if (size % 2 == 0) shape_error("maxpool2d", "same padding needs an odd window");
    pad = (size - 1) / 2;
    out_h = h;
    out_w = w;
  } else {
    if (size > h || size > w) shape_error("maxpool2d", "window larger than input");
    out_h = h - size + 1;
    out_w = w - size + 1;
  }
  std::vector<double> out(planes * out_h * out_w);
  std::vector<std::size_t> argmax(out.size());
  const double* in = input.data().data();
  for (std::size_t p = 0; p < planes; ++p)
    for (std::size_t y = 0; y < out_h; ++y)
      for (std::size_t x = 0; x < out_w; ++x) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_index = 0;
        for (std::size_t i = 0; i < size; ++i) {
          const long sy = static_cast<long>(y + i) - static_cast<long>(pad);
          if (sy < 0 || sy >= static_cast<long>(h)) continue;
          for (std::size_t j = 0; j < size; ++j) {
            const long sx = static_cast<long>(x + j) - static_cast<long>(pad);
            if (sx < 0 || sx >= static_cast<long>(w)) continue;
            const std::size_t idx = (p * h + static_cast<std::size_t>(sy)) * w + static_cast<std::size_t>(sx);
            if (in[idx] > best) {
              best = in[idx];
              best_index = idx;
            }
          }
        }
        const std::size_t o = (p * out_h + y) * out_w + x;
        out[o] = best;
        argmax[o] = best_index;
      }
  Shape shape = input.shape();
  shape[r - 2] = out_h;
  shape[r - 1] = out_w;
  return make_result(std::move(shape), std::move(out), "maxpool2d", {&input},
                     [input, argmax = std::move(argmax)](Node& self) {
                       auto g = grad_of(input);
                       for (std::size_t o = 0; o < argmax.size(); ++o) g[argmax[o]] += self.grad[o];
                     });
}

Tensor global_avg_pool(const Tensor& input) {
  if (input.rank() < 3) shape_error("global_avg_pool", "needs [.. x H x W]");
  const std::size_t r = input.rank();
  const std::size_t area = input.dim(r - 2) * input.dim(r - 1);
  const std::size_t planes = input.size() / area;
  std::vector<double> out(planes);
  for (std::size_t p = 0; p < planes; ++p) {
    double total = 0.0;
    for (std::size_t i = 0; i < area; ++i) total += input.data()[p * area + i];
    out[p] = total / static_cast<double>(area);
  }
  Shape shape(input.shape().begin(), input.shape().end() - 2);
  return make_result(std::move(shape), std::move(out), "global_avg_pool", {&input},
                     [input, area, planes](Node& self) {
                       auto g = grad_of(input);
                       const double inv = 1.0 / static_cast<double>(area);
                       for (std::size_t p = 0; p < planes; ++p)
                         for (std::size_t i = 0; i < area; ++i) g[p * area + i] += self.grad[p] * inv;
                     });
}

Tensor dropout(const Tensor& input, double rate, bool training, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw Error(ErrorKind::InvalidArgument, "dropout rate must be in [0, 1)");
  if (!training || rate == 0.0) return input;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(input.size());
  for (double& m : mask) m = rng.uniform() < rate ? 0.0 : keep_scale;
  std::vector<double> out(input.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = input.data()[i] * mask[i];
  return make_result(input.shape(), std::move(out), "dropout", {&input},
                     [input, mask = std::move(mask)](Node& self) {
                       auto g = grad_of(input);
                       for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * mask[i];
                     });
}

}  // namespace wavecast::nn
