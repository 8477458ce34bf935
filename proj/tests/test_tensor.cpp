#include "wavecast/error.hpp"
#include "wavecast/tensor.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace wavecast;
using namespace wavecast::nn;
using test::gradient_check;
using test::random_tensor;

namespace {

// Quadruple loop cross-correlation with zero padding, [Cin x H x W] input.
std::vector<double> reference_conv(const Tensor& x, const Tensor& k, const Tensor& bias, bool same) {
  const std::size_t cin = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::size_t cout = k.dim(0), kh = k.dim(2), kw = k.dim(3);
  const long ph = same ? static_cast<long>(kh / 2) : 0, pw = same ? static_cast<long>(kw / 2) : 0;
  const std::size_t oh = same ? h : h - kh + 1, ow = same ? w : w - kw + 1;
  std::vector<double> out(cout * oh * ow, 0.0);
  for (std::size_t o = 0; o < cout; ++o)
    for (std::size_t i = 0; i < oh; ++i)
      for (std::size_t j = 0; j < ow; ++j) {
        double acc = bias.defined() ? bias.data()[o] : 0.0;
        for (std::size_t c = 0; c < cin; ++c)
          for (std::size_t a = 0; a < kh; ++a)
            for (std::size_t b = 0; b < kw; ++b) {
              const long y = static_cast<long>(i + a) - ph, z = static_cast<long>(j + b) - pw;
              if (y < 0 || z < 0 || y >= static_cast<long>(h) || z >= static_cast<long>(w)) continue;
              acc += x.data()[(c * h + static_cast<std::size_t>(y)) * w + static_cast<std::size_t>(z)] *
                     k.data()[((o * cin + c) * kh + a) * kw + b];
            }
        out[(o * oh + i) * ow + j] = acc;
      }
  return out;
}

Tensor weighted_sum(const Tensor& t, std::uint64_t seed) {
  // A random linear functional makes every output coordinate matter.
  Rng rng(seed);
  return sum(mul(t, random_tensor(t.shape(), rng, false)));
}

}  // namespace

TEST(Backward, LinearMapGradient) {
  const Tensor W = Tensor::from_data({2, 3}, {1, 2, 3, 4, 5, 6}, true);
  const Tensor x = Tensor::from_data({3, 1}, {0.5, -1.0, 2.0});
  backward(sum(matmul(W, x)));
  const std::vector<double> expected = {0.5, -1.0, 2.0, 0.5, -1.0, 2.0};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(W.grad()[i], expected[i]);
}

TEST(Backward, SigmoidTimesTanhAtZero) {
  const Tensor w = Tensor::from_data({1}, {0.0}, true);
  backward(mul(sigmoid(w), tanh(w)));
  EXPECT_DOUBLE_EQ(w.grad()[0], 0.5);
}

TEST(Backward, SharedSubexpressionAccumulates) {
  const Tensor w = Tensor::from_data({1}, {3.0}, true);
  const Tensor y = mul(w, w);
  backward(add(y, y));
  EXPECT_DOUBLE_EQ(w.grad()[0], 12.0);
}

TEST(Backward, DisconnectedGraph) {
  const Tensor x = Tensor::from_data({2}, {1.0, 2.0});
  try {
    backward(sum(x));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DisconnectedGraph);
  }
}

TEST(Backward, NoGradGuardRecordsNothing) {
  const Tensor w = Tensor::from_data({1}, {1.0}, true);
  NoGradGuard guard;
  EXPECT_FALSE(grad_enabled());
  EXPECT_FALSE(sum(mul(w, w)).requires_grad());
}

TEST(Backward, NonFiniteOutputIsCaught) {
  const Tensor a = Tensor::from_data({1}, {std::numeric_limits<double>::max()});
  try {
    scale(a, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteValue);
  }
}

TEST(Backward, DeterministicAcrossFreshTapes) {
  Rng rng(1);
  const Tensor w = random_tensor({4, 3}, rng);
  const Tensor x = random_tensor({5, 4}, rng, false);
  auto run = [&] {
    w.node()->grad.clear();
    backward(sum(tanh(matmul(x, w))));
    return std::vector<double>(w.grad().begin(), w.grad().end());
  };
  EXPECT_EQ(run(), run());
}

TEST(Conv2d, PointwiseScaling) {
  const Tensor x = Tensor::from_data({1, 3, 3}, std::vector<double>(9, 1.0));
  const Tensor k = Tensor::from_data({1, 1, 1, 1}, {2.0});
  const auto y = conv2d(x, k, Tensor(), Padding::Same);
  ASSERT_EQ(y.shape(), (Shape{1, 3, 3}));
  for (double v : y.data()) EXPECT_DOUBLE_EQ(v, 2.0);
}

TEST(Conv2d, DeltaKernelIsIdentity) {
  Rng rng(2);
  const Tensor x = random_tensor({1, 5, 4}, rng, false);
  std::vector<double> kd(9, 0.0);
  kd[4] = 1.0;
  const auto y = conv2d(x, Tensor::from_data({1, 1, 3, 3}, kd), Tensor(), Padding::Same);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(y.data()[i], x.data()[i]);
}

TEST(Conv2d, MatchesLoopReference) {
  Rng rng(3);
  const Tensor x = random_tensor({2, 5, 5}, rng, false);
  const Tensor k = random_tensor({3, 2, 3, 3}, rng, false);
  const Tensor b = random_tensor({3}, rng, false);
  for (const bool same : {true, false}) {
    const auto y = conv2d(x, k, b, same ? Padding::Same : Padding::Valid);
    const auto ref = reference_conv(x, k, b, same);
    ASSERT_EQ(y.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y.data()[i], ref[i], 1e-12);
  }
  const Tensor k5 = random_tensor({2, 2, 5, 5}, rng, false);
  const auto y5 = conv2d(x, k5, Tensor(), Padding::Same);
  const auto ref5 = reference_conv(x, k5, Tensor(), true);
  for (std::size_t i = 0; i < ref5.size(); ++i) EXPECT_NEAR(y5.data()[i], ref5[i], 1e-12);
}

TEST(Conv2d, BatchedMatchesPerSample) {
  Rng rng(4);
  const Tensor xb = random_tensor({3, 2, 4, 4}, rng, false);
  const Tensor k = random_tensor({2, 2, 3, 3}, rng, false);
  const auto yb = conv2d(xb, k, Tensor(), Padding::Same);
  ASSERT_EQ(yb.shape(), (Shape{3, 2, 4, 4}));
  for (std::size_t n = 0; n < 3; ++n) {
    const auto ref = reference_conv(select(xb, 0, n), k, Tensor(), true);
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(yb.data()[n * ref.size() + i], ref[i], 1e-12);
  }
}

TEST(Conv2d, ShapeErrors) {
  const Tensor x = Tensor::zeros({2, 4, 4});
  EXPECT_THROW(conv2d(x, Tensor::zeros({1, 3, 3, 3}), Tensor(), Padding::Same), Error);
  EXPECT_THROW(conv2d(x, Tensor::zeros({1, 2, 2, 2}), Tensor(), Padding::Same), Error);
  EXPECT_THROW(conv2d(x, Tensor::zeros({1, 2, 5, 5}), Tensor(), Padding::Valid), Error);
}

TEST(MaxPool2d, ConstantAndPeak) {
  const Tensor c = Tensor::from_data({1, 4, 4}, std::vector<double>(16, 3.0));
  const auto pooled = maxpool2d(c, 3, Padding::Same);
  for (double v : pooled.data()) EXPECT_DOUBLE_EQ(v, 3.0);

  std::vector<double> d(25, 0.0);
  d[12] = 7.0;  // centre of 5x5
  const auto y = maxpool2d(Tensor::from_data({1, 5, 5}, d), 3, Padding::Same);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      const bool near = i >= 1 && i <= 3 && j >= 1 && j <= 3;
      EXPECT_DOUBLE_EQ(y.data()[i * 5 + j], near ? 7.0 : 0.0);
    }
}

TEST(MaxPool2d, GradientToFirstArgmaxOnTies) {
  const Tensor x = Tensor::from_data({1, 1, 2}, {1.0, 1.0}, true);
  backward(sum(maxpool2d(x, 3, Padding::Same)));
  EXPECT_DOUBLE_EQ(x.grad()[0], 2.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], 0.0);
}

TEST(MaxPool2d, GradientCheck) {
  Rng rng(5);
  const Tensor x = random_tensor({1, 4, 4}, rng);
  const auto r = gradient_check({x}, [&] { return weighted_sum(maxpool2d(x, 3, Padding::Same), 9); }, 16, 1);
  EXPECT_LT(r.max_rel_error, 1e-6);
}

TEST(GlobalAvgPool, PerturbOneCell) {
  Rng rng(6);
  const std::size_t S = 6;
  Tensor x = random_tensor({3, S, S}, rng, false);
  const auto before = global_avg_pool(x);
  x.mutable_data()[1 * S * S + 2 * S + 4] += 0.9;
  const auto after = global_avg_pool(x);
  ASSERT_EQ(after.shape(), (Shape{3}));
  EXPECT_DOUBLE_EQ(after.data()[0], before.data()[0]);
  EXPECT_NEAR(after.data()[1] - before.data()[1], 0.9 / (S * S), 1e-15);
  EXPECT_DOUBLE_EQ(after.data()[2], before.data()[2]);
}

TEST(Dropout, IdentityCases) {
  Rng rng(7);
  const Tensor x = random_tensor({100}, rng, false);
  Rng d(1);
  EXPECT_EQ(dropout(x, 0.0, true, d).node(), x.node());
  EXPECT_EQ(dropout(x, 0.1, false, d).node(), x.node());
  EXPECT_THROW(dropout(x, 1.0, true, d), Error);
}

TEST(Dropout, ZeroFractionAndScaling) {
  const Tensor x = Tensor::from_data({100000}, std::vector<double>(100000, 1.0));
  Rng d(12);
  const auto y = dropout(x, 0.5, true, d);
  std::size_t zeros = 0;
  for (double v : y.data()) {
    if (v == 0.0)
      ++zeros;
    else
      EXPECT_DOUBLE_EQ(v, 2.0);
  }
  EXPECT_NEAR(static_cast<double>(zeros) / 1e5, 0.5, 0.01);
}

TEST(GradCheck, EveryElementwiseAndLinearOp) {
  Rng rng(8);
  const Tensor a = random_tensor({3, 4}, rng), b = random_tensor({3, 4}, rng);
  const Tensor w = random_tensor({4, 5}, rng), bias = random_tensor({5}, rng);
  const Tensor target = random_tensor({3, 5}, rng, false);
  const std::vector<double> rows = {0.2, -1.0, 0.7};

  const std::vector<std::pair<const char*, std::function<Tensor()>>> cases = {
      {"matmul", [&] { return weighted_sum(matmul(a, w), 1); }},
      {"linear", [&] { return weighted_sum(linear(a, w, bias), 2); }},
      {"add", [&] { return weighted_sum(a + b, 3); }},
      {"sub", [&] { return weighted_sum(a - b, 4); }},
      {"mul", [&] { return weighted_sum(a * b, 5); }},
      {"scale", [&] { return weighted_sum(scale(a, -1.7), 6); }},
      {"sigmoid", [&] { return weighted_sum(sigmoid(a), 7); }},
      {"tanh", [&] { return weighted_sum(tanh(a), 8); }},
      {"relu", [&] { return weighted_sum(relu(a), 9); }},
      {"mse", [&] { return mse_loss(linear(a, w, bias), target); }},
      {"reshape", [&] { return weighted_sum(reshape(a, {2, 6}), 10); }},
      {"concat0", [&] { const Tensor p[] = {a, b}; return weighted_sum(concat(p, 0), 11); }},
      {"concat1", [&] { const Tensor p[] = {a, b, a}; return weighted_sum(concat(p, 1), 12); }},
      {"select", [&] { return weighted_sum(select(a, 1, 2), 13); }},
      {"scale_rows", [&] { return weighted_sum(scale_rows(a, rows), 14); }},
  };
  for (const auto& [name, loss] : cases) {
    const auto r = gradient_check({a, b, w, bias}, loss, 100, 77);
    EXPECT_LT(r.max_rel_error, 1e-4) << name;
  }
}

TEST(GradCheck, ConvolutionPoolingAndDropout) {
  Rng rng(9);
  const Tensor x = random_tensor({2, 3, 5, 5}, rng);
  const Tensor k3 = random_tensor({4, 3, 3, 3}, rng), b3 = random_tensor({4}, rng);
  const Tensor k5 = random_tensor({2, 3, 5, 5}, rng);
  const std::vector<std::pair<const char*, std::function<Tensor()>>> cases = {
      {"conv_same", [&] { return weighted_sum(conv2d(x, k3, b3, Padding::Same), 1); }},
      {"conv_valid", [&] { return weighted_sum(conv2d(x, k3, b3, Padding::Valid), 2); }},
      {"conv5", [&] { return weighted_sum(conv2d(x, k5, Tensor(), Padding::Same), 3); }},
      {"conv_unbatched", [&] { return weighted_sum(conv2d(select(x, 0, 1), k3, b3, Padding::Same), 4); }},
      {"maxpool", [&] { return weighted_sum(maxpool2d(x, 3, Padding::Same), 5); }},
      {"gap", [&] { return weighted_sum(global_avg_pool(x), 6); }},
      {"dropout", [&] { Rng d(3); return weighted_sum(dropout(x, 0.3, true, d), 7); }},
  };
  for (const auto& [name, loss] : cases) {
    const auto r = gradient_check({x, k3, b3, k5}, loss, 100, 78);
    EXPECT_LT(r.max_rel_error, 1e-4) << name;
  }
}
