#include "agcas/nn.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace agcas;
using namespace agcas::nn;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  }
  return m;
}

NetworkSpec dense_1x1(Activation act = Activation::None) {
  NetworkSpec spec;
  spec.input = {1, 1, 1};
  spec.layers = {DenseSpec{1, 1, act}};
  return spec;
}

}  // namespace

TEST(Forward, ZeroParamsGiveZeros) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    const auto spec = oracle::random_spec(rng);
    const auto params = zero_params(spec);
    const Matrix out = forward(spec, params, random_matrix(spec.input.size(), 4, rng),
                               random_matrix(spec.side_width(), 4, rng));
    EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Forward, SingleDenseArithmetic) {
  const auto spec = dense_1x1();
  auto params = zero_params(spec);
  params.layers[0].weight.data = {2.0};
  params.layers[0].bias.data = {1.0};
  const auto out = forward(spec, params, Tensor({1}, {3.0}), Tensor());
  EXPECT_EQ(out.data, Buffer{7.0});
}

TEST(Forward, MatchesNaiveOracle) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 40; ++i) {
    const auto spec = oracle::random_spec(rng);
    const auto params = init_params(spec, rng);
    const Matrix images = random_matrix(spec.input.size(), 3, rng);
    const Matrix side = random_matrix(spec.side_width(), 3, rng);
    const Matrix out = forward(spec, params, images, side);
    for (Eigen::Index b = 0; b < 3; ++b) {
      std::vector<double> img(images.col(b).data(), images.col(b).data() + images.rows());
      std::vector<double> sd(side.col(b).data(), side.col(b).data() + side.rows());
      const auto ref = oracle::naive_forward(spec, params, img, sd);
      ASSERT_EQ(ref.size(), static_cast<std::size_t>(out.rows()));
      for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(out(static_cast<Eigen::Index>(k), b), ref[k], 1e-12);
    }
  }
}

TEST(Forward, ShapeChecks) {
  NetworkSpec spec;
  spec.input = {1, 4, 4};
  spec.layers = {ConvSpec{1, 2}, DenseSpec{8, 3, Activation::None}};
  spec.validate();
  EXPECT_EQ(spec.output_width(), 3u);
  std::mt19937_64 rng(3);
  const auto params = init_params(spec, rng);
  EXPECT_THROW(forward(spec, params, Matrix::Zero(15, 1), Matrix()), ShapeMismatch);
  NetworkSpec bad = spec;
  bad.layers[1] = DenseSpec{9, 3, Activation::None};
  EXPECT_THROW(bad.validate(), ShapeMismatch);
  NetworkSpec two_concat;
  two_concat.input = {1, 1, 1};
  two_concat.layers = {ConcatSpec{1}, ConcatSpec{1}, DenseSpec{3, 1, Activation::None}};
  EXPECT_THROW(two_concat.validate(), ShapeMismatch);
  Params wrong = params;
  wrong.layers[1].bias.data.push_back(0.0);
  wrong.layers[1].bias.shape[0] += 1;
  EXPECT_THROW(check_shapes(spec, wrong), ShapeMismatch);
}

TEST(Init, WithinFanInBound) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto spec = oracle::random_spec(rng);
    const auto params = init_params(spec, rng);
    for (const auto& lp : params.layers) {
      if (lp.weight.empty()) continue;
      const double bound = std::sqrt(1.0 / static_cast<double>(lp.weight.size() / lp.weight.shape[0]));
      for (double w : lp.weight.data) EXPECT_LE(std::abs(w), bound);
      for (double b : lp.bias.data) EXPECT_LE(std::abs(b), bound);
    }
  }
}

TEST(Backward, HandDerivative) {
  // L = out^2 with out = w x + b, x = 3, w = 2, b = 0: dL/dw = 2 (w x + b) x = 36.
  const auto spec = dense_1x1();
  auto params = zero_params(spec);
  params.layers[0].weight.data = {2.0};
  ForwardCache cache;
  const Matrix out = forward(spec, params, Matrix::Constant(1, 1, 3.0), Matrix(), &cache);
  auto grads = zeros_like(params);
  backward(spec, params, cache, 2.0 * out, &grads, nullptr);
  EXPECT_DOUBLE_EQ(grads.layers[0].weight.data[0], 36.0);
  EXPECT_DOUBLE_EQ(grads.layers[0].bias.data[0], 12.0);
}

TEST(Backward, ConstantLossHasZeroGradient) {
  std::mt19937_64 rng(5);
  const auto spec = oracle::random_spec(rng);
  const auto params = init_params(spec, rng);
  ForwardCache cache;
  const Matrix out = forward(spec, params, random_matrix(spec.input.size(), 2, rng),
                             random_matrix(spec.side_width(), 2, rng), &cache);
  auto grads = zeros_like(params);
  backward(spec, params, cache, Matrix::Zero(out.rows(), out.cols()), &grads, nullptr);
  grads.for_each([](const Tensor& t) {
    for (double v : t.data) EXPECT_EQ(v, 0.0);
  });
}

TEST(Backward, MatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 15; ++i) {
    const auto spec = oracle::random_spec(rng);
    const auto params = init_params(spec, rng);
    const Matrix images = random_matrix(spec.input.size(), 3, rng);
    const Matrix side = random_matrix(spec.side_width(), 3, rng);
    const Matrix weights = random_matrix(spec.output_width(), 3, rng);
    const auto loss = [&](const Params& p) { return forward(spec, p, images, side).cwiseProduct(weights).sum(); };
    ForwardCache cache;
    forward(spec, params, images, side, &cache);
    auto grads = zeros_like(params);
    Matrix grad_side;
    backward(spec, params, cache, weights, &grads, &grad_side);
    EXPECT_LT(oracle::max_relative_error(grads, oracle::numeric_gradient(params, loss)), 1e-4);

    if (spec.side_width() > 0) {
      for (Eigen::Index r = 0; r < side.rows(); ++r) {
        for (Eigen::Index c = 0; c < side.cols(); ++c) {
          Matrix up = side, down = side;
          up(r, c) += 1e-5;
          down(r, c) -= 1e-5;
          const double fd = (forward(spec, params, images, up).cwiseProduct(weights).sum() -
                             forward(spec, params, images, down).cwiseProduct(weights).sum()) / 2e-5;
          EXPECT_NEAR(grad_side(r, c), fd, 1e-6 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
}

TEST(SquashedGaussian, ZeroNoiseClosedForm) {
  const std::vector<double> mean{0.0, 0.0}, log_std{std::log(0.5), 0.3}, noise{0.0, 0.0};
  const auto s = squashed_gaussian_sample(mean, log_std, noise);
  EXPECT_EQ(s.action, (std::vector<double>{0.0, 0.0}));
  const double expect = -std::log(0.5 * std::sqrt(2 * kPi)) - std::log(std::exp(0.3) * std::sqrt(2 * kPi)) -
                        2.0 * std::log(1.0 + 1e-6);
  EXPECT_NEAR(s.log_prob, expect, 1e-12);
}

TEST(SquashedGaussian, ActionsInsideOpenInterval) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> mean{n(rng)}, log_std{n(rng)}, noise{n(rng)};
    const auto s = squashed_gaussian_sample(mean, log_std, noise);
    EXPECT_GT(s.action[0], -1.0 - 1e-15);
    EXPECT_LT(s.action[0], 1.0 + 1e-15);
    EXPECT_TRUE(std::isfinite(s.log_prob));
    if (std::abs(s.pre_tanh[0]) < 5.0) {
      const double ls = std::clamp(log_std[0], kLogStdMin, kLogStdMax);
      EXPECT_NEAR(s.log_prob, oracle::squashed_log_density(s.action[0], mean[0], ls), 1e-6);
    }
  }
}

TEST(SquashedGaussian, DensityIntegratesToOne) {
  for (const auto& [mean, log_std] : std::vector<std::pair<double, double>>{{0.0, -0.5}, {0.3, -1.0}, {-0.5, 0.0}}) {
    // Midpoint rule over an action grid in (-1, 1).
    const int n = 200000;
    const double h = 2.0 / n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = -1.0 + h * (i + 0.5);
      const double noise = (std::atanh(a) - mean) / std::exp(log_std);
      const auto s = squashed_gaussian_sample(std::vector<double>{mean}, std::vector<double>{log_std},
                                              std::vector<double>{noise});
      total += std::exp(s.log_prob) * h;
    }
    EXPECT_NEAR(total, 1.0, 1e-3);
  }
}

TEST(Adam, ZeroGradientAndFirstStep) {
  const auto spec = dense_1x1();
  auto params = zero_params(spec);
  params.layers[0].weight.data = {1.0};
  Adam adam(params, 0.1);
  auto zero = zeros_like(params);
  adam.step(params, zero);
  EXPECT_DOUBLE_EQ(params.layers[0].weight.data[0], 1.0);

  Adam fresh(params, 0.1);
  auto g = zeros_like(params);
  g.layers[0].weight.data = {-3.0};
  g.layers[0].bias.data = {0.5};
  fresh.step(params, g);
  EXPECT_NEAR(params.layers[0].weight.data[0], 1.1, 1e-8);
  EXPECT_NEAR(params.layers[0].bias.data[0], -0.1, 1e-8);
  EXPECT_NEAR(fresh.m.layers[0].weight.data[0], -0.3, 1e-15);
}

TEST(Adam, MinimisesQuadraticBowl) {
  NetworkSpec spec;
  spec.input = {1, 1, 1};
  spec.layers = {DenseSpec{1, 3, Activation::None}};
  auto params = zero_params(spec);
  const std::vector<double> target{1.5, -2.0, 0.25, 3.0, -0.5, 0.75};
  Adam adam(params, 0.01);
  for (int it = 0; it < 5000; ++it) {
    auto g = zeros_like(params);
    for (std::size_t i = 0; i < 3; ++i) {
      g.layers[0].weight.data[i] = 2.0 * (params.layers[0].weight.data[i] - target[i]);
      g.layers[0].bias.data[i] = 2.0 * (params.layers[0].bias.data[i] - target[3 + i]);
    }
    adam.step(params, g);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(params.layers[0].weight.data[i], target[i], 1e-6);
    EXPECT_NEAR(params.layers[0].bias.data[i], target[3 + i], 1e-6);
  }
}

TEST(Serialization, RoundTripAndRejections) {
  std::mt19937_64 rng(8);
  NetworkSpec spec;
  spec.input = {1, 8, 8};
  spec.layers = {ConvSpec{1, 2}, ConvSpec{2, 3}, DenseSpec{12, 5, Activation::Relu}, ConcatSpec{2},
                 DenseSpec{7, 4, Activation::None}};
  const auto params = init_params(spec, rng);
  const std::string text = params_to_json(spec, params);
  NetworkSpec spec2;
  Params params2;
  params_from_json(text, spec2, params2);
  EXPECT_EQ(spec2, spec);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    EXPECT_EQ(params2.layers[l].weight, params.layers[l].weight);
    EXPECT_EQ(params2.layers[l].bias, params.layers[l].bias);
  }
  std::string wrong_version = text;
  wrong_version.replace(wrong_version.find("\"version\":1"), 11, "\"version\":9");
  EXPECT_THROW(params_from_json(wrong_version, spec2, params2), ShapeMismatch);
}
