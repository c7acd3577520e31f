#pragma once

#include <Eigen/Core>
#include <Eigen/StdVector>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace agcas::nn {

class ShapeMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Matrix = Eigen::MatrixXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Storage aligned like Eigen's own matrices, so vectorised kernels take the
/// same path on every run and results are bit-reproducible.
using Buffer = std::vector<double, Eigen::aligned_allocator<double>>;

struct Tensor {
  std::vector<std::size_t> shape;
  Buffer data;  // row-major

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims, double fill = 0.0);
  Tensor(std::vector<std::size_t> dims, std::vector<double> values);

  std::size_t size() const noexcept { return data.size(); }
  bool empty() const noexcept { return data.empty(); }
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

enum class Activation { Relu, None };

/// 3x3 kernel, stride 2, padding 1, ReLU.
struct ConvSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

struct DenseSpec {
  std::size_t in = 1;
  std::size_t out = 1;
  Activation activation = Activation::Relu;
  friend bool operator==(const DenseSpec&, const DenseSpec&) = default;
};

/// Appends the side input (scalar observations, actions) after the
/// flattened convolutional features.
struct ConcatSpec {
  std::size_t side_width = 0;
  friend bool operator==(const ConcatSpec&, const ConcatSpec&) = default;
};

using LayerSpec = std::variant<ConvSpec, DenseSpec, ConcatSpec>;

struct ImageShape {
  std::size_t channels = 1;
  std::size_t height = 1;
  std::size_t width = 1;
  std::size_t size() const noexcept { return channels * height * width; }
  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

struct NetworkSpec {
  ImageShape input;
  std::vector<LayerSpec> layers;

  /// Throws ShapeMismatch when adjacent layers disagree.
  void validate() const;
  std::size_t side_width() const;
  std::size_t output_width() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Spatial output size of a 3x3 / stride 2 / padding 1 convolution.
constexpr std::size_t conv_out(std::size_t n) { return (n - 1) / 2 + 1; }

struct LayerParams {
  Tensor weight;
  Tensor bias;
};

struct Params {
  std::vector<LayerParams> layers;

  std::size_t parameter_count() const;
  bool all_finite() const;
  /// Visits every weight and bias tensor in layer order.
  void for_each(const std::function<void(Tensor&)>& fn);
  void for_each(const std::function<void(const Tensor&)>& fn) const;
  void zero();
};

/// Params with the shapes `spec` requires, all zeros.
Params zero_params(const NetworkSpec& spec);
Params zeros_like(const Params& p);

/// Uniform in +-sqrt(1/fan_in). `final_layer_scale` shrinks the last
/// dense layer's bound when below 1.
Params init_params(const NetworkSpec& spec, std::mt19937_64& rng, double final_layer_scale = 1.0);

void check_shapes(const NetworkSpec& spec, const Params& params);
void check_same_shapes(const Params& a, const Params& b);

/// Per-layer activations retained for the backward pass.
struct ForwardCache {
  std::vector<Matrix> inputs;   // dense: layer input; conv: im2col columns
  std::vector<Matrix> outputs;  // post-activation values
  std::size_t batch = 0;
};

/// Batched forward pass. `images` is (C*H*W) x B, channel-major per column;
/// `side` is side_width x B. Returns output_width x B.
Matrix forward(const NetworkSpec& spec, const Params& params, const Matrix& images,
               const Matrix& side, ForwardCache* cache = nullptr);

/// Reverse-mode pass for a loss with dL/d(output) = grad_out. Writes
/// parameter gradients into `grads` (when non-null) and the gradient with
/// respect to the side input into `grad_side` (when non-null).
void backward(const NetworkSpec& spec, const Params& params, const ForwardCache& cache,
              const Matrix& grad_out, Params* grads, Matrix* grad_side);

/// Single-sample convenience over Tensors.
Tensor forward(const NetworkSpec& spec, const Params& params, const Tensor& image,
               const Tensor& scalars);

struct SquashedSample {
  std::vector<double> action;  // tanh(u), in (-1, 1)
  std::vector<double> pre_tanh;
  double log_prob = 0.0;
};

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kTanhEpsilon = 1e-6;

/// u = mean + exp(log_std) * noise, action = tanh(u), log-density with the
/// tanh change-of-variables correction. log_std is clamped first.
SquashedSample squashed_gaussian_sample(std::span<const double> mean,
                                        std::span<const double> log_std,
                                        std::span<const double> noise);

/// Adaptive-moment optimizer state for one parameter set.
struct Adam {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Params m;
  Params v;
  std::uint64_t t = 0;

  Adam() = default;
  Adam(const Params& like, double learning_rate);
  void step(Params& params, const Params& grads);
};

/// Scalar variant used for the entropy temperature.
struct ScalarAdam {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double m = 0.0;
  double v = 0.0;
  std::uint64_t t = 0;

  void step(double& param, double grad);
};

/// Versioned JSON document {version, spec, params}.
inline constexpr int kParamsFormatVersion = 1;
std::string params_to_json(const NetworkSpec& spec, const Params& params);
/// Throws ShapeMismatch on version, spec or shape disagreement.
void params_from_json(const std::string& text, NetworkSpec& spec, Params& params);
void save_params(const std::string& path, const NetworkSpec& spec, const Params& params);
void load_params(const std::string& path, NetworkSpec& spec, Params& params);

}  // namespace agcas::nn
