#include "agcas/nn.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace agcas::nn {

using json = nlohmann::json;

Tensor::Tensor(std::vector<std::size_t> dims, double fill) : shape(std::move(dims)) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  data.assign(n, fill);
}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<double> values)
    : shape(std::move(dims)), data(values.begin(), values.end()) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  if (n != data.size()) throw ShapeMismatch("tensor data length does not match its shape");
}

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// NetworkSpec

namespace {

struct Walk {
  bool spatial = true;
  ImageShape shape;
  std::size_t width = 0;
  bool concat_seen = false;
  std::size_t side = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Walk walk_spec(const NetworkSpec& spec) {
  Walk w;
  w.shape = spec.input;
  w.width = spec.input.size();
  if (w.width == 0) throw ShapeMismatch("network input shape has zero size");
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const std::string where = "layer " + std::to_string(i) + ": ";
    std::visit(Overloaded{
                   [&](const ConvSpec& c) {
                     if (!w.spatial) throw ShapeMismatch(where + "conv after a flat layer");
                     if (c.in_channels != w.shape.channels || c.out_channels == 0) {
                       throw ShapeMismatch(where + "conv channel mismatch");
                     }
                     w.shape = {c.out_channels, conv_out(w.shape.height), conv_out(w.shape.width)};
                     w.width = w.shape.size();
                   },
                   [&](const DenseSpec& d) {
                     if (d.in != w.width || d.out == 0) {
                       throw ShapeMismatch(where + "dense expects " + std::to_string(d.in) +
                                           " inputs, receives " + std::to_string(w.width));
                     }
                     w.spatial = false;
                     w.width = d.out;
                   },
                   [&](const ConcatSpec& c) {
                     if (w.concat_seen) throw ShapeMismatch(where + "more than one concat");
                     w.concat_seen = true;
                     w.spatial = false;
                     w.side = c.side_width;
                     w.width += c.side_width;
                   },
               },
               spec.layers[i]);
  }
  return w;
}

}  // namespace

void NetworkSpec::validate() const { walk_spec(*this); }
std::size_t NetworkSpec::side_width() const { return walk_spec(*this).side; }
std::size_t NetworkSpec::output_width() const { return walk_spec(*this).width; }

// ---------------------------------------------------------------------------
// Params

std::size_t Params::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

bool Params::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.all_finite() || !l.bias.all_finite()) return false;
  }
  return true;
}

void Params::for_each(const std::function<void(Tensor&)>& fn) {
  for (auto& l : layers) {
    fn(l.weight);
    fn(l.bias);
  }
}

void Params::for_each(const std::function<void(const Tensor&)>& fn) const {
  for (const auto& l : layers) {
    fn(l.weight);
    fn(l.bias);
  }
}

void Params::zero() {
  for_each([](Tensor& t) { std::fill(t.data.begin(), t.data.end(), 0.0); });
}

Params zero_params(const NetworkSpec& spec) {
  spec.validate();
  Params p;
  for (const auto& layer : spec.layers) {
    LayerParams lp;
    if (const auto* c = std::get_if<ConvSpec>(&layer)) {
      lp.weight = Tensor({c->out_channels, c->in_channels, 3, 3});
      lp.bias = Tensor({c->out_channels});
    } else if (const auto* d = std::get_if<DenseSpec>(&layer)) {
      lp.weight = Tensor({d->out, d->in});
      lp.bias = Tensor({d->out});
    }
    p.layers.push_back(std::move(lp));
  }
  return p;
}

Params zeros_like(const Params& p) {
  Params z = p;
  z.zero();
  return z;
}

Params init_params(const NetworkSpec& spec, std::mt19937_64& rng, double final_layer_scale) {
  Params p = zero_params(spec);
  std::size_t last_dense = spec.layers.size();
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    if (std::holds_alternative<DenseSpec>(spec.layers[i])) last_dense = i;
  }
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    auto& lp = p.layers[i];
    if (lp.weight.empty()) continue;
    const std::size_t fan_in = lp.weight.size() / lp.weight.shape[0];
    double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    if (i == last_dense) bound *= std::min(final_layer_scale, 1.0);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : lp.weight.data) w = dist(rng);
    for (double& b : lp.bias.data) b = dist(rng);
  }
  return p;
}

void check_same_shapes(const Params& a, const Params& b) {
  if (a.layers.size() != b.layers.size()) throw ShapeMismatch("parameter sets differ in depth");
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (a.layers[i].weight.shape != b.layers[i].weight.shape ||
        a.layers[i].bias.shape != b.layers[i].bias.shape) {
      throw ShapeMismatch("parameter shapes differ at layer " + std::to_string(i));
    }
  }
}

void check_shapes(const NetworkSpec& spec, const Params& params) {
  const Params expected = zero_params(spec);
  check_same_shapes(expected, params);
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    if (params.layers[i].weight.size() != expected.layers[i].weight.size() ||
        params.layers[i].bias.size() != expected.layers[i].bias.size()) {
      throw ShapeMismatch("parameter data length does not match its shape");
    }
  }
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

using ConstRowMap = Eigen::Map<const RowMajorMatrix>;
using RowMap = Eigen::Map<RowMajorMatrix>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

void im2col(const Matrix& x, const ImageShape& s, Matrix& cols) {
  const std::size_t batch = static_cast<std::size_t>(x.cols());
  const std::size_t ho = conv_out(s.height), wo = conv_out(s.width);
  const std::size_t plane = ho * wo;
  cols.setZero(static_cast<Eigen::Index>(s.channels * 9), static_cast<Eigen::Index>(batch * plane));
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t oy = 0; oy < ho; ++oy) {
      for (std::size_t ox = 0; ox < wo; ++ox) {
        const auto col = static_cast<Eigen::Index>(b * plane + oy * wo + ox);
        for (std::size_t c = 0; c < s.channels; ++c) {
          for (std::size_t ky = 0; ky < 3; ++ky) {
            const auto iy = static_cast<std::ptrdiff_t>(2 * oy + ky) - 1;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(s.height)) continue;
            for (std::size_t kx = 0; kx < 3; ++kx) {
              const auto ix = static_cast<std::ptrdiff_t>(2 * ox + kx) - 1;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(s.width)) continue;
              cols(static_cast<Eigen::Index>(c * 9 + ky * 3 + kx), col) =
                  x(static_cast<Eigen::Index>(c * s.height * s.width +
                                              static_cast<std::size_t>(iy) * s.width +
                                              static_cast<std::size_t>(ix)),
                    static_cast<Eigen::Index>(b));
            }
          }
        }
      }
    }
  }
}

void col2im(const Matrix& dcols, const ImageShape& s, std::size_t batch, Matrix& dx) {
  const std::size_t ho = conv_out(s.height), wo = conv_out(s.width);
  const std::size_t plane = ho * wo;
  dx.setZero(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(batch));
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t oy = 0; oy < ho; ++oy) {
      for (std::size_t ox = 0; ox < wo; ++ox) {
        const auto col = static_cast<Eigen::Index>(b * plane + oy * wo + ox);
        for (std::size_t c = 0; c < s.channels; ++c) {
          for (std::size_t ky = 0; ky < 3; ++ky) {
            const auto iy = static_cast<std::ptrdiff_t>(2 * oy + ky) - 1;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(s.height)) continue;
            for (std::size_t kx = 0; kx < 3; ++kx) {
              const auto ix = static_cast<std::ptrdiff_t>(2 * ox + kx) - 1;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(s.width)) continue;
              dx(static_cast<Eigen::Index>(c * s.height * s.width +
                                           static_cast<std::size_t>(iy) * s.width +
                                           static_cast<std::size_t>(ix)),
                 static_cast<Eigen::Index>(b)) +=
                  dcols(static_cast<Eigen::Index>(c * 9 + ky * 3 + kx), col);
            }
          }
        }
      }
    }
  }
}

// (Co, B*plane) <-> (Co*plane, B)
Matrix planes_to_columns(const Matrix& z, std::size_t channels, std::size_t plane,
                         std::size_t batch) {
  Matrix out(static_cast<Eigen::Index>(channels * plane), static_cast<Eigen::Index>(batch));
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < channels; ++c) {
      out.block(static_cast<Eigen::Index>(c * plane), static_cast<Eigen::Index>(b),
                static_cast<Eigen::Index>(plane), 1) =
          z.block(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(b * plane), 1,
                  static_cast<Eigen::Index>(plane))
              .transpose();
    }
  }
  return out;
}

Matrix columns_to_planes(const Matrix& x, std::size_t channels, std::size_t plane,
                         std::size_t batch) {
  Matrix out(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(batch * plane));
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < channels; ++c) {
      out.block(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(b * plane), 1,
                static_cast<Eigen::Index>(plane)) =
          x.block(static_cast<Eigen::Index>(c * plane), static_cast<Eigen::Index>(b),
                  static_cast<Eigen::Index>(plane), 1)
              .transpose();
    }
  }
  return out;
}

ConstRowMap weight_map(const Tensor& w) {
  const auto rows = static_cast<Eigen::Index>(w.shape[0]);
  return ConstRowMap(w.data.data(), rows, static_cast<Eigen::Index>(w.size()) / rows);
}

RowMap weight_map(Tensor& w) {
  const auto rows = static_cast<Eigen::Index>(w.shape[0]);
  return RowMap(w.data.data(), rows, static_cast<Eigen::Index>(w.size()) / rows);
}

ConstVecMap bias_map(const Tensor& b) {
  return ConstVecMap(b.data.data(), static_cast<Eigen::Index>(b.size()));
}

VecMap bias_map(Tensor& b) { return VecMap(b.data.data(), static_cast<Eigen::Index>(b.size())); }

std::vector<ImageShape> layer_input_shapes(const NetworkSpec& spec) {
  std::vector<ImageShape> shapes;
  ImageShape s = spec.input;
  for (const auto& layer : spec.layers) {
    shapes.push_back(s);
    if (const auto* c = std::get_if<ConvSpec>(&layer)) {
      s = {c->out_channels, conv_out(s.height), conv_out(s.width)};
    }
  }
  return shapes;
}

}  // namespace

Matrix forward(const NetworkSpec& spec, const Params& params, const Matrix& images,
               const Matrix& side, ForwardCache* cache) {
  spec.validate();
  if (params.layers.size() != spec.layers.size()) throw ShapeMismatch("params/spec depth differ");
  if (static_cast<std::size_t>(images.rows()) != spec.input.size()) {
    throw ShapeMismatch("image input has " + std::to_string(images.rows()) + " rows, expected " +
                        std::to_string(spec.input.size()));
  }
  const auto batch = static_cast<std::size_t>(images.cols());
  const std::size_t side_width = spec.side_width();
  if (side_width > 0 && (static_cast<std::size_t>(side.rows()) != side_width ||
                         static_cast<std::size_t>(side.cols()) != batch)) {
    throw ShapeMismatch("side input shape mismatch");
  }
  if (cache) {
    cache->inputs.assign(spec.layers.size(), Matrix());
    cache->outputs.assign(spec.layers.size(), Matrix());
    cache->batch = batch;
  }

  const auto shapes = layer_input_shapes(spec);
  Matrix x = images;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& lp = params.layers[i];
    Matrix y;
    if (const auto* c = std::get_if<ConvSpec>(&spec.layers[i])) {
      const ImageShape& s = shapes[i];
      const std::size_t plane = conv_out(s.height) * conv_out(s.width);
      Matrix cols;
      im2col(x, s, cols);
      Matrix z = weight_map(lp.weight) * cols;
      z.colwise() += bias_map(lp.bias);
      z = z.cwiseMax(0.0);
      y = planes_to_columns(z, c->out_channels, plane, batch);
      if (cache) {
        cache->inputs[i] = std::move(cols);
        cache->outputs[i] = std::move(z);
      }
    } else if (const auto* d = std::get_if<DenseSpec>(&spec.layers[i])) {
      y = weight_map(lp.weight) * x;
      y.colwise() += bias_map(lp.bias);
      if (d->activation == Activation::Relu) y = y.cwiseMax(0.0);
      if (cache) {
        cache->inputs[i] = x;
        cache->outputs[i] = y;
      }
    } else {
      y.resize(x.rows() + side.rows(), static_cast<Eigen::Index>(batch));
      y << x, side;
    }
    x = std::move(y);
  }
  return x;
}

void backward(const NetworkSpec& spec, const Params& params, const ForwardCache& cache,
              const Matrix& grad_out, Params* grads, Matrix* grad_side) {
  const std::size_t batch = cache.batch;
  if (static_cast<std::size_t>(grad_out.cols()) != batch ||
      static_cast<std::size_t>(grad_out.rows()) != spec.output_width()) {
    throw ShapeMismatch("output gradient shape mismatch");
  }
  if (grads) check_same_shapes(params, *grads);
  const auto shapes = layer_input_shapes(spec);

  Matrix g = grad_out;
  for (std::size_t idx = spec.layers.size(); idx-- > 0;) {
    const auto& lp = params.layers[idx];
    if (const auto* c = std::get_if<ConvSpec>(&spec.layers[idx])) {
      if (!grads) return;
      const ImageShape& s = shapes[idx];
      const std::size_t plane = conv_out(s.height) * conv_out(s.width);
      const Matrix& z = cache.outputs[idx];
      Matrix dz = columns_to_planes(g, c->out_channels, plane, batch);
      dz = dz.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
      auto& gl = grads->layers[idx];
      weight_map(gl.weight).noalias() = dz * cache.inputs[idx].transpose();
      bias_map(gl.bias) = dz.rowwise().sum();
      if (idx == 0) return;
      const Matrix dcols = weight_map(lp.weight).transpose() * dz;
      col2im(dcols, s, batch, g);
    } else if (const auto* d = std::get_if<DenseSpec>(&spec.layers[idx])) {
      Matrix dz = g;
      if (d->activation == Activation::Relu) {
        dz = dz.cwiseProduct((cache.outputs[idx].array() > 0.0).cast<double>().matrix());
      }
      if (grads) {
        auto& gl = grads->layers[idx];
        weight_map(gl.weight).noalias() = dz * cache.inputs[idx].transpose();
        bias_map(gl.bias) = dz.rowwise().sum();
      }
      if (idx == 0) return;
      g = weight_map(lp.weight).transpose() * dz;
    } else {
      const auto& cs = std::get<ConcatSpec>(spec.layers[idx]);
      const auto main_rows = g.rows() - static_cast<Eigen::Index>(cs.side_width);
      if (grad_side) *grad_side = g.bottomRows(static_cast<Eigen::Index>(cs.side_width));
      if (!grads) return;
      Matrix top = g.topRows(main_rows);
      g = std::move(top);
    }
  }
}

Tensor forward(const NetworkSpec& spec, const Params& params, const Tensor& image,
               const Tensor& scalars) {
  if (image.size() != spec.input.size()) throw ShapeMismatch("image tensor size mismatch");
  const std::size_t side_width = spec.side_width();
  if (side_width > 0 && scalars.size() != side_width) {
    throw ShapeMismatch("scalar tensor size mismatch");
  }
  const Matrix x = Eigen::Map<const Matrix>(image.data.data(),
                                            static_cast<Eigen::Index>(image.size()), 1);
  Matrix side(static_cast<Eigen::Index>(side_width), 1);
  for (std::size_t i = 0; i < side_width; ++i) side(static_cast<Eigen::Index>(i), 0) = scalars.data[i];
  const Matrix y = forward(spec, params, x, side);
  Tensor out({static_cast<std::size_t>(y.rows())});
  for (Eigen::Index i = 0; i < y.rows(); ++i) out.data[static_cast<std::size_t>(i)] = y(i, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Squashed Gaussian

SquashedSample squashed_gaussian_sample(std::span<const double> mean,
                                        std::span<const double> log_std,
                                        std::span<const double> noise) {
  if (mean.size() != log_std.size() || mean.size() != noise.size()) {
    throw ShapeMismatch("squashed Gaussian inputs differ in length");
  }
  static const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
  SquashedSample out;
  out.action.resize(mean.size());
  out.pre_tanh.resize(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double ls = std::clamp(log_std[i], kLogStdMin, kLogStdMax);
    const double u = mean[i] + std::exp(ls) * noise[i];
    const double a = std::tanh(u);
    out.pre_tanh[i] = u;
    out.action[i] = a;
    out.log_prob += -0.5 * noise[i] * noise[i] - ls - kHalfLog2Pi -
                    std::log(1.0 - a * a + kTanhEpsilon);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adam

Adam::Adam(const Params& like, double learning_rate)
    : lr(learning_rate), m(zeros_like(like)), v(zeros_like(like)) {}

void Adam::step(Params& params, const Params& grads) {
  check_same_shapes(params, grads);
  check_same_shapes(params, m);
  ++t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto update = [&](Tensor& p, const Tensor& g, Tensor& mt, Tensor& vt) {
      for (std::size_t i = 0; i < p.data.size(); ++i) {
        const double gi = g.data[i];
        mt.data[i] = beta1 * mt.data[i] + (1.0 - beta1) * gi;
        vt.data[i] = beta2 * vt.data[i] + (1.0 - beta2) * gi * gi;
        const double mhat = mt.data[i] / c1;
        const double vhat = vt.data[i] / c2;
        p.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
      }
    };
    update(params.layers[l].weight, grads.layers[l].weight, m.layers[l].weight, v.layers[l].weight);
    update(params.layers[l].bias, grads.layers[l].bias, m.layers[l].bias, v.layers[l].bias);
  }
}

void ScalarAdam::step(double& param, double grad) {
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad * grad;
  const double mhat = m / (1.0 - std::pow(beta1, static_cast<double>(t)));
  const double vhat = v / (1.0 - std::pow(beta2, static_cast<double>(t)));
  param -= lr * mhat / (std::sqrt(vhat) + eps);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json spec_to_json(const NetworkSpec& spec) {
  json layers = json::array();
  for (const auto& layer : spec.layers) {
    std::visit(Overloaded{
                   [&](const ConvSpec& c) {
                     layers.push_back({{"type", "conv"}, {"in_channels", c.in_channels},
                                       {"out_channels", c.out_channels}});
                   },
                   [&](const DenseSpec& d) {
                     layers.push_back({{"type", "dense"}, {"in", d.in}, {"out", d.out},
                                       {"activation",
                                        d.activation == Activation::Relu ? "relu" : "none"}});
                   },
                   [&](const ConcatSpec& c) {
                     layers.push_back({{"type", "concat"}, {"side_width", c.side_width}});
                   },
               },
               layer);
  }
  return {{"input",
           {{"channels", spec.input.channels},
            {"height", spec.input.height},
            {"width", spec.input.width}}},
          {"layers", layers}};
}

NetworkSpec spec_from_json(const json& j) {
  NetworkSpec spec;
  const auto& in = j.at("input");
  spec.input = {in.at("channels").get<std::size_t>(), in.at("height").get<std::size_t>(),
                in.at("width").get<std::size_t>()};
  for (const auto& l : j.at("layers")) {
    const auto type = l.at("type").get<std::string>();
    if (type == "conv") {
      spec.layers.emplace_back(
          ConvSpec{l.at("in_channels").get<std::size_t>(), l.at("out_channels").get<std::size_t>()});
    } else if (type == "dense") {
      const auto act = l.at("activation").get<std::string>();
      if (act != "relu" && act != "none") throw ShapeMismatch("unknown activation '" + act + "'");
      spec.layers.emplace_back(DenseSpec{l.at("in").get<std::size_t>(), l.at("out").get<std::size_t>(),
                                         act == "relu" ? Activation::Relu : Activation::None});
    } else if (type == "concat") {
      spec.layers.emplace_back(ConcatSpec{l.at("side_width").get<std::size_t>()});
    } else {
      throw ShapeMismatch("unknown layer type '" + type + "'");
    }
  }
  spec.validate();
  return spec;
}

}  // namespace

std::string params_to_json(const NetworkSpec& spec, const Params& params) {
  check_shapes(spec, params);
  json layers = json::array();
  for (const auto& lp : params.layers) {
    layers.push_back({{"weight", std::vector<double>(lp.weight.data.begin(), lp.weight.data.end())},
                      {"bias", std::vector<double>(lp.bias.data.begin(), lp.bias.data.end())}});
  }
  json doc = {{"version", kParamsFormatVersion}, {"spec", spec_to_json(spec)}, {"params", layers}};
  return doc.dump();
}

void params_from_json(const std::string& text, NetworkSpec& spec, Params& params) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ShapeMismatch(std::string("malformed parameter document: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kParamsFormatVersion) {
      throw ShapeMismatch("unsupported parameter document version");
    }
    NetworkSpec parsed = spec_from_json(doc.at("spec"));
    Params p = zero_params(parsed);
    const auto& layers = doc.at("params");
    if (layers.size() != p.layers.size()) throw ShapeMismatch("parameter layer count mismatch");
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
      auto w = layers[i].at("weight").get<std::vector<double>>();
      auto b = layers[i].at("bias").get<std::vector<double>>();
      if (w.size() != p.layers[i].weight.size() || b.size() != p.layers[i].bias.size()) {
        throw ShapeMismatch("parameter array length mismatch at layer " + std::to_string(i));
      }
      p.layers[i].weight.data.assign(w.begin(), w.end());
      p.layers[i].bias.data.assign(b.begin(), b.end());
    }
    spec = std::move(parsed);
    params = std::move(p);
  } catch (const json::exception& e) {
    throw ShapeMismatch(std::string("malformed parameter document: ") + e.what());
  }
}

void save_params(const std::string& path, const NetworkSpec& spec, const Params& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << params_to_json(spec, params) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void load_params(const std::string& path, NetworkSpec& spec, Params& params) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  params_from_json(ss.str(), spec, params);
}

}  // namespace agcas::nn
