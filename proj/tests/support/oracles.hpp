#pragma once

// Independent reference computations shared by unit and acceptance tests.
// Each one is written the slow, obvious way and does not call into the code
// it is used to check.

#include "agcas/agent.hpp"
#include "agcas/nn.hpp"
#include "agcas/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace agcas::oracle {

// Bilinear sample straight from the stored nodes.
inline double bilinear(const TerrainGrid& g, double x, double y) {
  const double fx = (x - g.origin_x()) / g.cell_size();
  const double fy_north = (g.max_y() - y) / g.cell_size();
  const double max_c = static_cast<double>(g.ncols() - 1);
  const double max_r = static_cast<double>(g.nrows() - 1);
  const double cx = std::clamp(fx, 0.0, max_c);
  const double cy = std::clamp(fy_north, 0.0, max_r);
  auto c0 = static_cast<std::size_t>(std::floor(cx));
  auto r0 = static_cast<std::size_t>(std::floor(cy));
  if (c0 + 1 > g.ncols() - 1) c0 = g.ncols() - 2;
  if (r0 + 1 > g.nrows() - 1) r0 = g.nrows() - 2;
  const double tx = cx - static_cast<double>(c0);
  const double ty = cy - static_cast<double>(r0);
  const double z00 = g.at(c0, r0), z10 = g.at(c0 + 1, r0);
  const double z01 = g.at(c0, r0 + 1), z11 = g.at(c0 + 1, r0 + 1);
  return (1 - tx) * (1 - ty) * z00 + tx * (1 - ty) * z10 + (1 - tx) * ty * z01 + tx * ty * z11;
}

inline bool inside(const TerrainGrid& g, double x, double y) {
  return x >= g.origin_x() && x <= g.max_x() && y >= g.origin_y() && y <= g.max_y();
}

// First fine sample at or below the surface; misses once the ray leaves the grid.
inline std::optional<double> brute_los(const TerrainGrid& g, const Vec3& o, const Vec3& d,
                                       double max_range, double fine_step) {
  const auto n = static_cast<std::size_t>(std::ceil(max_range / fine_step));
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = std::min(static_cast<double>(i) * fine_step, max_range);
    const Vec3 p = o + t * d;
    if (!inside(g, p.x(), p.y())) return std::nullopt;
    if (p.z() <= bilinear(g, p.x(), p.y())) return t;
  }
  return std::nullopt;
}

// Per-sample forward pass with plain loops.
inline std::vector<double> naive_forward(const nn::NetworkSpec& spec, const nn::Params& params,
                                         const std::vector<double>& image,
                                         const std::vector<double>& side) {
  std::vector<double> x = image;
  std::size_t ch = spec.input.channels, h = spec.input.height, w = spec.input.width;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const auto& lp = params.layers[l];
    if (const auto* c = std::get_if<nn::ConvSpec>(&spec.layers[l])) {
      const std::size_t ho = (h + 2 - 3) / 2 + 1, wo = (w + 2 - 3) / 2 + 1;
      std::vector<double> y(c->out_channels * ho * wo, 0.0);
      for (std::size_t co = 0; co < c->out_channels; ++co) {
        for (std::size_t oy = 0; oy < ho; ++oy) {
          for (std::size_t ox = 0; ox < wo; ++ox) {
            double acc = lp.bias.data[co];
            for (std::size_t ci = 0; ci < ch; ++ci) {
              for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                  const long iy = static_cast<long>(2 * oy) + ky - 1;
                  const long ix = static_cast<long>(2 * ox) + kx - 1;
                  if (iy < 0 || ix < 0 || iy >= static_cast<long>(h) || ix >= static_cast<long>(w)) continue;
                  acc += lp.weight.data[((co * ch + ci) * 3 + ky) * 3 + kx] *
                         x[(ci * h + iy) * w + ix];
                }
              }
            }
            y[(co * ho + oy) * wo + ox] = std::max(acc, 0.0);
          }
        }
      }
      x = std::move(y);
      ch = c->out_channels;
      h = ho;
      w = wo;
    } else if (const auto* d = std::get_if<nn::DenseSpec>(&spec.layers[l])) {
      std::vector<double> y(d->out, 0.0);
      for (std::size_t o = 0; o < d->out; ++o) {
        double acc = lp.bias.data[o];
        for (std::size_t i = 0; i < d->in; ++i) acc += lp.weight.data[o * d->in + i] * x[i];
        y[o] = d->activation == nn::Activation::Relu ? std::max(acc, 0.0) : acc;
      }
      x = std::move(y);
    } else {
      x.insert(x.end(), side.begin(), side.end());
    }
  }
  return x;
}

// Random spec mixing conv, dense and concat layers.
inline nn::NetworkSpec random_spec(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> small(1, 3), side(1, 4), width(2, 6), size(3, 7);
  nn::NetworkSpec spec;
  spec.input = {small(rng), size(rng), size(rng)};
  std::size_t ch = spec.input.channels, h = spec.input.height, w = spec.input.width;
  const std::size_t convs = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
  for (std::size_t i = 0; i < convs; ++i) {
    const std::size_t out = small(rng) + 1;
    spec.layers.push_back(nn::ConvSpec{ch, out});
    ch = out;
    h = nn::conv_out(h);
    w = nn::conv_out(w);
  }
  std::size_t width_now = ch * h * w;
  const bool concat = std::bernoulli_distribution(0.7)(rng);
  if (concat) {
    const std::size_t s = side(rng);
    spec.layers.push_back(nn::ConcatSpec{s});
    width_now += s;
  }
  const std::size_t dense = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
  for (std::size_t i = 0; i < dense; ++i) {
    const bool last = i + 1 == dense;
    const std::size_t out = last ? side(rng) : width(rng);
    spec.layers.push_back(nn::DenseSpec{width_now, out, last ? nn::Activation::None : nn::Activation::Relu});
    width_now = out;
  }
  return spec;
}

// Central differences of `loss` with respect to every parameter.
inline nn::Params numeric_gradient(nn::Params params, const std::function<double(const nn::Params&)>& loss,
                                   double h = 1e-5) {
  nn::Params grad = nn::zeros_like(params);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    for (int which = 0; which < 2; ++which) {
      auto& p = which == 0 ? params.layers[l].weight : params.layers[l].bias;
      auto& g = which == 0 ? grad.layers[l].weight : grad.layers[l].bias;
      for (std::size_t i = 0; i < p.data.size(); ++i) {
        const double keep = p.data[i];
        p.data[i] = keep + h;
        const double up = loss(params);
        p.data[i] = keep - h;
        const double down = loss(params);
        p.data[i] = keep;
        g.data[i] = (up - down) / (2 * h);
      }
    }
  }
  return grad;
}

// Max over entries of |a - n| / max(|a|, |n|, floor).
inline double max_relative_error(const nn::Params& analytic, const nn::Params& numeric,
                                 double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t l = 0; l < analytic.layers.size(); ++l) {
    for (int which = 0; which < 2; ++which) {
      const auto& a = which == 0 ? analytic.layers[l].weight : analytic.layers[l].bias;
      const auto& n = which == 0 ? numeric.layers[l].weight : numeric.layers[l].bias;
      for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double denom = std::max({std::abs(a.data[i]), std::abs(n.data[i]), floor});
        worst = std::max(worst, std::abs(a.data[i] - n.data[i]) / denom);
      }
    }
  }
  return worst;
}

// Log-density of the squashed Gaussian at action a, written from the
// change-of-variables formula.
inline double squashed_log_density(double a, double mean, double log_std) {
  const double u = std::atanh(a);
  const double std = std::exp(log_std);
  const double z = (u - mean) / std;
  return -0.5 * z * z - std::log(std * std::sqrt(2.0 * M_PI)) - std::log(1.0 - a * a + 1e-6);
}

// Soft Bellman target for one sample given the pieces separately.
inline double soft_target(double r, double gamma, bool done, double q1, double q2, double alpha,
                          double log_pi) {
  return r + gamma * (done ? 0.0 : 1.0) * (std::min(q1, q2) - alpha * log_pi);
}

// Per-sample soft Bellman target from plain loops: actor head, clamped
// log-std, tanh squashing, both target critics.
inline std::vector<double> scalar_critic_target(const SacState& sac, const Batch& batch, double gamma,
                                                const nn::Matrix& noise) {
  std::vector<double> out;
  for (Eigen::Index b = 0; b < batch.next_images.cols(); ++b) {
    const std::vector<double> image(batch.next_images.col(b).data(),
                                    batch.next_images.col(b).data() + batch.next_images.rows());
    std::vector<double> side(batch.next_scalars.col(b).data(),
                             batch.next_scalars.col(b).data() + batch.next_scalars.rows());
    const auto head = naive_forward(sac.actor_spec, sac.actor, image, side);
    double log_pi = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      const double log_std = std::clamp(head[j + 2], -20.0, 2.0);
      const double a = std::tanh(head[j] + std::exp(log_std) * noise(static_cast<Eigen::Index>(j), b));
      log_pi += squashed_log_density(a, head[j], log_std);
      side.push_back(a);
    }
    const double q1 = naive_forward(sac.critic_spec, sac.target1, image, side)[0];
    const double q2 = naive_forward(sac.critic_spec, sac.target2, image, side)[0];
    out.push_back(soft_target(batch.rewards(b), gamma, batch.dones(b) != 0.0, q1, q2, sac.alpha(), log_pi));
  }
  return out;
}

}  // namespace agcas::oracle
