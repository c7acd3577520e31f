#pragma once

// Random inputs for agent tests.

#include "agcas/agent.hpp"

#include <random>

namespace agcas::fixture {

inline Observation random_observation(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u01(0.0, 1.0), u11(-1.0, 1.0);
  Observation o;
  o.rows = rows;
  o.cols = cols;
  o.image.resize(rows * cols);
  for (auto& v : o.image) v = u01(rng);
  for (auto& v : o.scalars) v = u11(rng);
  return o;
}

/// Buffer of `n` random transitions; roughly one in five is terminal.
inline ReplayBuffer random_buffer(std::mt19937_64& rng, std::size_t n, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u11(-1.0, 1.0);
  std::bernoulli_distribution terminal(0.2);
  ReplayBuffer buffer(n, rows * cols);
  for (std::size_t i = 0; i < n; ++i) {
    const auto obs = random_observation(rng, rows, cols);
    const auto next = random_observation(rng, rows, cols);
    buffer.push(obs, Action{u11(rng), u11(rng)}, 10.0 * u11(rng), next, terminal(rng));
  }
  return buffer;
}

inline ArchConfig small_arch() {
  ArchConfig arch;
  arch.conv_channels = {2, 4};
  arch.feature_width = 16;
  arch.hidden = {32, 32};
  return arch;
}

}  // namespace agcas::fixture
