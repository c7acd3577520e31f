#pragma once

#include "agcas/env.hpp"
#include "agcas/nn.hpp"

#include <atomic>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace agcas {

class AgentError : public std::runtime_error {
 public:
  enum class Kind { BufferTooSmall, InvalidConfig, EmptyInitialConditions };
  AgentError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct SacConfig {
  double gamma = 0.99;
  double tau = 0.005;
  double lr = 3e-4;
  std::size_t batch_size = 256;
  std::size_t buffer_capacity = 200000;
  std::size_t warmup_steps = 1000;
  double target_entropy = -2.0;
  std::size_t updates_per_env_step = 1;
  double initial_alpha = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Feature extractor and trunk widths shared by actor and critics (each
/// network owns its weights).
struct ArchConfig {
  std::vector<std::size_t> conv_channels{8, 16};
  std::size_t feature_width = 64;
  std::vector<std::size_t> hidden{256, 256};
  /// Bound multiplier for the actor's output layer initialisation.
  double actor_head_scale = 1e-3;

  void validate() const;
};

nn::NetworkSpec actor_spec(std::size_t rows, std::size_t cols, const ArchConfig& arch);
nn::NetworkSpec critic_spec(std::size_t rows, std::size_t cols, const ArchConfig& arch);

/// Column-major batch of transitions, one column per sample.
struct Batch {
  nn::Matrix images;
  nn::Matrix scalars;
  nn::Matrix actions;
  Eigen::VectorXd rewards;
  nn::Matrix next_images;
  nn::Matrix next_scalars;
  Eigen::VectorXd dones;

  std::size_t size() const { return static_cast<std::size_t>(rewards.size()); }
};

/// Ring buffer of transitions; storage grows on demand up to capacity.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t image_size);

  void push(const Observation& obs, const Action& action, double reward,
            const Observation& next_obs, bool done);
  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return capacity_; }
  /// Insertion index of the oldest retained transition.
  std::size_t oldest() const noexcept { return pushes_ - size_; }
  std::size_t pushes() const noexcept { return pushes_; }
  /// Batch from explicit slot indices (0 = oldest retained).
  Batch gather(const std::vector<std::size_t>& slots) const;
  /// Uniform sample with replacement; throws BufferTooSmall below batch_size.
  Batch sample(std::size_t batch_size, std::mt19937_64& rng) const;
  /// Reward stored for the transition at slot (0 = oldest retained).
  double reward_at(std::size_t slot) const;

 private:
  std::size_t physical(std::size_t slot) const { return (oldest() + slot) % capacity_; }

  std::size_t capacity_;
  std::size_t image_size_;
  std::size_t size_ = 0;
  std::size_t pushes_ = 0;
  std::vector<double> images_, scalars_, next_images_, next_scalars_;
  std::vector<double> actions_, rewards_, dones_;
};

struct SacState {
  nn::NetworkSpec actor_spec;
  nn::NetworkSpec critic_spec;
  nn::Params actor;
  nn::Params critic1, critic2;
  nn::Params target1, target2;
  double log_alpha = 0.0;
  nn::Adam actor_opt, critic1_opt, critic2_opt;
  nn::ScalarAdam alpha_opt;
  std::uint64_t updates = 0;
  std::uint64_t env_steps = 0;

  double alpha() const { return std::exp(log_alpha); }
};

SacState make_sac(std::size_t rows, std::size_t cols, const ArchConfig& arch,
                  const SacConfig& cfg, std::mt19937_64& rng);

/// Stack observations into network inputs.
void pack_observations(const std::vector<const Observation*>& obs, nn::Matrix& images,
                       nn::Matrix& scalars);

/// Deterministic: tanh(mean). Stochastic: squashed Gaussian sample.
Action select_action(const SacState& sac, const Observation& obs, bool deterministic,
                     std::mt19937_64& rng);

/// Sampled tanh-Gaussian actions for a batch.
struct PolicyBatch {
  nn::Matrix actions;         // 2 x B
  Eigen::VectorXd log_probs;  // B
};

/// Actor evaluated at (images, scalars) with the given standard-normal noise.
PolicyBatch policy_sample(const SacState& sac, const nn::Matrix& images,
                          const nn::Matrix& scalars, const nn::Matrix& noise);

/// Soft Bellman targets with explicit next-action noise (2 x B).
Eigen::VectorXd critic_target(const SacState& sac, const Batch& batch, const SacConfig& cfg,
                              const nn::Matrix& next_noise);
Eigen::VectorXd critic_target(const SacState& sac, const Batch& batch, const SacConfig& cfg,
                              std::mt19937_64& rng);

struct Losses {
  double critic1 = 0.0;
  double critic2 = 0.0;
  double actor = 0.0;
  double alpha = 0.0;
};

Losses update_step(SacState& sac, const Batch& batch, const SacConfig& cfg, std::mt19937_64& rng);

/// target <- tau * online + (1 - tau) * target
void polyak_update(nn::Params& target, const nn::Params& online, double tau);

struct TrainingLogRow {
  std::uint64_t env_step = 0;
  std::uint64_t episode = 0;
  double episode_return = 0.0;
  bool collision = false;
  bool negg = false;
  double loss_c1 = 0.0;
  double loss_c2 = 0.0;
  double loss_actor = 0.0;
  double alpha = 0.0;
};

inline constexpr std::string_view kTrainingLogHeader =
    "env_step,episode,return,collision,negg,loss_c1,loss_c2,loss_actor,alpha";
void write_training_log(const std::vector<TrainingLogRow>& rows, std::ostream& out);

using EnvFactory = std::function<Environment()>;

struct TrainingOptions {
  std::size_t total_steps = 0;
  /// Called every `checkpoint_every` environment steps; returning false stops training.
  std::function<bool(std::size_t, const SacState&)> checkpoint;
  std::size_t checkpoint_every = 0;
  const std::atomic<bool>* stop = nullptr;
  /// Observes every action sent to the environment.
  std::function<void(const Action&)> action_hook;
};

struct TrainResult {
  SacState sac;
  std::vector<TrainingLogRow> log;
  bool stopped = false;
};

TrainResult train(const EnvFactory& make_env, const SacConfig& cfg, const ArchConfig& arch,
                  const std::vector<InitialCondition>& ics, const TrainingOptions& options);

struct EvalReport {
  std::size_t episodes = 0;
  double collision_rate = 0.0;
  double negg_rate = 0.0;
  double mean_return = 0.0;
  double mean_min_hat = 0.0;
  std::vector<double> returns;
};

using Policy = std::function<Action(const Observation&)>;
using TraceSink = std::function<void(std::size_t episode, const std::vector<TraceRow>&)>;

/// Episode i starts from ics[i % ics.size()].
EvalReport evaluate(const Policy& policy, const EnvFactory& make_env,
                    const std::vector<InitialCondition>& ics, std::size_t episodes,
                    const TraceSink& sink = {});
EvalReport evaluate(const SacState& sac, const EnvFactory& make_env,
                    const std::vector<InitialCondition>& ics, std::size_t episodes,
                    const TraceSink& sink = {});

/// Deterministic policy from a bare actor network.
Policy actor_policy(const nn::NetworkSpec& spec, const nn::Params& actor);

std::string eval_report_json(const EvalReport& report);

}  // namespace agcas
