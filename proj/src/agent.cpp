#include "agcas/agent.hpp"

#include "agcas/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace agcas {

using nn::Matrix;

void SacConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw AgentError(AgentError::Kind::InvalidConfig, "gamma must lie in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw AgentError(AgentError::Kind::InvalidConfig, "tau must lie in (0, 1]");
  if (!(lr > 0.0)) throw AgentError(AgentError::Kind::InvalidConfig, "learning rate must be positive");
  if (batch_size == 0 || batch_size > buffer_capacity) {
    throw AgentError(AgentError::Kind::InvalidConfig, "batch size must be in [1, buffer_capacity]");
  }
  if (!(initial_alpha > 0.0)) throw AgentError(AgentError::Kind::InvalidConfig, "initial alpha must be positive");
}

void ArchConfig::validate() const {
  if (feature_width == 0 || hidden.empty()) {
    throw AgentError(AgentError::Kind::InvalidConfig, "network widths must be non-empty");
  }
  for (auto c : conv_channels) {
    if (c == 0) throw AgentError(AgentError::Kind::InvalidConfig, "conv channels must be positive");
  }
  for (auto h : hidden) {
    if (h == 0) throw AgentError(AgentError::Kind::InvalidConfig, "hidden widths must be positive");
  }
  if (!(actor_head_scale > 0.0)) {
    throw AgentError(AgentError::Kind::InvalidConfig, "actor head scale must be positive");
  }
}

namespace {

nn::NetworkSpec build_spec(std::size_t rows, std::size_t cols, const ArchConfig& arch,
                           std::size_t side_width, std::size_t out_width) {
  arch.validate();
  nn::NetworkSpec spec;
  spec.input = {1, rows, cols};
  std::size_t channels = 1, h = rows, w = cols;
  for (auto c : arch.conv_channels) {
    spec.layers.emplace_back(nn::ConvSpec{channels, c});
    channels = c;
    h = nn::conv_out(h);
    w = nn::conv_out(w);
  }
  spec.layers.emplace_back(nn::DenseSpec{channels * h * w, arch.feature_width, nn::Activation::Relu});
  spec.layers.emplace_back(nn::ConcatSpec{side_width});
  std::size_t width = arch.feature_width + side_width;
  for (auto hidden : arch.hidden) {
    spec.layers.emplace_back(nn::DenseSpec{width, hidden, nn::Activation::Relu});
    width = hidden;
  }
  spec.layers.emplace_back(nn::DenseSpec{width, out_width, nn::Activation::None});
  spec.validate();
  return spec;
}

Matrix standard_normal(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  // Column-by-column so a sample's noise does not depend on the batch size.
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = normal(rng);
  }
  return m;
}

Matrix stack_side(const Matrix& scalars, const Matrix& actions) {
  Matrix side(scalars.rows() + actions.rows(), scalars.cols());
  side << scalars, actions;
  return side;
}

// Actor pass retaining what the reparameterised gradient needs.
struct PolicyPass {
  nn::ForwardCache cache;
  Matrix log_std;    // clamped
  Matrix std_dev;
  Matrix clamp_mask; // 1 where log_std was inside the clamp range
  Matrix actions;
  Eigen::VectorXd log_probs;
};

PolicyPass run_policy(const SacState& sac, const Matrix& images, const Matrix& scalars,
                      const Matrix& noise, bool keep_cache) {
  PolicyPass pass;
  const Matrix out =
      nn::forward(sac.actor_spec, sac.actor, images, scalars, keep_cache ? &pass.cache : nullptr);
  const Eigen::Index batch = out.cols();
  if (noise.rows() != static_cast<Eigen::Index>(kActionSize) || noise.cols() != batch) {
    throw nn::ShapeMismatch("policy noise shape mismatch");
  }
  const Matrix mean = out.topRows(kActionSize);
  const Matrix raw_log_std = out.bottomRows(kActionSize);
  pass.log_std = raw_log_std.cwiseMax(nn::kLogStdMin).cwiseMin(nn::kLogStdMax);
  pass.clamp_mask = ((raw_log_std.array() >= nn::kLogStdMin) &&
                     (raw_log_std.array() <= nn::kLogStdMax)).cast<double>().matrix();
  pass.std_dev = pass.log_std.array().exp().matrix();
  pass.actions.resize(kActionSize, batch);
  pass.log_probs.resize(batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const double m[kActionSize] = {mean(0, b), mean(1, b)};
    const double ls[kActionSize] = {pass.log_std(0, b), pass.log_std(1, b)};
    const double eps[kActionSize] = {noise(0, b), noise(1, b)};
    const auto s = nn::squashed_gaussian_sample(m, ls, eps);
    pass.actions(0, b) = s.action[0];
    pass.actions(1, b) = s.action[1];
    pass.log_probs(b) = s.log_prob;
  }
  return pass;
}

}  // namespace

nn::NetworkSpec actor_spec(std::size_t rows, std::size_t cols, const ArchConfig& arch) {
  return build_spec(rows, cols, arch, kScalarObsSize, 2 * kActionSize);
}

nn::NetworkSpec critic_spec(std::size_t rows, std::size_t cols, const ArchConfig& arch) {
  return build_spec(rows, cols, arch, kScalarObsSize + kActionSize, 1);
}

// ---------------------------------------------------------------------------
// Replay buffer

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t image_size)
    : capacity_(capacity), image_size_(image_size) {
  if (capacity_ == 0) throw AgentError(AgentError::Kind::InvalidConfig, "replay capacity must be positive");
}

void ReplayBuffer::push(const Observation& obs, const Action& action, double reward,
                        const Observation& next_obs, bool done) {
  if (obs.image.size() != image_size_ || next_obs.image.size() != image_size_) {
    throw nn::ShapeMismatch("observation image size does not match the replay buffer");
  }
  const std::size_t slot = pushes_ % capacity_;
  if (slot * image_size_ == images_.size()) {
    images_.resize(images_.size() + image_size_);
    next_images_.resize(next_images_.size() + image_size_);
    scalars_.resize(scalars_.size() + kScalarObsSize);
    next_scalars_.resize(next_scalars_.size() + kScalarObsSize);
    actions_.resize(actions_.size() + kActionSize);
    rewards_.push_back(0.0);
    dones_.push_back(0.0);
  }
  std::copy(obs.image.begin(), obs.image.end(), images_.begin() + static_cast<std::ptrdiff_t>(slot * image_size_));
  std::copy(next_obs.image.begin(), next_obs.image.end(),
            next_images_.begin() + static_cast<std::ptrdiff_t>(slot * image_size_));
  std::copy(obs.scalars.begin(), obs.scalars.end(),
            scalars_.begin() + static_cast<std::ptrdiff_t>(slot * kScalarObsSize));
  std::copy(next_obs.scalars.begin(), next_obs.scalars.end(),
            next_scalars_.begin() + static_cast<std::ptrdiff_t>(slot * kScalarObsSize));
  actions_[slot * kActionSize] = action.aileron;
  actions_[slot * kActionSize + 1] = action.elevator;
  rewards_[slot] = reward;
  dones_[slot] = done ? 1.0 : 0.0;
  ++pushes_;
  size_ = std::min(size_ + 1, capacity_);
}

double ReplayBuffer::reward_at(std::size_t slot) const {
  if (slot >= size_) throw std::out_of_range("replay slot out of range");
  return rewards_[physical(slot)];
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& slots) const {
  const auto n = static_cast<Eigen::Index>(slots.size());
  const auto img = static_cast<Eigen::Index>(image_size_);
  const auto sc = static_cast<Eigen::Index>(kScalarObsSize);
  Batch batch;
  batch.images.resize(img, n);
  batch.next_images.resize(img, n);
  batch.scalars.resize(sc, n);
  batch.next_scalars.resize(sc, n);
  batch.actions.resize(kActionSize, n);
  batch.rewards.resize(n);
  batch.dones.resize(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const std::size_t slot = slots[static_cast<std::size_t>(b)];
    if (slot >= size_) throw std::out_of_range("replay slot out of range");
    const std::size_t i = physical(slot);
    batch.images.col(b) = Eigen::Map<const Eigen::VectorXd>(&images_[i * image_size_], img);
    batch.next_images.col(b) = Eigen::Map<const Eigen::VectorXd>(&next_images_[i * image_size_], img);
    batch.scalars.col(b) = Eigen::Map<const Eigen::VectorXd>(&scalars_[i * kScalarObsSize], sc);
    batch.next_scalars.col(b) = Eigen::Map<const Eigen::VectorXd>(&next_scalars_[i * kScalarObsSize], sc);
    batch.actions(0, b) = actions_[i * kActionSize];
    batch.actions(1, b) = actions_[i * kActionSize + 1];
    batch.rewards(b) = rewards_[i];
    batch.dones(b) = dones_[i];
  }
  return batch;
}

Batch ReplayBuffer::sample(std::size_t batch_size, std::mt19937_64& rng) const {
  if (size_ < batch_size || batch_size == 0) {
    throw AgentError(AgentError::Kind::BufferTooSmall, "replay buffer holds fewer transitions than the batch size");
  }
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> slots(batch_size);
  for (auto& s : slots) s = pick(rng);
  return gather(slots);
}

// ---------------------------------------------------------------------------
// SAC

SacState make_sac(std::size_t rows, std::size_t cols, const ArchConfig& arch,
                  const SacConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  SacState sac;
  sac.actor_spec = actor_spec(rows, cols, arch);
  sac.critic_spec = critic_spec(rows, cols, arch);
  sac.actor = nn::init_params(sac.actor_spec, rng, arch.actor_head_scale);
  sac.critic1 = nn::init_params(sac.critic_spec, rng);
  sac.critic2 = nn::init_params(sac.critic_spec, rng);
  sac.target1 = sac.critic1;
  sac.target2 = sac.critic2;
  sac.log_alpha = std::log(cfg.initial_alpha);
  sac.actor_opt = nn::Adam(sac.actor, cfg.lr);
  sac.critic1_opt = nn::Adam(sac.critic1, cfg.lr);
  sac.critic2_opt = nn::Adam(sac.critic2, cfg.lr);
  sac.alpha_opt.lr = cfg.lr;
  return sac;
}

void pack_observations(const std::vector<const Observation*>& obs, Matrix& images, Matrix& scalars) {
  if (obs.empty()) throw std::invalid_argument("no observations to pack");
  const auto img = static_cast<Eigen::Index>(obs.front()->image.size());
  const auto n = static_cast<Eigen::Index>(obs.size());
  images.resize(img, n);
  scalars.resize(kScalarObsSize, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const Observation& o = *obs[static_cast<std::size_t>(b)];
    if (static_cast<Eigen::Index>(o.image.size()) != img) throw nn::ShapeMismatch("observation image sizes differ");
    images.col(b) = Eigen::Map<const Eigen::VectorXd>(o.image.data(), img);
    scalars.col(b) = Eigen::Map<const Eigen::VectorXd>(o.scalars.data(), kScalarObsSize);
  }
}

Action select_action(const SacState& sac, const Observation& obs, bool deterministic,
                     std::mt19937_64& rng) {
  Matrix images, scalars;
  pack_observations({&obs}, images, scalars);
  if (deterministic) {
    const Matrix out = nn::forward(sac.actor_spec, sac.actor, images, scalars);
    return {std::tanh(out(0, 0)), std::tanh(out(1, 0))};
  }
  const Matrix noise = standard_normal(kActionSize, 1, rng);
  const PolicyPass pass = run_policy(sac, images, scalars, noise, false);
  return {pass.actions(0, 0), pass.actions(1, 0)};
}

PolicyBatch policy_sample(const SacState& sac, const Matrix& images, const Matrix& scalars,
                          const Matrix& noise) {
  PolicyPass pass = run_policy(sac, images, scalars, noise, false);
  return {std::move(pass.actions), std::move(pass.log_probs)};
}

Eigen::VectorXd critic_target(const SacState& sac, const Batch& batch, const SacConfig& cfg,
                              const Matrix& next_noise) {
  const PolicyBatch next = policy_sample(sac, batch.next_images, batch.next_scalars, next_noise);
  const Matrix side = stack_side(batch.next_scalars, next.actions);
  const Matrix q1 = nn::forward(sac.critic_spec, sac.target1, batch.next_images, side);
  const Matrix q2 = nn::forward(sac.critic_spec, sac.target2, batch.next_images, side);
  const double alpha = sac.alpha();
  Eigen::VectorXd y(batch.rewards.size());
  for (Eigen::Index b = 0; b < y.size(); ++b) {
    const double soft_value = std::min(q1(0, b), q2(0, b)) - alpha * next.log_probs(b);
    y(b) = batch.rewards(b) + cfg.gamma * (1.0 - batch.dones(b)) * soft_value;
  }
  return y;
}

Eigen::VectorXd critic_target(const SacState& sac, const Batch& batch, const SacConfig& cfg,
                              std::mt19937_64& rng) {
  return critic_target(sac, batch, cfg, standard_normal(kActionSize, batch.size(), rng));
}

void polyak_update(nn::Params& target, const nn::Params& online, double tau) {
  nn::check_same_shapes(target, online);
  for (std::size_t l = 0; l < target.layers.size(); ++l) {
    auto blend = [tau](nn::Tensor& t, const nn::Tensor& o) {
      for (std::size_t i = 0; i < t.data.size(); ++i) {
        t.data[i] = tau * o.data[i] + (1.0 - tau) * t.data[i];
      }
    };
    blend(target.layers[l].weight, online.layers[l].weight);
    blend(target.layers[l].bias, online.layers[l].bias);
  }
}

Losses update_step(SacState& sac, const Batch& batch, const SacConfig& cfg, std::mt19937_64& rng) {
  const std::size_t n = batch.size();
  if (n == 0) throw AgentError(AgentError::Kind::BufferTooSmall, "empty batch");
  const double inv_n = 1.0 / static_cast<double>(n);
  Losses losses;

  // Critics regress onto the soft Bellman target.
  const Eigen::VectorXd y = critic_target(sac, batch, cfg, rng);
  const Matrix side = stack_side(batch.scalars, batch.actions);
  auto fit_critic = [&](nn::Params& critic, nn::Adam& opt) {
    nn::ForwardCache cache;
    const Matrix q = nn::forward(sac.critic_spec, critic, batch.images, side, &cache);
    const Eigen::RowVectorXd diff = q.row(0) - y.transpose();
    nn::Params grads = nn::zeros_like(critic);
    nn::backward(sac.critic_spec, critic, cache, (2.0 * inv_n) * diff, &grads, nullptr);
    opt.step(critic, grads);
    return diff.squaredNorm() * inv_n;
  };
  losses.critic1 = fit_critic(sac.critic1, sac.critic1_opt);
  losses.critic2 = fit_critic(sac.critic2, sac.critic2_opt);

  // Actor: reparameterised sample, minimise alpha * log pi - min Q.
  const Matrix noise = standard_normal(kActionSize, n, rng);
  PolicyPass pass = run_policy(sac, batch.images, batch.scalars, noise, true);
  const Matrix new_side = stack_side(batch.scalars, pass.actions);
  nn::ForwardCache c1, c2;
  const Matrix q1 = nn::forward(sac.critic_spec, sac.critic1, batch.images, new_side, &c1);
  const Matrix q2 = nn::forward(sac.critic_spec, sac.critic2, batch.images, new_side, &c2);
  Matrix pick1 = Matrix::Zero(1, static_cast<Eigen::Index>(n));
  Matrix pick2 = Matrix::Zero(1, static_cast<Eigen::Index>(n));
  const double alpha = sac.alpha();
  double actor_loss = 0.0;
  for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(n); ++b) {
    const bool first = q1(0, b) <= q2(0, b);
    (first ? pick1 : pick2)(0, b) = 1.0;
    actor_loss += alpha * pass.log_probs(b) - (first ? q1(0, b) : q2(0, b));
  }
  losses.actor = actor_loss * inv_n;
  Matrix dside1, dside2;
  nn::backward(sac.critic_spec, sac.critic1, c1, pick1, nullptr, &dside1);
  nn::backward(sac.critic_spec, sac.critic2, c2, pick2, nullptr, &dside2);
  const Matrix dq_da = (dside1 + dside2).bottomRows(kActionSize);

  Matrix grad_out(2 * kActionSize, static_cast<Eigen::Index>(n));
  for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(n); ++b) {
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(kActionSize); ++j) {
      const double a = pass.actions(j, b);
      const double one_minus = 1.0 - a * a;
      const double d_u = inv_n * (alpha * 2.0 * a * one_minus / (one_minus + nn::kTanhEpsilon) -
                                  dq_da(j, b) * one_minus);
      grad_out(j, b) = d_u;
      grad_out(j + kActionSize, b) =
          pass.clamp_mask(j, b) * (d_u * pass.std_dev(j, b) * noise(j, b) - alpha * inv_n);
    }
  }
  nn::Params actor_grads = nn::zeros_like(sac.actor);
  nn::backward(sac.actor_spec, sac.actor, pass.cache, grad_out, &actor_grads, nullptr);
  sac.actor_opt.step(sac.actor, actor_grads);

  // Temperature.
  const double mean_term = (pass.log_probs.array() + cfg.target_entropy).mean();
  losses.alpha = -sac.log_alpha * mean_term;
  sac.alpha_opt.step(sac.log_alpha, -mean_term);

  polyak_update(sac.target1, sac.critic1, cfg.tau);
  polyak_update(sac.target2, sac.critic2, cfg.tau);
  ++sac.updates;
  return losses;
}

// ---------------------------------------------------------------------------
// Training

void write_training_log(const std::vector<TrainingLogRow>& rows, std::ostream& out) {
  out << kTrainingLogHeader << '\n';
  for (const auto& r : rows) {
    csv::Row row;
    row << static_cast<long long>(r.env_step) << static_cast<long long>(r.episode)
        << r.episode_return << r.collision << r.negg << r.loss_c1 << r.loss_c2 << r.loss_actor
        << r.alpha;
    out << row.str() << '\n';
  }
}

TrainResult train(const EnvFactory& make_env, const SacConfig& cfg, const ArchConfig& arch,
                  const std::vector<InitialCondition>& ics, const TrainingOptions& options) {
  if (ics.empty()) throw AgentError(AgentError::Kind::EmptyInitialConditions, "no initial conditions to train on");
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  Environment env = make_env();
  const auto& lidar = env.config().lidar;

  TrainResult result{make_sac(lidar.rows, lidar.cols, arch, cfg, rng), {}, false};
  SacState& sac = result.sac;
  ReplayBuffer buffer(cfg.buffer_capacity, lidar.size());

  std::vector<std::size_t> order(ics.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t next_ic = 0;

  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Observation obs;
  TrainingLogRow episode_row;
  std::size_t episode_updates = 0;
  std::uint64_t episode = 0;

  for (std::size_t step = 0; step < options.total_steps; ++step) {
    if (options.stop && options.stop->load()) {
      result.stopped = true;
      break;
    }
    if (!env.active()) {
      obs = env.reset(ics[order[next_ic++ % order.size()]]);
      episode_row = {};
      episode_updates = 0;
    }
    Action action;
    if (step < cfg.warmup_steps) {
      action.aileron = uniform(rng);
      action.elevator = uniform(rng);
    } else {
      action = select_action(sac, obs, false, rng);
    }
    if (options.action_hook) options.action_hook(action);

    const Transition tr = env.step(action);
    const bool terminal =
        tr.termination == Termination::Collision || tr.termination == Termination::NegativeG;
    buffer.push(obs, action, tr.reward.total, tr.observation, terminal);
    obs = tr.observation;
    ++sac.env_steps;
    episode_row.episode_return += tr.reward.total;

    if (step >= cfg.warmup_steps && buffer.size() >= cfg.batch_size) {
      for (std::size_t u = 0; u < cfg.updates_per_env_step; ++u) {
        const Losses l = update_step(sac, buffer.sample(cfg.batch_size, rng), cfg, rng);
        episode_row.loss_c1 += l.critic1;
        episode_row.loss_c2 += l.critic2;
        episode_row.loss_actor += l.actor;
        ++episode_updates;
      }
    }

    if (tr.done) {
      if (episode_updates > 0) {
        const double k = static_cast<double>(episode_updates);
        episode_row.loss_c1 /= k;
        episode_row.loss_c2 /= k;
        episode_row.loss_actor /= k;
      }
      episode_row.env_step = sac.env_steps;
      episode_row.episode = episode++;
      episode_row.collision = tr.termination == Termination::Collision;
      episode_row.negg = tr.termination == Termination::NegativeG;
      episode_row.alpha = sac.alpha();
      result.log.push_back(episode_row);
    }

    if (options.checkpoint && options.checkpoint_every > 0 &&
        (step + 1) % options.checkpoint_every == 0) {
      if (!options.checkpoint(step + 1, sac)) {
        result.stopped = true;
        break;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation

Policy actor_policy(const nn::NetworkSpec& spec, const nn::Params& actor) {
  return [spec, actor](const Observation& obs) {
    Matrix images, scalars;
    pack_observations({&obs}, images, scalars);
    const Matrix out = nn::forward(spec, actor, images, scalars);
    return Action{std::tanh(out(0, 0)), std::tanh(out(1, 0))};
  };
}

EvalReport evaluate(const Policy& policy, const EnvFactory& make_env,
                    const std::vector<InitialCondition>& ics, std::size_t episodes,
                    const TraceSink& sink) {
  if (ics.empty()) throw AgentError(AgentError::Kind::EmptyInitialConditions, "no initial conditions to evaluate");
  EvalReport report;
  report.episodes = episodes;
  if (episodes == 0) return report;
  Environment env = make_env();
  std::size_t collisions = 0, neggs = 0;
  double min_hat_sum = 0.0;
  std::vector<TraceRow> trace;
  for (std::size_t e = 0; e < episodes; ++e) {
    Observation obs = env.reset(ics[e % ics.size()]);
    double ret = 0.0;
    double min_hat = env.hat();
    trace.clear();
    while (env.active()) {
      const Transition tr = env.step(policy(obs));
      obs = tr.observation;
      ret += tr.reward.total;
      min_hat = std::min(min_hat, env.hat());
      if (sink) trace.push_back(env.last_trace());
      if (tr.termination == Termination::Collision) ++collisions;
      if (tr.termination == Termination::NegativeG) ++neggs;
    }
    if (sink) sink(e, trace);
    report.returns.push_back(ret);
    min_hat_sum += min_hat;
  }
  const double n = static_cast<double>(episodes);
  report.collision_rate = static_cast<double>(collisions) / n;
  report.negg_rate = static_cast<double>(neggs) / n;
  report.mean_return = std::accumulate(report.returns.begin(), report.returns.end(), 0.0) / n;
  report.mean_min_hat = min_hat_sum / n;
  return report;
}

EvalReport evaluate(const SacState& sac, const EnvFactory& make_env,
                    const std::vector<InitialCondition>& ics, std::size_t episodes,
                    const TraceSink& sink) {
  return evaluate(actor_policy(sac.actor_spec, sac.actor), make_env, ics, episodes, sink);
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["episodes"] = report.episodes;
  j["collision_rate"] = report.collision_rate;
  j["negg_rate"] = report.negg_rate;
  j["mean_return"] = report.mean_return;
  j["mean_min_hat"] = report.mean_min_hat;
  j["returns"] = report.returns;
  return j.dump(2);
}

}  // namespace agcas
