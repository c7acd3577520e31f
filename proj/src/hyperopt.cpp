#include "agcas/hyperopt.hpp"

#include "agcas/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

namespace agcas::hyperopt {

SearchSpace SearchSpace::sac_default() {
  SearchSpace s;
  s.dimensions.push_back({"lr", Dimension::Type::LogUniform, 1e-5, 1e-3, {}});
  s.dimensions.push_back({"gamma", Dimension::Type::Uniform, 0.95, 0.999, {}});
  s.dimensions.push_back({"tau", Dimension::Type::LogUniform, 1e-3, 5e-2, {}});
  s.dimensions.push_back({"batch_size", Dimension::Type::Categorical, 0.0, 0.0, {64, 128, 256}});
  return s;
}

void SearchSpace::validate() const {
  using Kind = HyperoptError::Kind;
  if (dimensions.empty()) throw HyperoptError(Kind::InvalidSpace, "search space has no dimensions");
  std::set<std::string> names;
  for (const auto& d : dimensions) {
    if (d.name.empty() || !names.insert(d.name).second) {
      throw HyperoptError(Kind::InvalidSpace, "dimension names must be unique and non-empty");
    }
    switch (d.type) {
      case Dimension::Type::Categorical:
        if (d.choices.empty()) {
          throw HyperoptError(Kind::InvalidSpace, "categorical '" + d.name + "' has no choices");
        }
        break;
      case Dimension::Type::LogUniform:
        if (!(d.lo > 0.0)) {
          throw HyperoptError(Kind::InvalidSpace, "log-uniform '" + d.name + "' needs lo > 0");
        }
        [[fallthrough]];
      case Dimension::Type::Uniform:
        if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || d.lo > d.hi) {
          throw HyperoptError(Kind::InvalidSpace, "dimension '" + d.name + "' needs lo <= hi");
        }
        break;
    }
  }
}

Config sample_config(const SearchSpace& space, std::mt19937_64& rng) {
  space.validate();
  Config cfg;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& d : space.dimensions) {
    switch (d.type) {
      case Dimension::Type::Uniform:
        cfg[d.name] = d.lo + (d.hi - d.lo) * unit(rng);
        break;
      case Dimension::Type::LogUniform: {
        const double a = std::log(d.lo), b = std::log(d.hi);
        cfg[d.name] = d.lo == d.hi ? d.lo : std::clamp(std::exp(a + (b - a) * unit(rng)), d.lo, d.hi);
        break;
      }
      case Dimension::Type::Categorical: {
        std::uniform_int_distribution<std::size_t> pick(0, d.choices.size() - 1);
        cfg[d.name] = d.choices[pick(rng)];
        break;
      }
    }
  }
  return cfg;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool median_prune(const std::vector<double>& references, double value) {
  if (references.size() < 2) return false;
  return value < median(references);
}

const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::Running: return "running";
    case TrialStatus::Pruned: return "pruned";
    case TrialStatus::Complete: return "complete";
  }
  return "unknown";
}

bool TrialReporter::report(std::size_t step, double value) {
  if (!trial_.intermediate.empty() && step <= trial_.intermediate.back().first) {
    throw std::invalid_argument("intermediate steps must be strictly increasing");
  }
  trial_.intermediate.emplace_back(step, value);
  std::vector<double> refs;
  for (const auto& t : history_) {
    if (t.status != TrialStatus::Complete) continue;
    for (const auto& [s, v] : t.intermediate) {
      if (s == step) refs.push_back(v);
    }
  }
  pruned_ = median_prune(refs, value);
  return pruned_;
}

Study run_study(const SearchSpace& space, std::size_t budget, const Objective& objective,
                std::uint64_t seed) {
  space.validate();
  if (budget == 0) throw std::invalid_argument("study budget must be at least 1");
  std::mt19937_64 rng(seed);
  Study study;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < budget; ++i) {
    Trial trial;
    trial.id = i;
    trial.config = sample_config(space, rng);
    TrialReporter reporter(trial, study.trials);
    const double value = objective(trial.config, reporter);
    if (reporter.pruned()) {
      trial.status = TrialStatus::Pruned;
    } else {
      trial.status = TrialStatus::Complete;
      trial.final_objective = value;
      if (!best || value > *study.trials[*best].final_objective) best = i;
    }
    study.trials.push_back(std::move(trial));
  }
  if (!best) {
    throw HyperoptError(HyperoptError::Kind::AllTrialsPruned, "every trial was pruned");
  }
  study.best = *best;
  return study;
}

Objective synthetic_lr_objective(double lr_optimum, std::size_t checkpoints) {
  if (!(lr_optimum > 0.0)) throw std::invalid_argument("lr optimum must be positive");
  return [lr_optimum, checkpoints](const Config& cfg, TrialReporter& reporter) {
    const double miss = cfg.at("lr") - lr_optimum;
    const double quality = -miss * miss;
    double value = quality;
    for (std::size_t step = 1; step <= checkpoints; ++step) {
      value = quality * static_cast<double>(checkpoints) / static_cast<double>(step);
      if (reporter.report(step, value)) break;
    }
    return value;
  };
}

void write_study_csv(const Study& study, const SearchSpace& space, std::ostream& out) {
  out << "trial_id,status";
  for (const auto& d : space.dimensions) out << ',' << d.name;
  out << ",final_objective\n";
  for (const auto& t : study.trials) {
    csv::Row row;
    row << t.id << std::string_view(to_string(t.status));
    for (const auto& d : space.dimensions) row << t.config.at(d.name);
    if (t.final_objective) {
      row << *t.final_objective;
    } else {
      row << std::string_view("");
    }
    out << row.str() << '\n';
  }
}

}  // namespace agcas::hyperopt
