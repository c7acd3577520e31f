#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace agcas::hyperopt {

class HyperoptError : public std::runtime_error {
 public:
  enum class Kind { InvalidSpace, AllTrialsPruned };
  HyperoptError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct Dimension {
  enum class Type { LogUniform, Uniform, Categorical };
  std::string name;
  Type type = Type::Uniform;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> choices;  // categorical
};

struct SearchSpace {
  std::vector<Dimension> dimensions;

  /// lr, gamma, tau and batch size.
  static SearchSpace sac_default();
  void validate() const;
};

using Config = std::map<std::string, double>;

/// One independent draw per dimension, in declaration order.
Config sample_config(const SearchSpace& space, std::mt19937_64& rng);

/// True iff `value` is strictly below the median of `references`. Never
/// prunes with fewer than two references.
bool median_prune(const std::vector<double>& references, double value);

double median(std::vector<double> values);

enum class TrialStatus { Running, Pruned, Complete };
const char* to_string(TrialStatus s);

struct Trial {
  std::size_t id = 0;
  Config config;
  std::vector<std::pair<std::size_t, double>> intermediate;  // (step, objective)
  TrialStatus status = TrialStatus::Running;
  std::optional<double> final_objective;
};

/// Handed to the objective. `report` returns true when the trial should stop.
class TrialReporter {
 public:
  TrialReporter(Trial& trial, const std::vector<Trial>& history) : trial_(trial), history_(history) {}

  bool report(std::size_t step, double value);
  bool pruned() const noexcept { return pruned_; }

 private:
  Trial& trial_;
  const std::vector<Trial>& history_;
  bool pruned_ = false;
};

/// Higher is better. The return value is the final objective (ignored when pruned).
using Objective = std::function<double(const Config&, TrialReporter&)>;

struct Study {
  std::vector<Trial> trials;
  std::size_t best = 0;  // index into trials

  const Trial& best_trial() const { return trials.at(best); }
};

Study run_study(const SearchSpace& space, std::size_t budget, const Objective& objective,
                std::uint64_t seed);

/// -(lr - lr_optimum)^2; other dimensions are ignored. Reports a rising
/// learning curve at steps 1..checkpoints.
Objective synthetic_lr_objective(double lr_optimum, std::size_t checkpoints);

/// trial_id, status, one column per dimension, final_objective.
void write_study_csv(const Study& study, const SearchSpace& space, std::ostream& out);

}  // namespace agcas::hyperopt
