#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "c2lab/encode.hpp"

namespace c2lab {

struct HyperParams {
  std::size_t embedding = 64;
  /// Message-passing rounds. Zero is accepted as a degenerate network whose
  /// output is the readout bias.
  std::size_t layers = 30;
  /// Hidden width of every two-layer block; 0 means "same as embedding".
  std::size_t hidden = 0;
  /// h <- h + update(h, aggregate) when set, h <- update(h, aggregate) otherwise.
  bool residual = true;

  std::size_t hidden_width() const noexcept { return hidden == 0 ? embedding : hidden; }
  void validate() const;
};

/// Offsets of one affine map y = W x + b inside the flat parameter vector.
/// W is row-major rows × cols.
struct AffineBlock {
  std::size_t weight = 0;
  std::size_t bias = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// affine -> rectifier -> affine
struct MlpBlock {
  AffineBlock first;
  AffineBlock second;
};

struct NetLayout {
  /// One block per language predicate. Output width is arity × embedding,
  /// sliced per argument position; nullary predicates emit one embedding
  /// broadcast to every object.
  std::vector<MlpBlock> message;
  /// Input (previous embedding, aggregated messages), output one embedding.
  MlpBlock update;
  AffineBlock readout;
  std::size_t size = 0;

  static NetLayout build(const HyperParams& hyper, const RelationalLanguage& language);
};

/// Weights are shared across layers.
struct NetParams {
  HyperParams hyper;
  RelationalLanguage language;
  std::uint64_t seed = 0;
  NetLayout layout;
  std::vector<double> values;
};

/// Every affine map drawn from U[-sqrt(1/fan_in), +sqrt(1/fan_in)] (weights and
/// biases), deterministically from the seed via mt19937_64.
NetParams init_params(const HyperParams& hyper, const RelationalLanguage& language, std::uint64_t seed);

/// Network output for one structure (64-bit floats throughout).
double forward(const NetParams& params, const RelationalStructure& structure);

/// Final object embeddings, row-major objects × embedding.
std::vector<double> object_embeddings(const NetParams& params, const RelationalStructure& structure);

/// Returns (output - target)² and adds scale · its gradient into `gradient`.
double squared_error_gradient(const NetParams& params, const RelationalStructure& structure, double target,
                              std::span<double> gradient, double scale = 1.0);

/// |o1 - o2| / max(|o1|, |o2|), defined as 0 when both outputs are 0.
double relative_difference(double out1, double out2);

/// Independent per-trial seed from (master seed, trial id).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_id);

struct TrialRecord {
  std::uint64_t trial_id = 0;
  std::uint64_t seed = 0;
  double out1 = 0;
  double out2 = 0;
  double rel_diff = 0;
};

struct RandomTestResult {
  std::vector<TrialRecord> trials;
  double epsilon = 0;
  double max_rel_diff = 0;
  /// True iff every rel_diff ≤ epsilon.
  bool likely_indistinguishable = true;
};

struct RandomTestConfig {
  std::size_t trials = 1000;
  double epsilon = 0.01;
  HyperParams hyper;
  std::uint64_t master_seed = 0;
  /// 0 means hardware concurrency.
  std::size_t threads = 0;
};

RandomTestResult random_init_test(const RelationalStructure& s1, const RelationalStructure& s2,
                                  const RandomTestConfig& config);

/// Adaptive-moment optimiser with bias correction.
class Adam {
 public:
  Adam(std::size_t size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void step(std::span<double> params, std::span<const double> gradient);
  std::uint64_t steps() const noexcept { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<double> m_, v_;
};

struct TrainingExample {
  RelationalStructure structure;
  double target = 0;
};

struct TrainConfig {
  std::size_t steps = 2000;
  double learning_rate = 0.0002;
  HyperParams hyper;
  std::uint64_t seed = 0;
  /// Allowance below the floor still counted as "floor reached".
  double slack = 0.05;
};

struct LossCurve {
  /// Full-batch mean squared error before each update.
  std::vector<double> losses;
  std::size_t steps = 0;
  /// Smallest loss achievable by a network that cannot tell the inputs
  /// apart: the variance of the targets.
  double floor = 0;
  double min_loss = 0;
  bool floor_reached = false;
};

/// Full-batch training on mean squared error. Throws ErrorKind::Divergence on
/// a non-finite loss.
LossCurve training_test(const std::vector<TrainingExample>& dataset, const TrainConfig& config);

/// Mean of squared deviations from the target mean.
double indistinguishability_floor(const std::vector<double>& targets);

struct GradCheckConfig {
  double tolerance = 1e-4;
  double step = 1e-5;
  /// Coordinates to compare; 0 checks every coordinate.
  std::size_t sample = 256;
  std::uint64_t sample_seed = 0;
  /// Denominator floor for the relative error.
  double floor = 1e-6;
  /// Applied to the analytic gradient before comparison (test hook).
  std::function<void(std::vector<double>&)> tamper;
};

struct GradCheckReport {
  std::size_t checked = 0;
  double max_rel_error = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0;
  double worst_numeric = 0;
  bool passed = false;
};

/// Analytic gradient of (output - target)² against central differences.
GradCheckReport grad_check(const NetParams& params, const RelationalStructure& structure, double target,
                           const GradCheckConfig& config = {});

}  // namespace c2lab
