#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "c2lab/error.hpp"
#include "c2lab/nnet.hpp"

namespace c2lab {

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> gradient) {
  if (params.size() != m_.size() || gradient.size() != m_.size()) {
    throw Error(ErrorKind::ShapeMismatch, "optimiser state does not match the parameter count");
  }
  ++t_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step_size = lr_ / correction1;
  const double sqrt_correction2 = std::sqrt(correction2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = gradient[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    params[i] -= step_size * m_[i] / (std::sqrt(v_[i]) / sqrt_correction2 + eps_);
  }
}

RandomTestResult random_init_test(const RelationalStructure& s1, const RelationalStructure& s2,
                                  const RandomTestConfig& config) {
  if (!(s1.language() == s2.language())) {
    throw Error(ErrorKind::MixedInputs, "random initialisation test needs structures over one language");
  }
  if (config.trials == 0) throw Error(ErrorKind::InvalidInput, "trial count must be positive");
  if (!(config.epsilon > 0)) throw Error(ErrorKind::InvalidInput, "epsilon must be positive");
  config.hyper.validate();

  RandomTestResult result;
  result.epsilon = config.epsilon;
  result.trials.resize(config.trials);

  auto run_trial = [&](std::size_t id) {
    TrialRecord& r = result.trials[id];
    r.trial_id = id;
    r.seed = trial_seed(config.master_seed, id);
    const NetParams params = init_params(config.hyper, s1.language(), r.seed);
    r.out1 = forward(params, s1);
    r.out2 = forward(params, s2);
    r.rel_diff = relative_difference(r.out1, r.out2);
  };

  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, config.trials);
  if (threads <= 1) {
    for (std::size_t i = 0; i < config.trials; ++i) run_trial(i);
  } else {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < config.trials; i += threads) run_trial(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (const auto& r : result.trials) {
    if (!std::isfinite(r.out1) || !std::isfinite(r.out2)) {
      throw Error(ErrorKind::Divergence, "trial " + std::to_string(r.trial_id) + " produced a non-finite output");
    }
    result.max_rel_diff = std::max(result.max_rel_diff, r.rel_diff);
  }
  result.likely_indistinguishable = result.max_rel_diff <= config.epsilon;
  return result;
}

double indistinguishability_floor(const std::vector<double>& targets) {
  if (targets.empty()) return 0;
  const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(targets.size());
  double sum = 0;
  for (double t : targets) sum += (t - mean) * (t - mean);
  return sum / static_cast<double>(targets.size());
}

LossCurve training_test(const std::vector<TrainingExample>& dataset, const TrainConfig& config) {
  if (dataset.empty()) throw Error(ErrorKind::InvalidInput, "training set is empty");
  if (config.steps == 0) throw Error(ErrorKind::InvalidInput, "step count must be positive");
  if (!(config.learning_rate > 0)) throw Error(ErrorKind::InvalidInput, "learning rate must be positive");
  for (const auto& ex : dataset) {
    if (!(ex.structure.language() == dataset.front().structure.language())) {
      throw Error(ErrorKind::MixedInputs, "training structures are over different languages");
    }
  }

  NetParams params = init_params(config.hyper, dataset.front().structure.language(), config.seed);
  Adam adam(params.values.size(), config.learning_rate);
  std::vector<double> gradient(params.values.size());
  const double scale = 1.0 / static_cast<double>(dataset.size());

  LossCurve curve;
  std::vector<double> targets;
  for (const auto& ex : dataset) targets.push_back(ex.target);
  curve.floor = indistinguishability_floor(targets);
  curve.losses.reserve(config.steps);

  for (std::size_t step = 0; step < config.steps; ++step) {
    std::fill(gradient.begin(), gradient.end(), 0.0);
    double loss = 0;
    for (const auto& ex : dataset) loss += scale * squared_error_gradient(params, ex.structure, ex.target, gradient, scale);
    if (!std::isfinite(loss)) {
      throw Error(ErrorKind::Divergence, "loss became non-finite at step " + std::to_string(step));
    }
    curve.losses.push_back(loss);
    adam.step(params.values, gradient);
  }
  curve.steps = config.steps;
  curve.min_loss = *std::min_element(curve.losses.begin(), curve.losses.end());
  // with a trivial floor, "learned" means getting within the slack of zero
  const double threshold = curve.floor > config.slack ? curve.floor - config.slack : config.slack;
  curve.floor_reached = curve.min_loss >= threshold;
  return curve;
}

GradCheckReport grad_check(const NetParams& params, const RelationalStructure& structure, double target,
                           const GradCheckConfig& config) {
  if (!(config.tolerance > 0)) throw Error(ErrorKind::InvalidInput, "tolerance must be positive");
  std::vector<double> analytic(params.values.size(), 0.0);
  squared_error_gradient(params, structure, target, analytic);
  if (config.tamper) config.tamper(analytic);

  std::vector<std::size_t> coords(params.values.size());
  std::iota(coords.begin(), coords.end(), 0);
  if (config.sample != 0 && config.sample < coords.size()) {
    std::mt19937_64 rng(config.sample_seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(config.sample);
    std::sort(coords.begin(), coords.end());
  }

  auto loss_at = [&](const NetParams& p) {
    const double y = forward(p, structure);
    return (y - target) * (y - target);
  };

  GradCheckReport report;
  NetParams probe = params;
  for (std::size_t i : coords) {
    const double original = probe.values[i];
    probe.values[i] = original + config.step;
    const double up = loss_at(probe);
    probe.values[i] = original - config.step;
    const double down = loss_at(probe);
    probe.values[i] = original;
    const double numeric = (up - down) / (2.0 * config.step);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), config.floor});
    const double err = std::abs(analytic[i] - numeric) / denom;
    if (err > report.max_rel_error || report.checked == 0) {
      report.max_rel_error = std::max(report.max_rel_error, err);
      report.worst_index = i;
      report.worst_analytic = analytic[i];
      report.worst_numeric = numeric;
    }
    ++report.checked;
  }
  report.passed = report.max_rel_error < config.tolerance;
  return report;
}

}  // namespace c2lab
