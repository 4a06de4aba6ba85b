#include "ncbcast/ratectrl.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ncbcast {

std::string_view to_string(RateScheme scheme) {
  switch (scheme) {
    case RateScheme::baseline: return "baseline";
    case RateScheme::delay_threshold: return "threshold";
    case RateScheme::dynamic: return "dynamic";
  }
  return "?";
}

RateScheme parse_rate_scheme(std::string_view text) {
  if (text == "baseline") return RateScheme::baseline;
  if (text == "threshold") return RateScheme::delay_threshold;
  if (text == "dynamic") return RateScheme::dynamic;
  throw std::invalid_argument("unknown rate control scheme '" + std::string(text) + "'");
}

void RateControlParams::validate(double mu) const {
  switch (scheme) {
    case RateScheme::baseline:
      if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("lambda must lie in [0, 1]");
      }
      break;
    case RateScheme::delay_threshold:
      if (threshold_slots < 1) throw std::invalid_argument("T_D must be at least 1");
      break;
    case RateScheme::dynamic:
      if (!(weight > 0.0)) throw std::invalid_argument("f must be positive");
      if (!(epsilon > 0.0) || epsilon >= mu) {
        throw std::invalid_argument("epsilon must lie in (0, mu)");
      }
      break;
  }
}

bool decide_baseline(double lambda, RandomStream& rng) { return rng.uniform() < lambda; }

ThresholdDecision decide_delay_threshold(std::uint64_t threshold_slots,
                                         const FeedbackSnapshot& snapshot) {
  ThresholdDecision out;
  // Ages grow with queue position from the back, so the front is the oldest.
  if (!snapshot.queue.empty() && snapshot.queue.front().age > threshold_slots) {
    out.uncoded = snapshot.queue.front().index;
    return out;
  }
  out.add = snapshot.queue.empty() ||
            std::any_of(snapshot.markov_states.begin(), snapshot.markov_states.end(),
                        [](std::uint64_t s) { return s == 0; });
  return out;
}

double lambda_est(std::uint64_t added, std::uint64_t slots, double mu, double epsilon) {
  if (slots == 0) return 0.0;
  return std::min(static_cast<double>(added) / static_cast<double>(slots), mu - epsilon);
}

double decision_metric(std::span<const std::uint64_t> undelivered, double weight, double mu,
                       double lambda_estimate) {
  if (!(lambda_estimate < mu)) throw std::domain_error("decision metric needs lambda_est < mu");
  const double total = static_cast<double>(
      std::accumulate(undelivered.begin(), undelivered.end(), std::uint64_t{0}));
  return static_cast<double>(undelivered.size()) * weight - total / (mu - lambda_estimate);
}

double undelivered_threshold(double lambda_estimate, double weight, std::size_t receivers,
                             double mu) {
  if (!(lambda_estimate < mu)) throw std::domain_error("threshold needs lambda_est < mu");
  return static_cast<double>(receivers) * weight * (mu - lambda_estimate);
}

double expected_time_to_zero(std::uint64_t k, double lambda, double mu) {
  if (!(lambda < mu)) throw std::domain_error("chain is not positive recurrent (lambda >= mu)");
  return static_cast<double>(k) / (mu - lambda);
}

Benefits benefits(std::uint64_t k, std::uint64_t undelivered, double weight, double lambda,
                  double mu) {
  if (!(lambda < mu)) throw std::domain_error("chain is not positive recurrent (lambda >= mu)");
  const double gap = mu - lambda;
  const double u = static_cast<double>(undelivered);
  const double kd = static_cast<double>(k);
  return Benefits{weight - u * (kd + (1.0 - mu)) / gap, -u * (kd - mu) / gap};
}

RateController::RateController(RateControlParams params, std::size_t receivers, double mu,
                               std::uint64_t seed)
    : params_(params),
      receivers_(receivers),
      mu_(mu),
      rng_(seed, static_cast<std::uint64_t>(StreamId::rate_control)) {
  params_.validate(mu);
}

RateDecision RateController::decide(const FeedbackSnapshot& snapshot) {
  RateDecision out;
  switch (params_.scheme) {
    case RateScheme::baseline:
      out.add = decide_baseline(params_.lambda, rng_);
      break;
    case RateScheme::delay_threshold: {
      const auto d = decide_delay_threshold(params_.threshold_slots, snapshot);
      out.add = d.add;
      out.uncoded = d.uncoded;
      break;
    }
    case RateScheme::dynamic: {
      out.lambda_estimate = lambda_est(added_, slots_, mu_, params_.epsilon);
      out.metric = decision_metric(snapshot.undelivered, params_.weight, mu_, out.lambda_estimate);
      out.add = out.metric > 0.0;
      const auto total = std::accumulate(snapshot.undelivered.begin(), snapshot.undelivered.end(),
                                         std::uint64_t{0});
      const double limit =
          undelivered_threshold(out.lambda_estimate, params_.weight, receivers_, mu_);
      out.threshold_agrees = (static_cast<double>(total) < limit) == out.add;
      break;
    }
  }
  ++slots_;
  if (out.add) ++added_;
  return out;
}

}  // namespace ncbcast
