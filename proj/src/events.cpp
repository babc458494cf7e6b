#include "pwdlab/events.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pwdlab {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::coordinate_equals: return "coordinate-equals";
    case EventKind::coordinate_threshold: return "coordinate-threshold";
    case EventKind::likelihood_ratio: return "likelihood-ratio";
  }
  return "unknown";
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

Event Event::coordinate_equals(std::size_t j, std::size_t symbol) {
  Event e;
  e.kind_ = EventKind::coordinate_equals;
  e.j_ = j;
  e.symbol_ = symbol;
  return e;
}

Event Event::coordinate_threshold(std::size_t j, double threshold) {
  Event e;
  e.kind_ = EventKind::coordinate_threshold;
  e.j_ = j;
  e.threshold_ = threshold;
  return e;
}

Event Event::likelihood_ratio(DistributionSpec p_hat, DistributionSpec q_hat, double tau) {
  if (!p_hat.same_structure(q_hat))
    throw FamilyMismatch("likelihood-ratio event needs references of the same family");
  Event e;
  e.kind_ = EventKind::likelihood_ratio;
  e.threshold_ = tau;
  e.refs_ = std::make_shared<const std::pair<DistributionSpec, DistributionSpec>>(
      std::move(p_hat), std::move(q_hat));
  return e;
}

Event likelihood_ratio_event(const DistributionSpec& p_hat, const DistributionSpec& q_hat,
                             double tau) {
  return Event::likelihood_ratio(p_hat, q_hat, tau);
}

bool Event::contains(std::span<const double> y) const {
  switch (kind_) {
    case EventKind::coordinate_equals: return y[j_] == static_cast<double>(symbol_);
    case EventKind::coordinate_threshold: return y[j_] >= threshold_;
    case EventKind::likelihood_ratio:
      return log_density_exact(refs_->first, y) - log_density_exact(refs_->second, y) >= threshold_;
  }
  return false;
}

std::string Event::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case EventKind::coordinate_equals: os << "y" << j_ + 1 << "==" << symbol_; break;
    case EventKind::coordinate_threshold: os << "y" << j_ + 1 << ">=" << threshold_; break;
    case EventKind::likelihood_ratio: os << "LR>=" << threshold_; break;
  }
  return os.str();
}

double gaussian_erf_constant(double sigma) {
  return std::exp(-1.0 / (2.0 * sigma * sigma)) /
         (2.0 * std::sqrt(2.0 * std::numbers::pi) * sigma);
}

EventClass enumerate_event_class(const OutcomeShape& shape, double gamma,
                                 const BoundednessBudget& budget) {
  if (!(gamma > 0.0)) throw std::invalid_argument("event class needs gamma > 0");
  EventClass cls;
  cls.gamma = gamma;
  if (is_discrete(shape.family)) {
    for (std::size_t j = 0; j < shape.k; ++j)
      for (std::size_t t = 0; t < shape.b; ++t) cls.events.push_back(Event::coordinate_equals(j, t));
    const double kb = static_cast<double>(shape.k * shape.b);
    cls.xi_bound = gamma * gamma / (2.0 * kb * kb * budget.m_cap);
    return cls;
  }
  const double sigma = shape.max_sigma();
  const double delta = std::sqrt(2.0 * gamma / (static_cast<double>(shape.k) * sigma * sigma));
  const auto steps =
      static_cast<std::size_t>(std::floor((shape.box_hi - shape.box_lo) / delta + 1e-12));
  for (std::size_t j = 0; j < shape.k; ++j)
    for (std::size_t i = 0; i <= steps; ++i)
      cls.events.push_back(
          Event::coordinate_threshold(j, shape.box_lo + static_cast<double>(i) * delta));
  cls.grid_step = delta;
  cls.xi_bound = gaussian_erf_constant(sigma) * delta;
  return cls;
}

namespace {

double gaussian_halfspace_probability(const DistributionSpec& dist, const Event& event) {
  const DistributionSpec& p = event.p_hat();
  const DistributionSpec& q = event.q_hat();
  // log2 p(y) - log2 q(y) = w.y + c0 when p and q share deviations.
  double mean = 0.0, var = 0.0;
  for (std::size_t j = 0; j < dist.k(); ++j) {
    const double s2 = p.sigma(j) * p.sigma(j);
    const double w = (p.mean(j) - q.mean(j)) / (s2 * std::numbers::ln2);
    const double c0 = -(p.mean(j) - q.mean(j)) * (p.mean(j) + q.mean(j)) / (2.0 * s2 * std::numbers::ln2);
    mean += w * dist.mean(j) + c0;
    var += w * w * dist.sigma(j) * dist.sigma(j);
  }
  if (var <= 0.0) return mean >= event.tau() ? 1.0 : 0.0;
  return 1.0 - normal_cdf((event.tau() - mean) / std::sqrt(var));
}

}  // namespace

ProbabilityEstimate event_probability(const DistributionSpec& dist, const Event& event,
                                      ProbabilityMode mode, Rng* rng, std::size_t mc_samples) {
  if (mode == ProbabilityMode::monte_carlo) {
    if (rng == nullptr || mc_samples == 0)
      throw std::invalid_argument("Monte Carlo probability needs a random stream");
    std::size_t hits = 0;
    OutcomeVector y;
    for (std::size_t s = 0; s < mc_samples; ++s) {
      sample_into(dist, *rng, y);
      hits += event.contains(y) ? 1 : 0;
    }
    const double m = static_cast<double>(mc_samples);
    const double p = static_cast<double>(hits) / m;
    return {p, std::sqrt(p * (1.0 - p) / m)};
  }

  switch (event.kind()) {
    case EventKind::coordinate_equals:
      if (!is_discrete(dist.family()))
        throw std::domain_error("coordinate-equals events need a discrete family");
      if (event.symbol() >= dist.arity()) return {0.0, 0.0};
      return {dist.prob(event.coordinate(), event.symbol()), 0.0};
    case EventKind::coordinate_threshold: {
      const std::size_t j = event.coordinate();
      if (dist.family() == Family::spherical_gaussian)
        return {1.0 - normal_cdf((event.threshold() - dist.mean(j)) / dist.sigma(j)), 0.0};
      double p = 0.0;
      for (std::size_t t = 0; t < dist.arity(); ++t)
        if (static_cast<double>(t) >= event.threshold()) p += dist.prob(j, t);
      return {p, 0.0};
    }
    case EventKind::likelihood_ratio: {
      if (!dist.same_structure(event.p_hat()))
        throw FamilyMismatch("event references and distribution differ in structure");
      if (dist.family() == Family::spherical_gaussian)
        return {gaussian_halfspace_probability(dist, event), 0.0};
      if (domain_size(dist.shape(), kDefaultEnumerationLimit) == 0)
        throw std::domain_error("outcome domain too large for exact likelihood-ratio probability");
      double p = 0.0;
      for_each_outcome(dist.shape(), kDefaultEnumerationLimit, [&](const OutcomeVector& y) {
        if (event.contains(y)) p += std::exp2(log_density_exact(dist, y));
      });
      return {p, 0.0};
    }
  }
  return {};
}

double event_probability_exact(const DistributionSpec& dist, const Event& event) {
  return event_probability(dist, event).value;
}

double approxdist_margin(double gamma, double m_bound, double alpha) {
  return gamma * gamma / (8.0 * m_bound) - std::sqrt(2.0 * alpha);
}

}  // namespace pwdlab
