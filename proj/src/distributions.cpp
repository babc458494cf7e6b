#include "pwdlab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pwdlab {

namespace {

constexpr double kRowTolerance = 1e-12;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 0.5)) fail("smoothing floor lambda must lie in (0, 1/2)");
}

double xlog2y_over_z(double y, double z) { return y > 0.0 ? y * std::log2(y / z) : 0.0; }

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::bernoulli_product: return "bernoulli-product";
    case Family::bary_product: return "bary-product";
    case Family::spherical_gaussian: return "spherical-gaussian";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "bernoulli-product") return Family::bernoulli_product;
  if (name == "bary-product") return Family::bary_product;
  if (name == "spherical-gaussian") return Family::spherical_gaussian;
  fail("unknown distribution family '" + std::string(name) + "'");
}

double OutcomeShape::max_sigma() const {
  return sigmas.empty() ? 0.0 : *std::max_element(sigmas.begin(), sigmas.end());
}

BoundednessBudget BoundednessBudget::for_discrete(std::size_t k, double lambda) {
  check_lambda(lambda);
  return {static_cast<double>(k) * std::log2(1.0 / lambda), lambda};
}

BoundednessBudget BoundednessBudget::for_shape(const OutcomeShape& shape, double gaussian_m_cap) {
  if (is_discrete(shape.family)) return for_discrete(shape.k, shape.lambda);
  return for_gaussian(gaussian_m_cap);
}

// ---------------------------------------------------------------------------
// Construction

DistributionSpec DistributionSpec::bernoulli(std::vector<double> biases, double lambda) {
  check_lambda(lambda);
  if (biases.empty()) fail("bernoulli-product needs k >= 1");
  for (std::size_t j = 0; j < biases.size(); ++j) {
    double v = biases[j];
    if (!(v >= lambda - 1e-15 && v <= 1.0 - lambda + 1e-15)) {
      std::ostringstream os;
      os << "bias[" << j << "] = " << v << " outside [" << lambda << ", " << 1.0 - lambda << "]";
      fail(os.str());
    }
  }
  OutcomeShape shape;
  shape.family = Family::bernoulli_product;
  shape.k = biases.size();
  shape.b = 2;
  shape.lambda = lambda;
  return {std::move(shape), std::move(biases)};
}

DistributionSpec DistributionSpec::smoothed_bernoulli(std::vector<double> raw, double lambda) {
  check_lambda(lambda);
  for (double& v : raw) v = std::clamp(v, lambda, 1.0 - lambda);
  return bernoulli(std::move(raw), lambda);
}

DistributionSpec DistributionSpec::bary(std::size_t k, std::size_t b, std::vector<double> rows,
                                        double lambda) {
  check_lambda(lambda);
  if (k == 0 || b < 2) fail("bary-product needs k >= 1 and b >= 2");
  if (rows.size() != k * b) fail("bary-product parameter count must equal k*b");
  if (lambda * static_cast<double>(b) > 1.0) fail("lambda * b must not exceed 1");
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0;
    for (std::size_t t = 0; t < b; ++t) {
      double v = rows[j * b + t];
      if (!(v >= lambda - 1e-15)) {
        std::ostringstream os;
        os << "row[" << j << "][" << t << "] = " << v << " below floor " << lambda;
        fail(os.str());
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowTolerance) {
      std::ostringstream os;
      os << "row[" << j << "] sums to " << sum << ", expected 1";
      fail(os.str());
    }
  }
  OutcomeShape shape;
  shape.family = Family::bary_product;
  shape.k = k;
  shape.b = b;
  shape.lambda = lambda;
  return {std::move(shape), std::move(rows)};
}

DistributionSpec DistributionSpec::smoothed_bary(std::size_t k, std::size_t b,
                                                 std::vector<double> rows, double lambda) {
  check_lambda(lambda);
  if (rows.size() != k * b) fail("bary-product parameter count must equal k*b");
  const double keep = 1.0 - lambda * static_cast<double>(b);
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0;
    for (std::size_t t = 0; t < b; ++t) sum += rows[j * b + t];
    for (std::size_t t = 0; t < b; ++t) rows[j * b + t] = keep * rows[j * b + t] / sum + lambda;
  }
  return bary(k, b, std::move(rows), lambda);
}

DistributionSpec DistributionSpec::gaussian(std::vector<double> means, std::vector<double> sigmas,
                                            double box_lo, double box_hi) {
  if (means.empty()) fail("spherical-gaussian needs k >= 1");
  if (sigmas.size() == 1 && means.size() > 1) sigmas.assign(means.size(), sigmas.front());
  if (sigmas.size() != means.size()) fail("sigma count must equal k");
  if (!(box_lo < box_hi)) fail("mean box must satisfy lo < hi");
  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    if (!(sigmas[j] > 0.0) || !std::isfinite(sigmas[j])) fail("sigma must be positive and finite");
    double m = means[j];
    if (!(m >= box_lo - 1e-12 && m <= box_hi + 1e-12)) {
      std::ostringstream os;
      os << "mean[" << j << "] = " << m << " outside [" << box_lo << ", " << box_hi << "]";
      fail(os.str());
    }
  }
  OutcomeShape shape;
  shape.family = Family::spherical_gaussian;
  shape.k = means.size();
  shape.b = 0;
  shape.sigmas = std::move(sigmas);
  shape.box_lo = box_lo;
  shape.box_hi = box_hi;
  shape.lambda = 0.0;
  return {std::move(shape), std::move(means)};
}

DistributionSpec DistributionSpec::from_params(const OutcomeShape& shape,
                                               std::vector<double> params) {
  switch (shape.family) {
    case Family::bernoulli_product:
      if (params.size() != shape.k) fail("expected k biases");
      return bernoulli(std::move(params), shape.lambda);
    case Family::bary_product:
      return bary(shape.k, shape.b, std::move(params), shape.lambda);
    case Family::spherical_gaussian:
      if (params.size() != shape.k) fail("expected k means");
      return gaussian(std::move(params), shape.sigmas, shape.box_lo, shape.box_hi);
  }
  fail("unknown family");
}

double DistributionSpec::prob(std::size_t j, std::size_t t) const {
  if (family() == Family::bernoulli_product) return t == 1 ? params_[j] : 1.0 - params_[j];
  return params_[j * shape_.b + t];
}

bool DistributionSpec::same_structure(const DistributionSpec& other) const {
  const OutcomeShape& a = shape_;
  const OutcomeShape& b = other.shape_;
  return a.family == b.family && a.k == b.k && a.b == b.b && a.sigmas == b.sigmas &&
         a.box_lo == b.box_lo && a.box_hi == b.box_hi;
}

DistributionSpec default_spec(const OutcomeShape& shape) {
  switch (shape.family) {
    case Family::bernoulli_product:
      return DistributionSpec::bernoulli(std::vector<double>(shape.k, 0.5), shape.lambda);
    case Family::bary_product:
      return DistributionSpec::bary(
          shape.k, shape.b,
          std::vector<double>(shape.k * shape.b, 1.0 / static_cast<double>(shape.b)),
          shape.lambda);
    case Family::spherical_gaussian:
      return DistributionSpec::gaussian(
          std::vector<double>(shape.k, 0.5 * (shape.box_lo + shape.box_hi)), shape.sigmas,
          shape.box_lo, shape.box_hi);
  }
  fail("unknown family");
}

// ---------------------------------------------------------------------------
// Sampling and evaluation

void sample_into(const DistributionSpec& dist, Rng& rng, OutcomeVector& out) {
  const std::size_t k = dist.k();
  out.resize(k);
  switch (dist.family()) {
    case Family::bernoulli_product:
      for (std::size_t j = 0; j < k; ++j) out[j] = rng.uniform() < dist.bias(j) ? 1.0 : 0.0;
      return;
    case Family::bary_product: {
      const std::size_t b = dist.arity();
      for (std::size_t j = 0; j < k; ++j) {
        double u = rng.uniform();
        std::size_t t = 0;
        while (t + 1 < b && u >= dist.prob(j, t)) u -= dist.prob(j, t++);
        out[j] = static_cast<double>(t);
      }
      return;
    }
    case Family::spherical_gaussian:
      for (std::size_t j = 0; j < k; ++j) out[j] = dist.mean(j) + dist.sigma(j) * rng.normal();
      return;
  }
}

OutcomeVector sample(const DistributionSpec& dist, Rng& rng) {
  OutcomeVector y;
  sample_into(dist, rng, y);
  return y;
}

double log_density_exact(const DistributionSpec& dist, std::span<const double> y) {
  if (y.size() != dist.k()) throw std::invalid_argument("outcome dimension mismatch");
  double total = 0.0;
  switch (dist.family()) {
    case Family::bernoulli_product:
      for (std::size_t j = 0; j < y.size(); ++j)
        total += std::log2(y[j] != 0.0 ? dist.bias(j) : 1.0 - dist.bias(j));
      return total;
    case Family::bary_product:
      for (std::size_t j = 0; j < y.size(); ++j)
        total += std::log2(dist.prob(j, static_cast<std::size_t>(y[j])));
      return total;
    case Family::spherical_gaussian: {
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double s = dist.sigma(j);
        const double z = (y[j] - dist.mean(j)) / s;
        total += -0.5 * z * z - std::log(s * std::sqrt(2.0 * std::numbers::pi));
      }
      return total / std::numbers::ln2;
    }
  }
  return total;
}

double log_density(const DistributionSpec& dist, std::span<const double> y,
                   const BoundednessBudget& budget) {
  return std::max(log_density_exact(dist, y), -budget.m_cap);
}

double kl_divergence(const DistributionSpec& p, const DistributionSpec& q) {
  if (!p.same_structure(q)) throw FamilyMismatch("KL requires the same family and structure");
  double total = 0.0;
  switch (p.family()) {
    case Family::bernoulli_product:
      for (std::size_t j = 0; j < p.k(); ++j) {
        const double a = p.bias(j), c = q.bias(j);
        total += xlog2y_over_z(a, c) + xlog2y_over_z(1.0 - a, 1.0 - c);
      }
      break;
    case Family::bary_product:
      for (std::size_t j = 0; j < p.k(); ++j)
        for (std::size_t t = 0; t < p.arity(); ++t)
          total += xlog2y_over_z(p.prob(j, t), q.prob(j, t));
      break;
    case Family::spherical_gaussian:
      for (std::size_t j = 0; j < p.k(); ++j) {
        const double d = p.mean(j) - q.mean(j);
        total += d * d / (2.0 * p.sigma(j) * p.sigma(j));
      }
      total /= std::numbers::ln2;
      break;
  }
  return std::max(total, 0.0);
}

double entropy(const DistributionSpec& p) {
  double total = 0.0;
  switch (p.family()) {
    case Family::bernoulli_product:
    case Family::bary_product: {
      const std::size_t b = p.arity();
      for (std::size_t j = 0; j < p.k(); ++j)
        for (std::size_t t = 0; t < b; ++t) {
          const double v = p.prob(j, t);
          if (v > 0.0) total -= v * std::log2(v);
        }
      return total;
    }
    case Family::spherical_gaussian:
      for (std::size_t j = 0; j < p.k(); ++j)
        total += 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * p.sigma(j) * p.sigma(j));
      return total;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Estimation

std::vector<double> project_frequencies(std::span<const double> weights, double floor) {
  const std::size_t b = weights.size();
  std::vector<double> theta(b, 0.0);
  std::vector<bool> clamped(b, false);
  // theta_t = max(floor, w_t / nu); a few passes fix the clamped set.
  for (std::size_t pass = 0; pass <= b; ++pass) {
    double free_mass = 1.0, free_weight = 0.0;
    for (std::size_t t = 0; t < b; ++t) {
      if (clamped[t]) free_mass -= floor;
      else free_weight += weights[t];
    }
    bool changed = false;
    for (std::size_t t = 0; t < b; ++t) {
      if (clamped[t]) {
        theta[t] = floor;
        continue;
      }
      theta[t] = free_weight > 0.0 ? free_mass * weights[t] / free_weight
                                   : free_mass / static_cast<double>(b);
      if (theta[t] < floor) {
        clamped[t] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return theta;
}

DistributionSpec fit_from_counts(const OutcomeShape& shape, std::span<const double> stats,
                                 double total) {
  if (!(total > 0.0)) throw std::invalid_argument("fit_single needs a nonempty sample");
  const std::size_t k = shape.k;
  switch (shape.family) {
    case Family::bernoulli_product: {
      std::vector<double> biases(k);
      for (std::size_t j = 0; j < k; ++j)
        biases[j] = std::clamp(stats[j] / total, shape.lambda, 1.0 - shape.lambda);
      return DistributionSpec::bernoulli(std::move(biases), shape.lambda);
    }
    case Family::bary_product: {
      std::vector<double> rows(k * shape.b);
      for (std::size_t j = 0; j < k; ++j) {
        auto row = project_frequencies(stats.subspan(j * shape.b, shape.b), shape.lambda);
        std::copy(row.begin(), row.end(), rows.begin() + static_cast<std::ptrdiff_t>(j * shape.b));
      }
      return DistributionSpec::bary(k, shape.b, std::move(rows), shape.lambda);
    }
    case Family::spherical_gaussian: {
      std::vector<double> means(k);
      for (std::size_t j = 0; j < k; ++j)
        means[j] = std::clamp(stats[j] / total, shape.box_lo, shape.box_hi);
      return DistributionSpec::gaussian(std::move(means), shape.sigmas, shape.box_lo, shape.box_hi);
    }
  }
  fail("unknown family");
}

DistributionSpec fit_single(const OutcomeShape& shape, std::span<const OutcomeVector> sample) {
  if (sample.empty()) throw std::invalid_argument("fit_single needs a nonempty sample");
  const std::size_t k = shape.k;
  std::vector<double> stats;
  switch (shape.family) {
    case Family::bernoulli_product:
    case Family::spherical_gaussian:
      stats.assign(k, 0.0);
      for (const auto& y : sample) {
        if (y.size() != k) throw std::invalid_argument("outcome dimension mismatch");
        for (std::size_t j = 0; j < k; ++j) stats[j] += y[j];
      }
      break;
    case Family::bary_product:
      stats.assign(k * shape.b, 0.0);
      for (const auto& y : sample) {
        if (y.size() != k) throw std::invalid_argument("outcome dimension mismatch");
        for (std::size_t j = 0; j < k; ++j) stats[j * shape.b + static_cast<std::size_t>(y[j])] += 1.0;
      }
      break;
  }
  return fit_from_counts(shape, stats, static_cast<double>(sample.size()));
}

// ---------------------------------------------------------------------------
// Enumeration

std::size_t domain_size(const OutcomeShape& shape, std::size_t limit) {
  if (!is_discrete(shape.family)) return 0;
  std::size_t size = 1;
  for (std::size_t j = 0; j < shape.k; ++j) {
    if (size > limit / shape.b) return 0;
    size *= shape.b;
  }
  return size <= limit ? size : 0;
}

void for_each_outcome(const OutcomeShape& shape, std::size_t limit,
                      const std::function<void(const OutcomeVector&)>& fn) {
  if (domain_size(shape, limit) == 0)
    throw std::domain_error("outcome domain too large (or continuous) for enumeration");
  OutcomeVector y(shape.k, 0.0);
  while (true) {
    fn(y);
    std::size_t j = 0;
    while (j < shape.k) {
      y[j] += 1.0;
      if (y[j] < static_cast<double>(shape.b)) break;
      y[j] = 0.0;
      ++j;
    }
    if (j == shape.k) return;
  }
}

}  // namespace pwdlab
