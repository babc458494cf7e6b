#include "pwdlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pwdlab {

using nlohmann::json;

std::string_view to_string(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::forward: return "forward";
    case PipelineKind::reverse: return "reverse";
    case PipelineKind::direct: return "direct";
  }
  return "unknown";
}

PipelineKind parse_pipeline(std::string_view name) {
  if (name == "forward") return PipelineKind::forward;
  if (name == "reverse") return PipelineKind::reverse;
  if (name == "direct") return PipelineKind::direct;
  throw std::invalid_argument("unknown pipeline '" + std::string(name) + "'");
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Strict object reader: every key must be consumed, types are checked.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.push_back(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(at(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ConfigError(at(key), "must be finite");
    return d;
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0))
      throw ConfigError(at(key), "expected a nonnegative integer");
    return v->get<std::uint64_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(at(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = find(key);
    if (!v) return {};
    if (!v->is_array()) throw ConfigError(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back((*v)[i].get<double>());
    }
    return out;
  }

  Reader child(const std::string& key) {
    const json* v = find(key);
    static const json empty = json::object();
    return Reader(v ? *v : empty, at(key));
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
        throw ConfigError(at(it.key()), "unknown field");
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string> seen_;
};

ParamSource read_source(Reader r) {
  ParamSource s;
  s.kind = r.text("kind", s.kind);
  s.values = r.numbers("values");
  s.value = r.number("value", s.value);
  s.lo = r.number("lo", s.lo);
  s.hi = r.number("hi", s.hi);
  s.seed = r.count("seed", s.seed);
  r.finish();
  return s;
}

json write_source(const ParamSource& s) {
  return {{"kind", s.kind}, {"values", s.values}, {"value", s.value},
          {"lo", s.lo},     {"hi", s.hi},         {"seed", s.seed}};
}

std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ":" + std::to_string(col);
}

std::vector<double> resolve(const ParamSource& src, const ParamSource* base, const OutcomeShape& shape,
                            const std::string& path);

}  // namespace

ScenarioSpec parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(position(text, e.byte), "malformed JSON");
  }
  ScenarioSpec s;
  Reader root(doc, "");
  s.name = root.text("name", s.name);
  try {
    s.pipeline = parse_pipeline(root.text("pipeline", "forward"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("pipeline", e.what());
  }
  s.seed = root.count("seed", s.seed);
  s.trials = root.count("trials", s.trials);
  s.min_success = root.number("min_success", s.min_success);

  {
    Reader c = root.child("context");
    s.n = c.count("n", s.n);
    s.context_kind = c.text("kind", s.context_kind);
    s.context_biases = c.numbers("biases");
    c.finish();
  }
  {
    Reader c = root.child("concept");
    s.concept_kind = c.text("kind", s.concept_kind);
    for (double v : c.numbers("variables")) {
      if (v < 0 || v != std::floor(v)) throw ConfigError("concept.variables", "expected positive integers");
      s.concept_variables.push_back(static_cast<std::size_t>(v));
    }
    c.finish();
  }
  {
    Reader o = root.child("outcome");
    try {
      s.shape.family = parse_family(o.text("family", "bernoulli-product"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("outcome.family", e.what());
    }
    s.shape.k = o.count("k", s.shape.k);
    s.shape.b = o.count("b", s.shape.family == Family::spherical_gaussian ? 0 : 2);
    s.shape.lambda = o.number("lambda", s.shape.lambda);
    s.shape.sigmas = o.numbers("sigmas");
    const auto box = o.numbers("box");
    if (!box.empty()) {
      if (box.size() != 2) throw ConfigError("outcome.box", "expected [lo, hi]");
      s.shape.box_lo = box[0];
      s.shape.box_hi = box[1];
    }
    o.finish();
  }
  s.p0 = read_source(root.child("p0"));
  s.p1 = read_source(root.child("p1"));
  {
    Reader p = root.child("params");
    PipelineParams& pp = s.params;
    pp.epsilon = p.number("epsilon", pp.epsilon);
    pp.delta = p.number("delta", pp.delta);
    pp.gamma = p.number("gamma", pp.gamma);
    pp.xi = p.number("xi", pp.xi);
    pp.m_p = p.count("m_p", pp.m_p);
    pp.m_cn = p.count("m_cn", pp.m_cn);
    pp.cn_constant = p.number("cn_constant", pp.cn_constant);
    pp.m_sel = p.count("m_sel", pp.m_sel);
    pp.separate_cap = p.count("separate_cap", pp.separate_cap);
    pp.draw_budget = p.count("draw_budget", pp.draw_budget);
    pp.max_concept_vars = p.count("max_concept_vars", pp.max_concept_vars);
    pp.max_grid_pairs = p.count("max_grid_pairs", pp.max_grid_pairs);
    pp.gaussian_m_cap = p.number("m_cap", pp.gaussian_m_cap);
    pp.m_mix = p.count("m_mix", pp.m_mix);
    pp.restarts = p.count("restarts", pp.restarts);
    pp.eta = p.number("eta", pp.eta);
    pp.alpha = p.number("alpha", pp.alpha);
    pp.xi_scale = p.number("xi_scale", pp.xi_scale);
    pp.xi_floor = p.number("xi_floor", pp.xi_floor);
    p.finish();
  }
  root.finish();
  validate_scenario(s);
  return s;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioSpec& s) {
  const PipelineParams& p = s.params;
  json doc = {
      {"name", s.name},
      {"pipeline", std::string(to_string(s.pipeline))},
      {"seed", s.seed},
      {"trials", s.trials},
      {"min_success", s.min_success},
      {"context", {{"n", s.n}, {"kind", s.context_kind}, {"biases", s.context_biases}}},
      {"concept", {{"kind", s.concept_kind}, {"variables", s.concept_variables}}},
      {"outcome",
       {{"family", std::string(to_string(s.shape.family))},
        {"k", s.shape.k},
        {"b", s.shape.b},
        {"lambda", s.shape.lambda},
        {"sigmas", s.shape.sigmas},
        {"box", {s.shape.box_lo, s.shape.box_hi}}}},
      {"p0", write_source(s.p0)},
      {"p1", write_source(s.p1)},
      {"params",
       {{"epsilon", p.epsilon},
        {"delta", p.delta},
        {"gamma", p.gamma},
        {"xi", p.xi},
        {"m_p", p.m_p},
        {"m_cn", p.m_cn},
        {"cn_constant", p.cn_constant},
        {"m_sel", p.m_sel},
        {"separate_cap", p.separate_cap},
        {"draw_budget", p.draw_budget},
        {"max_concept_vars", p.max_concept_vars},
        {"max_grid_pairs", p.max_grid_pairs},
        {"m_cap", p.gaussian_m_cap},
        {"m_mix", p.m_mix},
        {"restarts", p.restarts},
        {"eta", p.eta},
        {"alpha", p.alpha},
        {"xi_scale", p.xi_scale},
        {"xi_floor", p.xi_floor}}},
  };
  return doc.dump(2) + "\n";
}

namespace {

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) throw ConfigError(where, what);
}

void check_component(const std::vector<double>& v, const OutcomeShape& shape, const std::string& path) {
  const std::size_t k = shape.k;
  switch (shape.family) {
    case Family::bernoulli_product:
      require(v.size() == k, path, "expected " + std::to_string(k) + " biases, got " + std::to_string(v.size()));
      for (std::size_t j = 0; j < k; ++j)
        require(v[j] >= shape.lambda && v[j] <= 1.0 - shape.lambda, path + "[" + std::to_string(j) + "]",
                "bias " + num(v[j]) + " outside [lambda, 1 - lambda] = [" + num(shape.lambda) + ", " +
                    num(1.0 - shape.lambda) + "]");
      return;
    case Family::bary_product:
      require(v.size() == k * shape.b, path, "expected k*b = " + std::to_string(k * shape.b) + " probabilities");
      for (std::size_t j = 0; j < k; ++j) {
        double sum = 0.0;
        for (std::size_t t = 0; t < shape.b; ++t) {
          const double x = v[j * shape.b + t];
          require(x >= shape.lambda, path + "[" + std::to_string(j * shape.b + t) + "]",
                  "probability " + num(x) + " below lambda = " + num(shape.lambda));
          sum += x;
        }
        require(std::abs(sum - 1.0) <= 1e-12, path, "row " + std::to_string(j) + " sums to " + num(sum));
      }
      return;
    case Family::spherical_gaussian:
      require(v.size() == k, path, "expected " + std::to_string(k) + " means");
      for (std::size_t j = 0; j < k; ++j)
        require(v[j] >= shape.box_lo && v[j] <= shape.box_hi, path + "[" + std::to_string(j) + "]",
                "mean " + num(v[j]) + " outside the box [" + num(shape.box_lo) + ", " + num(shape.box_hi) + "]");
      return;
  }
}

std::vector<double> resolve(const ParamSource& src, const ParamSource* base, const OutcomeShape& shape,
                            const std::string& path) {
  const std::size_t k = shape.k;
  const std::size_t size = shape.family == Family::bary_product ? k * shape.b : k;
  std::vector<double> out;
  if (src.kind == "explicit") {
    out = src.values;
  } else if (src.kind == "fill") {
    if (shape.family == Family::bary_product) {
      require(src.value > 0.0 && src.value < 1.0, path + ".value", "must lie in (0, 1)");
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t t = 0; t < shape.b; ++t)
          out.push_back(t == 0 ? src.value : (1.0 - src.value) / static_cast<double>(shape.b - 1));
    } else {
      out.assign(k, src.value);
    }
  } else if (src.kind == "random") {
    require(src.lo <= src.hi, path + ".lo", "lo must not exceed hi");
    Rng rng(src.seed);
    for (std::size_t i = 0; i < size; ++i) out.push_back(src.lo + (src.hi - src.lo) * rng.uniform());
    if (shape.family == Family::bary_product) {
      require(src.lo > 0.0, path + ".lo", "b-ary rows need lo > 0");
      const auto spec = DistributionSpec::smoothed_bary(k, shape.b, out, shape.lambda);
      out.assign(spec.params().begin(), spec.params().end());
    }
  } else if (src.kind == "same" || src.kind == "offset") {
    require(base != nullptr, path + ".kind", "'" + src.kind + "' is only valid for p1");
    out = resolve(*base, nullptr, shape, "p0");
    if (src.kind == "offset") {
      require(shape.family != Family::bary_product, path + ".kind", "'offset' needs a Bernoulli or Gaussian family");
      for (auto& v : out) v += src.value;
    }
  } else {
    throw ConfigError(path + ".kind", "unknown kind '" + src.kind + "' (explicit, fill, random, same, offset)");
  }
  check_component(out, shape, path + (src.kind == "explicit" ? ".values" : ""));
  return out;
}

}  // namespace

void validate_scenario(const ScenarioSpec& s) {
  require(!s.name.empty(), "name", "must be nonempty");
  require(s.trials >= 1, "trials", "must be >= 1");
  require(s.min_success >= 0.0 && s.min_success <= 1.0, "min_success", "must lie in [0, 1]");

  require(s.n >= 1 && s.n <= kMaxContextBits, "context.n", "must lie in [1, 64]");
  if (s.context_kind == "uniform") {
    require(s.context_biases.empty(), "context.biases", "uniform context takes no biases");
  } else if (s.context_kind == "product") {
    require(s.context_biases.size() == s.n, "context.biases", "expected n = " + std::to_string(s.n) + " biases");
    for (std::size_t i = 0; i < s.n; ++i)
      require(s.context_biases[i] >= 0.0 && s.context_biases[i] <= 1.0,
              "context.biases[" + std::to_string(i) + "]", "must lie in [0, 1]");
  } else {
    throw ConfigError("context.kind", "unknown kind '" + s.context_kind + "' (uniform, product)");
  }

  ConceptKind ck;
  try {
    ck = parse_concept_kind(s.concept_kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("concept.kind", e.what());
  }
  for (std::size_t i = 0; i < s.concept_variables.size(); ++i)
    require(s.concept_variables[i] >= 1 && s.concept_variables[i] <= s.n,
            "concept.variables[" + std::to_string(i) + "]", "must lie in [1, n]");
  auto vars = s.concept_variables;
  std::sort(vars.begin(), vars.end());
  require(std::adjacent_find(vars.begin(), vars.end()) == vars.end(), "concept.variables", "must be distinct");
  if (ck == ConceptKind::dictator) require(vars.size() == 1, "concept.variables", "a dictator has one variable");
  if (ck == ConceptKind::constant_zero || ck == ConceptKind::constant_one)
    require(vars.empty(), "concept.variables", "constants take no variables");
  if (ck == ConceptKind::monotone_conjunction)
    require(!vars.empty(), "concept.variables", "a conjunction needs at least one variable");

  const OutcomeShape& sh = s.shape;
  require(sh.k >= 1, "outcome.k", "must be >= 1");
  if (is_discrete(sh.family)) {
    require(sh.lambda > 0.0 && sh.lambda < 0.5, "outcome.lambda", "must lie in (0, 1/2)");
    require(sh.sigmas.empty(), "outcome.sigmas", "only Gaussian families take sigmas");
    if (sh.family == Family::bernoulli_product)
      require(sh.b == 2, "outcome.b", "Bernoulli products have b = 2");
    else
      require(sh.b >= 2, "outcome.b", "must be >= 2");
    if (sh.family == Family::bary_product)
      require(sh.lambda * static_cast<double>(sh.b) <= 1.0, "outcome.lambda", "lambda * b must not exceed 1");
  } else {
    require(sh.b == 0, "outcome.b", "Gaussian families take b = 0");
    require(sh.sigmas.size() == sh.k, "outcome.sigmas", "expected k = " + std::to_string(sh.k) + " deviations");
    for (std::size_t j = 0; j < sh.k; ++j)
      require(sh.sigmas[j] > 0.0, "outcome.sigmas[" + std::to_string(j) + "]", "must be > 0");
    require(sh.box_lo < sh.box_hi, "outcome.box", "need lo < hi");
  }

  resolve(s.p0, nullptr, sh, "p0");
  resolve(s.p1, &s.p0, sh, "p1");

  const PipelineParams& p = s.params;
  require(p.epsilon > 0.0, "params.epsilon", "must be > 0");
  require(p.delta > 0.0 && p.delta <= 0.25, "params.delta", "must lie in (0, 1/4]");
  require(p.gamma >= 0.0, "params.gamma", "must be >= 0 (0 selects 1/g)");
  require(p.xi >= 0.0 && p.xi <= 1.0, "params.xi", "must lie in [0, 1] (0 selects the class bound)");
  require(p.m_p >= 1, "params.m_p", "must be >= 1");
  require(p.cn_constant > 0.0, "params.cn_constant", "must be > 0");
  require(p.separate_cap >= 1, "params.separate_cap", "must be >= 1");
  require(p.draw_budget >= 1, "params.draw_budget", "must be >= 1");
  require(p.max_concept_vars >= 1, "params.max_concept_vars", "must be >= 1");
  require(p.max_grid_pairs >= 1, "params.max_grid_pairs", "must be >= 1");
  require(p.gaussian_m_cap > 0.0, "params.m_cap", "must be > 0");
  require(p.m_mix >= 20, "params.m_mix", "must be >= 20");
  require(p.restarts >= 1, "params.restarts", "must be >= 1");
  require(p.eta >= 0.0, "params.eta", "must be >= 0 (0 selects gamma)");
  require(p.alpha >= 0.0, "params.alpha", "must be >= 0");
  require(p.xi_scale > 0.0 && p.xi_scale <= 1.0, "params.xi_scale", "must lie in (0, 1]");
  require(p.xi_floor > 0.0 && p.xi_floor <= 1.0, "params.xi_floor", "must lie in (0, 1]");
}

TargetModel build_target(const ScenarioSpec& s) {
  validate_scenario(s);
  const ConceptKind ck = parse_concept_kind(s.concept_kind);
  Concept c;
  switch (ck) {
    case ConceptKind::monotone_conjunction: c = Concept::conjunction(s.concept_variables, s.n); break;
    case ConceptKind::dictator: c = Concept::dictator(s.concept_variables.front(), s.n); break;
    case ConceptKind::constant_zero: c = Concept::constant_zero(); break;
    case ConceptKind::constant_one: c = Concept::constant_one(); break;
  }
  ContextDistribution d = s.context_kind == "uniform" ? ContextDistribution::uniform(s.n)
                                                      : ContextDistribution::product(s.context_biases);
  TargetModel t{c, DistributionSpec::from_params(s.shape, resolve(s.p0, nullptr, s.shape, "p0")),
                DistributionSpec::from_params(s.shape, resolve(s.p1, &s.p0, s.shape, "p1")), std::move(d)};
  t.validate();
  return t;
}

}  // namespace pwdlab
