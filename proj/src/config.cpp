#include "pdelab/config.hpp"

#include <algorithm>
#include <initializer_list>
#include <string_view>

#include "pdelab/errors.hpp"
#include "pdelab/textio.hpp"

namespace pdelab {

namespace {

using nlohmann::json;

// View of one JSON object that rejects keys outside `allowed` and reports
// errors with the object's JSON pointer.
class Obj {
 public:
  Obj(const json& j, std::string path, std::initializer_list<std::string_view> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail("expected an object");
    for (const auto& [key, value] : j.items())
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail_key(key, "unknown key");
  }

  bool has(std::string_view key) const { return j_.contains(key); }
  const json& at(std::string_view key) const {
    if (!has(key)) fail_key(key, "missing required key");
    return j_.at(std::string(key));
  }
  std::string path(std::string_view key) const { return path_ + "/" + std::string(key); }

  double real(std::string_view key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const json& v = at(key);
    if (!v.is_number()) fail_key(key, "expected a number");
    return v.get<double>();
  }

  std::uint64_t count(std::string_view key, std::optional<std::uint64_t> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const json& v = at(key);
    if (!v.is_number_unsigned()) fail_key(key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string text(std::string_view key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const json& v = at(key);
    if (!v.is_string()) fail_key(key, "expected a string");
    return v.get<std::string>();
  }

  Interval interval(std::string_view key, std::optional<Interval> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const json& v = at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail_key(key, "expected [lo, hi]");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  std::vector<double> reals(std::string_view key, std::optional<std::vector<double>> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const json& v = at(key);
    if (!v.is_array()) fail_key(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail_key(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::uint64_t> counts(std::string_view key, std::optional<std::vector<std::uint64_t>> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const json& v = at(key);
    if (!v.is_array()) fail_key(key, "expected an array of non-negative integers");
    std::vector<std::uint64_t> out;
    for (const auto& e : v) {
      if (!e.is_number_unsigned()) fail_key(key, "expected an array of non-negative integers");
      out.push_back(e.get<std::uint64_t>());
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError("config " + path_ + ": " + what); }
  [[noreturn]] void fail_key(std::string_view key, const std::string& what) const {
    throw ConfigError("config " + path(key) + ": " + what);
  }

  // Runs a domain validate() and reports its ParameterError as a config error.
  template <typename F>
  void check(F&& f) const {
    try {
      f();
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

 private:
  const json& j_;
  std::string path_;
};

template <typename E, typename F>
E enum_value(const Obj& o, std::string_view key, E fallback, F&& from_string) {
  if (!o.has(key)) return fallback;
  const std::string s = o.text(key);
  try {
    return from_string(s);
  } catch (const ParameterError& e) {
    o.fail_key(key, e.what());
  }
}

LabeledProblem parse_problem(const json& j, const std::string& path) {
  const Obj o(j, path, {"g", "x0", "x1", "y0", "y1", "label"});
  LabeledProblem p{{o.real("g"), o.real("x0", 0.0), o.real("x1", 1.0), o.real("y0"), o.real("y1")}, o.text("label", "")};
  o.check([&] { p.problem.validate(); });
  return p;
}

ArchSpec parse_arch(const json& j, const std::string& path) {
  const Obj o(j, path, {"hidden", "hidden_transfer", "output_transfer"});
  ArchSpec a;
  for (auto h : o.counts("hidden", std::vector<std::uint64_t>{})) {
    if (h == 0) o.fail_key("hidden", "layer sizes must be >= 1");
    a.hidden.push_back(static_cast<std::size_t>(h));
  }
  a.hidden_transfer = enum_value(o, "hidden_transfer", Transfer::tanh, transfer_from_string);
  a.output_transfer = enum_value(o, "output_transfer", Transfer::purelin, transfer_from_string);
  return a;
}

json arch_json(const ArchSpec& a) {
  return {{"hidden", a.hidden},
          {"hidden_transfer", std::string(to_string(a.hidden_transfer))},
          {"output_transfer", std::string(to_string(a.output_transfer))}};
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  const Obj root(doc, "",
                 {"problem", "grid", "regression", "ann", "space", "split", "arch", "train", "eval", "cost", "ledger",
                  "output"});
  ExperimentConfig c;

  if (root.has("problem")) {
    c.problem_present = true;
    const json& p = root.at("problem");
    if (p.is_array()) {
      if (p.empty()) root.fail_key("problem", "empty problem list");
      for (std::size_t i = 0; i < p.size(); ++i) c.problems.push_back(parse_problem(p[i], "/problem/" + std::to_string(i)));
    } else {
      c.problems.push_back(parse_problem(p, "/problem"));
    }
  }

  if (root.has("grid")) {
    const Obj o(root.at("grid"), "/grid", {"n_nodes"});
    c.n_nodes = o.count("n_nodes", kDefaultNodes);
    if (c.n_nodes < 3) o.fail_key("n_nodes", "must be >= 3");
  }

  if (root.has("regression")) {
    const Obj o(root.at("regression"), "/regression",
                {"n", "true_w", "true_b", "x_range", "noise_amplitude", "seed", "data_csv"});
    RegressionSection r;
    if (o.has("data_csv")) r.data_csv = o.text("data_csv");
    SyntheticSpec& s = r.synthetic;
    s.n = o.count("n", 100);
    s.true_w = o.real("true_w", 2.0);
    s.true_b = o.real("true_b", -4.0);
    const Interval xr = o.interval("x_range", Interval{-4.0, 4.0});
    s.x_lo = xr.lo;
    s.x_hi = xr.hi;
    s.noise_amplitude = o.real("noise_amplitude", 2.0);
    s.seed = o.count("seed");
    if (s.n < 2) o.fail_key("n", "must be >= 2");
    if (!(s.x_lo < s.x_hi)) o.fail_key("x_range", "require lo < hi");
    if (!(s.noise_amplitude >= 0.0)) o.fail_key("noise_amplitude", "must be >= 0");
    c.regression = r;
  }

  if (root.has("ann")) {
    const Obj o(root.at("ann"), "/ann", {"hidden", "hidden_transfer", "output_transfer", "initial"});
    AnnSection a;
    json arch = root.at("ann");
    arch.erase("initial");
    a.arch = parse_arch(arch, "/ann");
    if (o.has("initial")) {
      const Obj init(o.at("initial"), "/ann/initial", {"w", "b"});
      if (!a.arch.hidden.empty()) init.fail("explicit initial values need a single-neuron model (no hidden layers)");
      a.initial = LinearModel{init.real("w"), init.real("b")};
    }
    c.ann = a;
  }

  if (root.has("space")) {
    const Obj o(root.at("space"), "/space",
                {"g_range", "y0_range", "y1_range", "domain", "sampling", "n_samples", "master_seed"});
    ParameterSpace s;
    s.g_range = o.interval("g_range");
    s.y0_range = o.interval("y0_range");
    s.y1_range = o.interval("y1_range");
    const Interval dom = o.interval("domain", Interval{0.0, 1.0});
    s.x0 = dom.lo;
    s.x1 = dom.hi;
    s.sampling = enum_value(o, "sampling", Sampling::uniform_random, sampling_from_string);
    s.n_samples = o.count("n_samples");
    s.master_seed = o.count("master_seed");
    o.check([&] { s.validate(); });
    c.space = s;
  }

  if (root.has("split")) {
    const Obj o(root.at("split"), "/split", {"train", "val", "test", "seed"});
    SplitSection s{{o.real("train", 0.8), o.real("val", 0.1), o.real("test", 0.1)}, o.count("seed")};
    o.check([&] { s.ratios.validate(); });
    c.split = s;
  }

  if (root.has("arch")) c.arch = parse_arch(root.at("arch"), "/arch");

  if (root.has("train")) {
    const Obj o(root.at("train"), "/train", {"learning_rate", "stop_tolerance", "max_epochs", "init_seed", "init_scheme"});
    TrainConfig t;
    t.learning_rate = o.real("learning_rate", 0.001);
    t.stop_tolerance = o.real("stop_tolerance", 1.0e-6);
    t.max_epochs = o.count("max_epochs", 100);
    t.init_seed = o.count("init_seed");
    t.init_scheme = enum_value(o, "init_scheme", InitScheme::uniform, init_scheme_from_string);
    o.check([&] { t.validate(); });
    c.train = t;
  }

  if (root.has("eval")) {
    const Obj o(root.at("eval"), "/eval",
                {"extrap_multipliers", "perturbations", "n_extrap_samples", "seed", "data_curve", "arch_sweep"});
    EvalSection e;
    e.options.extrap_multipliers = o.reals("extrap_multipliers", std::vector<double>{1.0, 1.5, 2.0, 4.0});
    e.options.perturbations = o.reals("perturbations", std::vector<double>{0.0, 0.01, 0.1});
    e.options.n_extrap_samples = o.count("n_extrap_samples", 32);
    e.options.seed = o.count("seed");
    for (double m : e.options.extrap_multipliers)
      if (!(m >= 0.0)) o.fail_key("extrap_multipliers", "multipliers must be >= 0");
    for (double d : e.options.perturbations)
      if (!(d >= 0.0)) o.fail_key("perturbations", "perturbations must be >= 0");
    if (o.has("data_curve")) {
      const Obj dc(o.at("data_curve"), "/eval/data_curve", {"sample_counts", "seeds"});
      DataCurveSection d;
      for (auto n : dc.counts("sample_counts")) d.sample_counts.push_back(static_cast<std::size_t>(n));
      d.seeds = dc.counts("seeds");
      if (d.sample_counts.empty()) dc.fail_key("sample_counts", "must not be empty");
      if (d.seeds.empty()) dc.fail_key("seeds", "must not be empty");
      e.data_curve = d;
    }
    if (o.has("arch_sweep")) {
      const json& list = o.at("arch_sweep");
      if (!list.is_array() || list.empty()) o.fail_key("arch_sweep", "expected a non-empty array of architectures");
      std::vector<ArchSpec> archs;
      for (std::size_t i = 0; i < list.size(); ++i) archs.push_back(parse_arch(list[i], "/eval/arch_sweep/" + std::to_string(i)));
      e.arch_sweep = archs;
    }
    c.eval = e;
  }

  if (root.has("cost")) {
    const Obj o(root.at("cost"), "/cost", {"repetitions", "n_predictions"});
    c.cost = CostSection{static_cast<std::size_t>(o.count("repetitions", 5)), o.count("n_predictions", 1000)};
    if (c.cost->repetitions < 1) o.fail_key("repetitions", "must be >= 1");
  }

  if (root.has("ledger")) {
    const Obj o(root.at("ledger"), "/ledger", {"t_dg", "t_nt", "t_pr", "t_solve", "n_predictions"});
    CostLedger l;
    l.t_dg = o.real("t_dg");
    l.t_nt = o.real("t_nt");
    l.t_pr = o.real("t_pr");
    l.t_solve = o.real("t_solve");
    l.n_predictions = o.count("n_predictions", 0);
    o.check([&] { l.validate(); });
    if (!(l.t_solve > 0.0)) o.fail_key("t_solve", "must be > 0");
    c.ledger = l;
  }

  if (root.has("output")) {
    const Obj o(root.at("output"), "/output", {"directory", "formats"});
    c.output.directory = o.text("directory", c.output.directory);
    if (o.has("formats")) {
      const json& f = o.at("formats");
      if (!f.is_array() || f.empty()) o.fail_key("formats", "expected a non-empty array of \"csv\"/\"json\"");
      c.output.csv = c.output.json = false;
      for (const auto& v : f) {
        if (v == "csv") c.output.csv = true;
        else if (v == "json") c.output.json = true;
        else o.fail_key("formats", "unknown format " + v.dump());
      }
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingInputError("config file not found: " + path.string());
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json j = json::object();
  if (c.problem_present) {
    json list = json::array();
    for (const auto& p : c.problems)
      list.push_back({{"g", p.problem.g},
                      {"x0", p.problem.x0},
                      {"x1", p.problem.x1},
                      {"y0", p.problem.y0},
                      {"y1", p.problem.y1},
                      {"label", p.label}});
    j["problem"] = list;
  }
  j["grid"] = {{"n_nodes", c.n_nodes}};
  if (c.regression) {
    const auto& s = c.regression->synthetic;
    j["regression"] = {{"n", s.n},
                       {"true_w", s.true_w},
                       {"true_b", s.true_b},
                       {"x_range", {s.x_lo, s.x_hi}},
                       {"noise_amplitude", s.noise_amplitude},
                       {"seed", s.seed}};
    if (c.regression->data_csv) j["regression"]["data_csv"] = *c.regression->data_csv;
  }
  if (c.ann) {
    j["ann"] = arch_json(c.ann->arch);
    if (c.ann->initial) j["ann"]["initial"] = {{"w", c.ann->initial->w}, {"b", c.ann->initial->b}};
  }
  if (c.space) {
    const auto& s = *c.space;
    j["space"] = {{"g_range", {s.g_range.lo, s.g_range.hi}},
                  {"y0_range", {s.y0_range.lo, s.y0_range.hi}},
                  {"y1_range", {s.y1_range.lo, s.y1_range.hi}},
                  {"domain", {s.x0, s.x1}},
                  {"sampling", std::string(to_string(s.sampling))},
                  {"n_samples", s.n_samples},
                  {"master_seed", s.master_seed}};
  }
  if (c.split)
    j["split"] = {{"train", c.split->ratios.train},
                  {"val", c.split->ratios.val},
                  {"test", c.split->ratios.test},
                  {"seed", c.split->seed}};
  if (c.arch) j["arch"] = arch_json(*c.arch);
  if (c.train) j["train"] = to_json(*c.train);
  if (c.eval) {
    const auto& o = c.eval->options;
    json e{{"extrap_multipliers", o.extrap_multipliers},
           {"perturbations", o.perturbations},
           {"n_extrap_samples", o.n_extrap_samples},
           {"seed", o.seed}};
    if (c.eval->data_curve)
      e["data_curve"] = {{"sample_counts", c.eval->data_curve->sample_counts}, {"seeds", c.eval->data_curve->seeds}};
    if (c.eval->arch_sweep) {
      json list = json::array();
      for (const auto& a : *c.eval->arch_sweep) list.push_back(arch_json(a));
      e["arch_sweep"] = list;
    }
    j["eval"] = e;
  }
  if (c.cost) j["cost"] = {{"repetitions", c.cost->repetitions}, {"n_predictions", c.cost->n_predictions}};
  if (c.ledger)
    j["ledger"] = {{"t_dg", c.ledger->t_dg},
                   {"t_nt", c.ledger->t_nt},
                   {"t_pr", c.ledger->t_pr},
                   {"t_solve", c.ledger->t_solve},
                   {"n_predictions", c.ledger->n_predictions}};
  json formats = json::array();
  if (c.output.csv) formats.push_back("csv");
  if (c.output.json) formats.push_back("json");
  j["output"] = {{"directory", c.output.directory}, {"formats", formats}};
  return j;
}

void override_seeds(ExperimentConfig& c, std::uint64_t seed) {
  if (c.regression) c.regression->synthetic.seed = seed;
  if (c.space) c.space->master_seed = seed;
  if (c.split) c.split->seed = seed;
  if (c.train) c.train->init_seed = seed;
  if (c.eval) c.eval->options.seed = seed;
}

}  // namespace pdelab
