#include "pdelab/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "pdelab/ann.hpp"
#include "pdelab/config.hpp"
#include "pdelab/costs.hpp"
#include "pdelab/errors.hpp"
#include "pdelab/manifest.hpp"
#include "pdelab/pde.hpp"
#include "pdelab/regress.hpp"
#include "pdelab/surrogate.hpp"
#include "pdelab/textio.hpp"

namespace pdelab {

using nlohmann::json;

int exit_code_for(const std::exception& e) noexcept {
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->exit_code();
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfigError;
  if (dynamic_cast<const MissingInputError*>(&e)) return kExitMissingInput;
  return kExitNumericalFailure;
}

namespace {

int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    const char* kind = code == kExitConfigError   ? "config error"
                       : code == kExitMissingInput ? "missing input"
                                                   : "numerical failure";
    err << kToolName << ": " << kind << ": " << e.what() << '\n';
    return code;
  }
}

// Runs one pipeline stage, tagging any failure with the stage name.
template <typename F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), exit_code_for(e));
  }
}

ExperimentConfig prepare(const CommandOptions& opts) {
  ExperimentConfig c = load_config(opts.config);
  if (opts.seed) override_seeds(c, *opts.seed);
  if (opts.format) {
    if (*opts.format == "csv") {
      c.output.csv = true;
      c.output.json = false;
    } else if (*opts.format == "json") {
      c.output.csv = false;
      c.output.json = true;
    } else {
      throw ConfigError("--format must be csv or json, got '" + *opts.format + "'");
    }
  }
  if (opts.out) c.output.directory = opts.out->string();
  return c;
}

template <typename T>
const T& require(const std::optional<T>& section, const char* name) {
  if (!section) throw ConfigError(std::string("config: missing required section '") + name + "'");
  return *section;
}

std::string sig(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

json field_json(const SolutionField& f) {
  return {{"provenance", std::string(to_string(f.provenance))}, {"nodes", f.nodes}, {"values", f.values}};
}

json problem_json(const PoissonProblem& p) {
  return {{"g", p.g}, {"x0", p.x0}, {"x1", p.x1}, {"y0", p.y0}, {"y1", p.y1}};
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json seeds_json(const ExperimentConfig& c) {
  json s = json::object();
  if (c.regression) s["regression"] = c.regression->synthetic.seed;
  if (c.space) s["space_master"] = c.space->master_seed;
  if (c.split) s["split"] = c.split->seed;
  if (c.train) s["train_init"] = c.train->init_seed;
  if (c.eval) s["eval"] = c.eval->options.seed;
  return s;
}

json base_manifest(const char* command, const ExperimentConfig& c) {
  return {{"command", command}, {"config", to_json(c)}, {"seeds", seeds_json(c)}};
}

RegressionDataset load_regression(const RegressionSection& r) {
  if (r.data_csv) return dataset_from_csv(read_file(*r.data_csv));
  return generate_synthetic(r.synthetic);
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_solve(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = prepare(opts);
    if (!c.problem_present) throw ConfigError("config: missing required section 'problem'");
    RunWriter w(c.output.directory);

    std::vector<PoissonProblem> problems;
    for (const auto& p : c.problems) problems.push_back(p.problem);
    const auto analytic = sweep_figure1(problems, c.n_nodes);

    std::ostringstream fig;
    fig << "series,label,g,y0,y1,x,y\n";
    json solutions = json::array();
    json plots = json::array();
    for (std::size_t i = 0; i < problems.size(); ++i) {
      const auto& p = problems[i];
      const SolutionField fdm = solve_fdm(p, c.n_nodes);
      std::string label = c.problems[i].label;
      if (label.empty()) label = "g=" + sig(p.g) + " y0=" + sig(p.y0) + " y1=" + sig(p.y1);
      double max_err = 0.0;
      for (std::size_t k = 0; k < fdm.size(); ++k) max_err = std::max(max_err, std::abs(fdm.values[k] - analytic[i].values[k]));

      if (c.output.csv) {
        w.write("solution_" + std::to_string(i) + "_analytic.csv", to_csv(analytic[i]));
        w.write("solution_" + std::to_string(i) + "_fdm.csv", to_csv(fdm));
      }
      std::string csv_cell = label;
      std::replace(csv_cell.begin(), csv_cell.end(), ',', ';');
      for (std::size_t k = 0; k < analytic[i].size(); ++k)
        fig << i << ',' << csv_cell << ',' << format_real(p.g) << ',' << format_real(p.y0) << ',' << format_real(p.y1)
            << ',' << format_real(analytic[i].nodes[k]) << ',' << format_real(analytic[i].values[k]) << '\n';
      solutions.push_back({{"label", label},
                           {"problem", problem_json(p)},
                           {"max_abs_fdm_minus_analytic", max_err},
                           {"analytic", field_json(analytic[i])},
                           {"fdm", field_json(fdm)}});
      plots.push_back({{"series", i}, {"label", label}, {"x", analytic[i].nodes}, {"y", analytic[i].values}});
      out << "problem " << i << " (" << label << "): max |fdm - analytic| = " << sig(max_err) << '\n';
    }
    if (c.output.csv) w.write("figure1.csv", fig.str());
    if (c.output.json) w.write_json("figure1.json", {{"series", plots}});

    json m = base_manifest("solve", c);
    m["summary"] = {{"n_nodes", c.n_nodes}, {"solutions", solutions}};
    m["timings"] = json::object();
    w.finish(m);
    out << "wrote " << w.files().size() + 1 << " files to " << w.dir().string() << '\n';
  });
}

int cmd_fit(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = prepare(opts);
    const auto& section = require(c.regression, "regression");
    const RegressionDataset d = stage("data", [&] { return load_regression(section); });
    const LinearModel fit = stage("fit", [&] { return fit_least_squares(d); });

    RunWriter w(c.output.directory);
    w.write("dataset.csv", to_csv(d));
    w.write_json("dataset_meta.json", meta_to_json(d.meta()));
    w.write_json("model.json", to_json(fit));

    // Fitted and true lines on an even grid over the sampled range.
    const auto [lo, hi] = std::minmax_element(d.inputs().begin(), d.inputs().end());
    const double x_lo = section.data_csv ? *lo : section.synthetic.x_lo;
    const double x_hi = section.data_csv ? *hi : section.synthetic.x_hi;
    const auto xs = uniform_grid(x_lo, x_hi, d.size());
    std::ostringstream line;
    line << "x,y_true,y_fit\n";
    json plot_true = json::array();
    json plot_fit = json::array();
    for (double x : xs) {
      const bool known = d.meta().true_w && d.meta().true_b;
      const double truth = known ? d.meta().true_w.value() * x + d.meta().true_b.value() : 0.0;
      line << format_real(x) << ',' << (known ? format_real(truth) : "") << ',' << format_real(fit(x)) << '\n';
      plot_true.push_back(known ? json(truth) : json(nullptr));
      plot_fit.push_back(fit(x));
    }
    if (c.output.csv) w.write("fit_line.csv", line.str());
    if (c.output.json) w.write_json("fit_line.json", {{"x", xs}, {"y_true", plot_true}, {"y_fit", plot_fit}});

    json m = base_manifest("fit", c);
    m["summary"] = {{"w_hat", fit.w}, {"b_hat", fit.b}, {"sse", sse(fit, d)}, {"n", d.size()}};
    m["timings"] = json::object();
    w.finish(m);
    out << "w_hat = " << format_real(fit.w) << "\nb_hat = " << format_real(fit.b) << '\n';
  });
}

int cmd_train_ann(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = prepare(opts);
    const auto& section = require(c.regression, "regression");
    TrainConfig cfg = require(c.train, "train");
    const AnnSection ann = c.ann.value_or(AnnSection{});
    const RegressionDataset d = stage("data", [&] { return load_regression(section); });

    const auto sizes = layer_sizes(ann.arch, 1, 1);
    std::vector<Transfer> transfers(ann.arch.hidden.size(), ann.arch.hidden_transfer);
    transfers.push_back(ann.arch.output_transfer);
    MlpModel start = MlpModel::zeros(sizes, transfers);
    if (ann.initial) {
      start = MlpModel::siso(ann.initial->w, ann.initial->b, ann.arch.output_transfer);
      cfg.init_scheme = InitScheme::given;
    }
    const TrainResult r = stage("train", [&] { return train_steepest_descent(start, d, cfg); });

    RunWriter w(c.output.directory);
    w.write_json("model.json", to_json(r.model));
    w.write_json("train_report.json", to_json(r.report), true);
    if (c.output.csv) w.write("loss.csv", loss_csv(r.report));
    if (c.output.json) w.write_json("loss.json", {{"loss", to_json(r.report)["loss_history"]}});

    json summary{{"architecture", describe(ann.arch, 1, 1)},
                 {"train_config", to_json(cfg)},
                 {"epochs_run", r.report.epochs_run},
                 {"stop_reason", std::string(to_string(r.report.stop_reason))},
                 {"final_loss", opt_json(std::isfinite(r.report.loss_history.back())
                                             ? std::optional(r.report.loss_history.back())
                                             : std::nullopt)}};
    out << "stop: " << to_string(r.report.stop_reason) << " after " << r.report.epochs_run << " epochs\n";
    if (ann.arch.hidden.empty() && ann.arch.output_transfer == Transfer::purelin) {
      // Single linear neuron: compare against the direct least-squares solution.
      const LinearModel ls = fit_least_squares(d);
      const double w_hat = r.model.layers()[0].weights(0, 0);
      const double b_hat = r.model.layers()[0].biases[0];
      summary["w_hat"] = w_hat;
      summary["b_hat"] = b_hat;
      summary["least_squares"] = to_json(ls);
      summary["max_param_gap_vs_least_squares"] = std::max(std::abs(w_hat - ls.w), std::abs(b_hat - ls.b));
      out << "w_hat = " << format_real(w_hat) << "\nb_hat = " << format_real(b_hat) << '\n';
    }
    json m = base_manifest("train-ann", c);
    m["summary"] = summary;
    m["timings"] = {{"t_nt", r.report.wall_time_s}};
    w.finish(m);
  });
}

int cmd_surrogate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = prepare(opts);
    const ParameterSpace& space = require(c.space, "space");
    const SplitSection& split = require(c.split, "split");
    const ArchSpec& arch = require(c.arch, "arch");
    const TrainConfig& cfg = require(c.train, "train");
    const EvalSection& eval = require(c.eval, "eval");
    const CostSection cost = c.cost.value_or(CostSection{});
    RunWriter w(c.output.directory);

    const SurrogateDataset raw = stage("generate", [&] { return generate_dataset(space, c.n_nodes); });
    const SurrogateDataset d = stage("split", [&] { return split_dataset(raw, split.ratios, split.seed); });
    out << "generated " << d.size() << " samples in " << sig(d.generation_time_s) << " s\n";

    const TrainResult trained = stage("train", [&] { return train_surrogate(d, arch, cfg); });
    out << "trained " << describe(arch, d.nodes()) << ": " << to_string(trained.report.stop_reason) << " after "
        << trained.report.epochs_run << " epochs\n";

    const EvalReport report = stage("evaluate", [&] { return evaluate(trained.model, d, space, eval.options); });

    std::optional<std::vector<DataCurvePoint>> curve;
    if (eval.data_curve)
      curve = stage("data_curve", [&] {
        return data_curve(space, c.n_nodes, eval.data_curve->sample_counts, eval.data_curve->seeds, arch, cfg,
                          split.ratios);
      });
    std::optional<std::vector<ArchSweepRow>> sweep;
    if (eval.arch_sweep) sweep = stage("arch_sweep", [&] { return arch_sweep(d, *eval.arch_sweep, cfg); });

    const std::string model_text = dump(to_json(trained.model));
    const auto probe_row = d.rows_in(SplitTag::test).empty() ? std::size_t{0} : d.rows_in(SplitTag::test).front();
    const SurrogateInput probe{d.inputs(probe_row, 0), d.inputs(probe_row, 1), d.inputs(probe_row, 2)};
    const PoissonProblem probe_problem{probe[0], space.x0, space.x1, probe[1], probe[2]};

    // Cold start with model loading, kept out of the warm median.
    const auto load_start = std::chrono::steady_clock::now();
    const MlpModel loaded = mlp_from_json(json::parse(model_text));
    volatile double sink = forward(loaded, probe)[0];
    const double cold_with_load = seconds_since(load_start);

    const CostLedger ledger = stage("measure", [&] {
      return measure({d.generation_time_s, trained.report.wall_time_s, cost.n_predictions},
                     [&] { sink = forward(trained.model, probe)[0]; },
                     [&] { sink = solve_fdm(probe_problem, c.n_nodes).values[1]; }, cost.repetitions);
    });
    (void)sink;

    w.write("inputs.csv", inputs_csv(d));
    w.write("outputs.csv", outputs_csv(d));
    w.write_json("dataset.json",
                 {{"grid", d.grid},
                  {"n_samples", d.size()},
                  {"master_seed", space.master_seed},
                  {"split_seed", split.seed},
                  {"sampling", std::string(to_string(space.sampling))},
                  {"generation_time_s", d.generation_time_s},
                  {"generation_threads", generation_threads()}},
                 true);
    w.write("model.json", model_text);
    w.write_json("train_report.json", to_json(trained.report), true);
    w.write_json("eval_report.json", to_json(report));
    w.write_json("cost_ledger.json", to_json(ledger), true);
    if (c.output.csv) {
      w.write("loss.csv", loss_csv(trained.report));
      w.write("extrapolation.csv", extrapolation_csv(report));
      w.write("sensitivity.csv", sensitivity_csv(report));
      if (curve) w.write("data_curve.csv", data_curve_csv(*curve));
      if (sweep) w.write("arch_sweep.csv", arch_sweep_csv(*sweep, d.nodes()));
    }

    json curve_json = nullptr;
    if (curve) {
      curve_json = json::array();
      for (const auto& p : *curve)
        curve_json.push_back({{"n_samples", p.n_samples}, {"mean_test_rmse", p.mean_test_rmse}, {"per_seed", p.per_seed}});
    }
    json sweep_json = nullptr;
    if (sweep) {
      sweep_json = json::array();
      for (const auto& r : *sweep)
        sweep_json.push_back({{"arch", describe(r.arch, d.nodes())},
                              {"rmse_train", opt_json(r.rmse_train)},
                              {"rmse_val", opt_json(r.rmse_val)},
                              {"rmse_test", opt_json(r.rmse_test)},
                              {"epochs_run", r.epochs_run},
                              {"stop_reason", std::string(to_string(r.stop_reason))}});
    }
    if (c.output.json)
      w.write_json("plots.json", {{"loss", to_json(trained.report)["loss_history"]},
                                  {"extrapolation", to_json(report)["extrapolation_curve"]},
                                  {"sensitivity", to_json(report)["sensitivity_table"]},
                                  {"data_curve", curve_json},
                                  {"arch_sweep", sweep_json}});

    json m = base_manifest("surrogate", c);
    m["summary"] = {{"dataset",
                     {{"n_samples", d.size()},
                      {"n_nodes", d.nodes()},
                      {"train", d.rows_in(SplitTag::train).size()},
                      {"val", d.rows_in(SplitTag::val).size()},
                      {"test", d.rows_in(SplitTag::test).size()}}},
                    {"architecture", describe(arch, d.nodes())},
                    {"train_config", to_json(cfg)},
                    {"train", {{"epochs_run", trained.report.epochs_run},
                               {"stop_reason", std::string(to_string(trained.report.stop_reason))}}},
                    {"eval", to_json(report)},
                    {"data_curve", curve_json},
                    {"arch_sweep", sweep_json},
                    {"costs", to_json(ledger)}};
    m["timings"] = {{"t_dg", d.generation_time_s},
                    {"t_nt", trained.report.wall_time_s},
                    {"t_pr", ledger.t_pr},
                    {"t_pr_cold", opt_json(ledger.t_pr_cold)},
                    {"t_pr_cold_with_model_load", cold_with_load},
                    {"t_solve", ledger.t_solve}};
    w.finish(m);

    const auto n = break_even(ledger);
    out << "test rmse: " << (report.rmse_test ? sig(*report.rmse_test) : std::string("absent")) << '\n';
    out << "break-even: " << (n ? std::to_string(*n) + " predictions" : std::string("never")) << '\n';
  });
}

int cmd_breakeven(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = prepare(opts);
    const CostLedger& l = require(c.ledger, "ledger");
    const auto n = break_even(l);
    out << "T_dg      " << sig(l.t_dg) << " s\n"
        << "T_nt      " << sig(l.t_nt) << " s\n"
        << "T_pr      " << sig(l.t_pr) << " s\n"
        << "T_solve   " << sig(l.t_solve) << " s\n"
        << "N         " << l.n_predictions << '\n'
        << "T_t       " << sig(total_time(l)) << " s (vs " << sig(static_cast<double>(l.n_predictions) * l.t_solve)
        << " s for N direct solves)\n"
        << "break-even " << (n ? std::to_string(*n) : std::string("never")) << '\n';
    RunWriter w(c.output.directory);
    w.write_json("breakeven.json", {{"total_time", total_time(l)},
                                    {"break_even", n ? json(*n) : json("never")},
                                    {"ledger", to_json(l)}});
    json m = base_manifest("breakeven", c);
    m["summary"] = {{"costs", to_json(l)}};
    m["timings"] = json::object();
    w.finish(m);
  });
}

// ---------------------------------------------------------------------------
// Report

namespace {

const json* find(const json& j, std::initializer_list<const char*> path) {
  const json* at = &j;
  for (const char* key : path) {
    if (!at->is_object() || !at->contains(key) || (*at)[key].is_null()) return nullptr;
    at = &(*at)[key];
  }
  return at;
}

std::string num(const json* v, const char* unit = "") {
  if (!v || !v->is_number()) return "";
  return sig(v->get<double>()) + unit;
}

constexpr const char* kNotMeasured = "not measured";

}  // namespace

std::string render_report(const json& manifest) {
  const json& s = manifest.contains("summary") ? manifest["summary"] : json::object();
  const std::string command = manifest.value("command", "unknown");
  std::vector<std::pair<std::string, std::string>> rows;
  const auto value_or_missing = [](std::string v) { return v.empty() ? std::string(kNotMeasured) : v; };

  {
    std::string v;
    if (const json* m = find(manifest, {"machine"})) {
      v = m->value("os", "?") + ", " + m->value("arch", "?") + ", " +
          std::to_string(m->value("hardware_threads", 0)) + " hardware threads, " +
          std::to_string(m->value("generation_threads", 0)) + " generation threads, " + m->value("compiler", "?") +
          " (" + m->value("build", "?") + ")";
    }
    rows.emplace_back("Computational resources", value_or_missing(v));
  }
  {
    std::string v;
    if (const json* t = find(manifest, {"timings", "t_dg"})) {
      v = "T_dg = " + num(t, " s");
      if (const json* n = find(s, {"dataset", "n_samples"})) v += " for " + std::to_string(n->get<std::size_t>()) + " solves";
      if (const json* ts = find(manifest, {"timings", "t_solve"})) v += "; single solve median " + num(ts, " s");
    }
    rows.emplace_back("Data generation cost", value_or_missing(v));
  }
  {
    std::string v;
    if (const json* t = find(manifest, {"timings", "t_nt"})) {
      v = "T_nt = " + num(t, " s");
      if (const json* e = find(s, {"train", "epochs_run"})) v += " over " + std::to_string(e->get<std::size_t>()) + " epochs";
      else if (const json* e2 = find(s, {"epochs_run"})) v += " over " + std::to_string(e2->get<std::size_t>()) + " epochs";
    }
    rows.emplace_back("Training cost", value_or_missing(v));
  }
  {
    std::string v;
    if (const json* a = find(s, {"architecture"})) {
      v = a->get<std::string>();
      if (const json* sw = find(s, {"arch_sweep"})) {
        v += "; sweep:";
        for (const auto& r : *sw)
          v += " " + r.value("arch", std::string("?")) + " test rmse " +
               (r["rmse_test"].is_number() ? sig(r["rmse_test"].get<double>()) : std::string("absent")) + ";";
        v.pop_back();
      } else {
        v += "; sweep not run";
      }
    }
    rows.emplace_back("Architecture", value_or_missing(v));
  }
  {
    std::string v;
    const json* tr = find(s, {"eval", "rmse_train"});
    const json* va = find(s, {"eval", "rmse_val"});
    if (tr && va) {
      v = "train rmse " + num(tr) + ", val rmse " + num(va) + ", gap " + sig(va->get<double>() - tr->get<double>());
    } else if (tr) {
      v = "train rmse " + num(tr) + ", val split empty";
    }
    rows.emplace_back("Over/under-fitting (train vs val)", value_or_missing(v));
  }
  {
    std::string v;
    if (const json* t = find(s, {"train_config"})) {
      v = "alpha " + num(find(*t, {"learning_rate"})) + ", tolerance " + num(find(*t, {"stop_tolerance"})) +
          ", max epochs " + std::to_string(t->value("max_epochs", 0));
      const json* e = find(s, {"train", "epochs_run"});
      if (!e) e = find(s, {"epochs_run"});
      const json* r = find(s, {"train", "stop_reason"});
      if (!r) r = find(s, {"stop_reason"});
      if (e) v += ", ran " + std::to_string(e->get<std::size_t>()) + " epochs";
      if (r) v += " (" + r->get<std::string>() + ")";
    }
    rows.emplace_back("Learning rate, tolerance, epochs", value_or_missing(v));
  }
  {
    std::string v;
    if (const json* c = find(s, {"data_curve"})) {
      v = "data_curve.csv:";
      for (const auto& p : *c)
        v += " n=" + std::to_string(p.value("n_samples", 0)) + " rmse " + sig(p.value("mean_test_rmse", 0.0)) + ";";
      v.pop_back();
    }
    rows.emplace_back("Data needed for accuracy", value_or_missing(v));
  }
  {
    std::string v;
    if (const json* c = find(s, {"eval", "extrapolation_curve"}); c && !c->empty()) {
      v = "extrapolation.csv:";
      for (const auto& p : *c) v += " x" + sig(p.value("multiplier", 0.0)) + " rmse " + sig(p.value("rmse", 0.0)) + ";";
      v.pop_back();
    }
    rows.emplace_back("Extrapolation beyond trained range", value_or_missing(v));
  }
  {
    std::string v;
    if (const json* t = find(s, {"eval", "discretization_transfer"})) {
      v = "rmse " + num(t) + " on a " + std::to_string(find(s, {"eval", "fine_nodes"})->get<std::size_t>()) +
          "-node grid (resolution change only); boundary violation " + num(find(s, {"eval", "boundary_violation"}));
    }
    rows.emplace_back("Discretisation generalisation", value_or_missing(v));
  }
  {
    std::string v;
    if (const json* t = find(s, {"eval", "sensitivity_table"}); t && !t->empty()) {
      v = "sensitivity.csv:";
      for (const auto& r : *t)
        v += " delta " + sig(r.value("perturbation", 0.0)) + " -> max dev " + sig(r.value("max_output_deviation", 0.0)) +
             " (solver " + sig(r.value("max_truth_deviation", 0.0)) + ");";
      v.pop_back();
    }
    rows.emplace_back("Input margins of error", value_or_missing(v));
  }

  std::ostringstream os;
  os << kToolName << " report (" << command << " run)\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string id = "Q" + std::to_string(i + 1);
    id.resize(3, ' ');
    os << id << " | " << rows[i].first << " | " << rows[i].second << '\n';
  }
  std::string be;
  if (const json* c = find(s, {"costs"})) {
    const json* n = find(*c, {"break_even"});
    be = "N = " + (n ? (n->is_string() ? n->get<std::string>() : std::to_string(n->get<std::uint64_t>())) : std::string("?"));
    be += "; T_t = " + num(find(*c, {"total_time"}), " s") + " for " + std::to_string(c->value("n_predictions", 0)) +
          " predictions";
  }
  os << "BE  | Break-even | " << value_or_missing(be) << '\n';
  return os.str();
}

int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto path = run_dir / "manifest.json";
    if (!std::filesystem::exists(path)) throw MissingInputError("no manifest.json in " + run_dir.string());
    json manifest;
    try {
      manifest = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw MissingInputError("unreadable manifest " + path.string() + ": " + e.what());
    }
    out << render_report(manifest);
  });
}

}  // namespace pdelab
