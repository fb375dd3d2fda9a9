#include "pdelab/surrogate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "pdelab/errors.hpp"
#include "pdelab/random.hpp"
#include "pdelab/textio.hpp"

namespace pdelab {

Interval Interval::scaled(double factor) const noexcept {
  const double half = 0.5 * (hi - lo) * factor;
  return {mid() - half, mid() + half};
}

std::string_view to_string(Sampling s) noexcept { return s == Sampling::grid ? "grid" : "uniform_random"; }

Sampling sampling_from_string(std::string_view s) {
  if (s == "uniform_random") return Sampling::uniform_random;
  if (s == "grid") return Sampling::grid;
  throw ParameterError("unknown sampling '" + std::string(s) + "'");
}

std::string_view to_string(SplitTag t) noexcept {
  switch (t) {
    case SplitTag::train: return "train";
    case SplitTag::val: return "val";
    case SplitTag::test: return "test";
  }
  return "unknown";
}

SplitTag split_from_string(std::string_view s) {
  if (s == "train") return SplitTag::train;
  if (s == "val") return SplitTag::val;
  if (s == "test") return SplitTag::test;
  throw ParameterError("unknown split tag '" + std::string(s) + "'");
}

namespace {

std::size_t grid_points_per_axis(std::size_t n) {
  const auto k = static_cast<std::size_t>(std::llround(std::cbrt(static_cast<double>(n))));
  return k * k * k == n ? k : 0;
}

double axis_point(const Interval& r, std::size_t i, std::size_t k) {
  if (k == 1) return r.mid();
  if (i + 1 == k) return r.hi;
  return r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(k - 1);
}

SurrogateInput draw(const ParameterSpace& space, std::uint64_t seed) {
  Rng rng(seed);
  const double g = rng.uniform(space.g_range.lo, space.g_range.hi);
  const double y0 = rng.uniform(space.y0_range.lo, space.y0_range.hi);
  const double y1 = rng.uniform(space.y1_range.lo, space.y1_range.hi);
  return {g, y0, y1};
}

PoissonProblem problem_for(const ParameterSpace& space, std::span<const double> input) {
  return {input[0], space.x0, space.x1, input[1], input[2]};
}

}  // namespace

void ParameterSpace::validate() const {
  for (const auto* r : {&g_range, &y0_range, &y1_range})
    if (!(r->lo <= r->hi) || !std::isfinite(r->lo) || !std::isfinite(r->hi))
      throw ParameterError("ParameterSpace: every range needs finite lo <= hi");
  if (!(x0 < x1)) throw ParameterError("ParameterSpace: require x0 < x1");
  if (n_samples < 1) throw ParameterError("ParameterSpace: n_samples must be >= 1");
  if (sampling == Sampling::grid && grid_points_per_axis(n_samples) == 0)
    throw ParameterError("ParameterSpace: grid sampling needs n_samples = k^3, got " + std::to_string(n_samples));
}

std::vector<SurrogateInput> sample_parameters(const ParameterSpace& space) {
  space.validate();
  std::vector<SurrogateInput> out;
  out.reserve(space.n_samples);
  if (space.sampling == Sampling::grid) {
    const std::size_t k = grid_points_per_axis(space.n_samples);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        for (std::size_t c = 0; c < k; ++c)
          out.push_back({axis_point(space.g_range, a, k), axis_point(space.y0_range, b, k),
                         axis_point(space.y1_range, c, k)});
  } else {
    for (std::size_t i = 0; i < space.n_samples; ++i) out.push_back(draw(space, derive_seed(space.master_seed, i)));
  }
  return out;
}

std::vector<std::size_t> SurrogateDataset::rows_in(SplitTag t) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < split.size(); ++i)
    if (split[i] == t) rows.push_back(i);
  return rows;
}

namespace {

std::optional<Batch> gather(const SurrogateDataset& d, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return std::nullopt;
  Batch b{DenseMatrix(rows.size(), d.inputs.cols()), DenseMatrix(rows.size(), d.outputs.cols())};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy_n(d.inputs.row(rows[r]).begin(), d.inputs.cols(), b.inputs.row(r).begin());
    std::copy_n(d.outputs.row(rows[r]).begin(), d.outputs.cols(), b.targets.row(r).begin());
  }
  return b;
}

}  // namespace

std::optional<Batch> SurrogateDataset::batch(SplitTag t) const { return gather(*this, rows_in(t)); }

std::size_t generation_threads() {
  if (const char* env = std::getenv("PDELAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SurrogateDataset generate_dataset(const ParameterSpace& space, std::size_t n_nodes, std::size_t threads) {
  const auto samples = sample_parameters(space);
  if (n_nodes < 3) throw InvalidGridError("generate_dataset: n_nodes must be >= 3");
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n = samples.size();
  SurrogateDataset d{DenseMatrix(n, 3), DenseMatrix(n, n_nodes), uniform_grid(space.x0, space.x1, n_nodes),
                     std::vector<SplitTag>(n, SplitTag::train), 0.0};
  for (std::size_t i = 0; i < n; ++i) std::copy(samples[i].begin(), samples[i].end(), d.inputs.row(i).begin());

  std::mutex failure_mutex;
  std::optional<std::size_t> failed_index;
  std::string failure;
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      try {
        const SolutionField f = solve_fdm(problem_for(space, samples[i]), n_nodes);
        std::copy(f.values.begin(), f.values.end(), d.outputs.row(i).begin());
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failed_index || i < *failed_index) {
          failed_index = i;
          failure = e.what();
        }
        return;
      }
    }
  };

  const std::size_t workers = std::min(threads == 0 ? generation_threads() : threads, n);
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work, t, workers);
  }
  if (failed_index) throw SampleError(*failed_index, failure);

  d.generation_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return d;
}

void SplitRatios::validate() const {
  if (!(train >= 0.0 && val >= 0.0 && test >= 0.0)) throw ParameterError("split ratios must be >= 0");
  if (std::abs(train + val + test - 1.0) > 1e-9) throw ParameterError("split ratios must sum to 1");
}

SurrogateDataset split_dataset(SurrogateDataset d, const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  const auto count = [n](double r) { return static_cast<std::size_t>(std::floor(static_cast<double>(n) * r + 1e-9)); };
  const std::size_t n_val = count(ratios.val);
  const std::size_t n_test = count(ratios.test);
  const std::size_t n_train = n - n_val - n_test;
  for (std::size_t k = 0; k < n; ++k) {
    SplitTag tag = SplitTag::test;
    if (k < n_train) tag = SplitTag::train;
    else if (k < n_train + n_val) tag = SplitTag::val;
    d.split[order[k]] = tag;
  }
  return d;
}

std::vector<std::size_t> layer_sizes(const ArchSpec& arch, std::size_t n_outputs, std::size_t n_inputs) {
  std::vector<std::size_t> sizes{n_inputs};
  sizes.insert(sizes.end(), arch.hidden.begin(), arch.hidden.end());
  sizes.push_back(n_outputs);
  return sizes;
}

std::string describe(const ArchSpec& arch, std::size_t n_outputs, std::size_t n_inputs) {
  std::string s = "[";
  const auto sizes = layer_sizes(arch, n_outputs, n_inputs);
  for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? "," : "") + std::to_string(sizes[i]);
  s += "]";
  if (!arch.hidden.empty()) s += " hidden " + std::string(to_string(arch.hidden_transfer));
  s += " output " + std::string(to_string(arch.output_transfer));
  return s;
}

TrainResult train_surrogate(const SurrogateDataset& d, const ArchSpec& arch, const TrainConfig& cfg) {
  const auto train = d.batch(SplitTag::train);
  if (!train) throw ParameterError("train_surrogate: train split is empty");

  std::vector<Transfer> transfers(arch.hidden.size(), arch.hidden_transfer);
  transfers.push_back(arch.output_transfer);
  MlpModel m = MlpModel::zeros(layer_sizes(arch, d.nodes()), transfers);

  std::vector<double> shift(3, 0.0);
  std::vector<double> scale(3, 1.0);
  for (std::size_t c = 0; c < 3; ++c) {
    double lo = train->inputs(0, c);
    double hi = lo;
    double sum = 0.0;
    for (std::size_t r = 0; r < train->size(); ++r) {
      const double v = train->inputs(r, c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    shift[c] = sum / static_cast<double>(train->size());
    if (hi > lo) scale[c] = hi - lo;
  }
  m.set_standardization(std::move(shift), std::move(scale));
  return train_steepest_descent(std::move(m), *train, cfg);
}

double rmse(const MlpModel& m, const Batch& data) {
  return std::sqrt(loss_sse(m, data) / static_cast<double>(data.targets.values().size()));
}

std::vector<double> resample_linear(std::span<const double> nodes, std::span<const double> values,
                                    std::span<const double> at) {
  if (nodes.size() != values.size() || nodes.size() < 2) throw ShapeError("resample_linear: bad node/value arrays");
  std::vector<double> out(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double x = at[i];
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
    hi = std::clamp<std::size_t>(hi, 1, nodes.size() - 1);
    const std::size_t lo = hi - 1;
    const double t = (x - nodes[lo]) / (nodes[hi] - nodes[lo]);
    out[i] = values[lo] + t * (values[hi] - values[lo]);
  }
  return out;
}

EvalReport evaluate(const MlpModel& m, const SurrogateDataset& d, const ParameterSpace& space,
                    const EvalOptions& opts) {
  if (m.input_size() != 3 || m.output_size() != d.nodes())
    throw ShapeError("evaluate: model " + std::to_string(m.input_size()) + "->" + std::to_string(m.output_size()) +
                     " does not match dataset 3->" + std::to_string(d.nodes()));
  EvalReport r;
  if (auto b = d.batch(SplitTag::train)) r.rmse_train = rmse(m, *b);
  if (auto b = d.batch(SplitTag::val)) r.rmse_val = rmse(m, *b);
  if (auto b = d.batch(SplitTag::test)) r.rmse_test = rmse(m, *b);

  const std::size_t n_nodes = d.nodes();
  for (std::size_t k = 0; k < opts.extrap_multipliers.size(); ++k) {
    const double mult = opts.extrap_multipliers[k];
    ParameterSpace wide = space;
    wide.g_range = space.g_range.scaled(mult);
    wide.y0_range = space.y0_range.scaled(mult);
    wide.y1_range = space.y1_range.scaled(mult);
    const std::uint64_t stream = derive_seed(opts.seed, k);
    double sq = 0.0;
    for (std::size_t j = 0; j < opts.n_extrap_samples; ++j) {
      const SurrogateInput in = draw(wide, derive_seed(stream, j));
      const SolutionField truth = solve_fdm(problem_for(space, in), n_nodes);
      const DenseVector pred = forward(m, in);
      for (std::size_t i = 0; i < n_nodes; ++i) sq += (pred[i] - truth.values[i]) * (pred[i] - truth.values[i]);
    }
    const double count = static_cast<double>(opts.n_extrap_samples * n_nodes);
    r.extrapolation_curve.push_back({mult, opts.n_extrap_samples ? std::sqrt(sq / count) : 0.0});
  }

  std::vector<std::size_t> probe = d.rows_in(SplitTag::test);
  if (probe.empty()) {
    r.probe_rows = "all";
    probe.resize(d.size());
    std::iota(probe.begin(), probe.end(), 0);
  }

  for (double delta : opts.perturbations) {
    SensitivityRow row{delta, 0.0, 0.0};
    for (std::size_t idx : probe) {
      const auto base_in = d.inputs.row(idx);
      const DenseVector base = forward(m, base_in);
      for (std::size_t c = 0; c < 3; ++c)
        for (double sign : {1.0, -1.0}) {
          SurrogateInput in{base_in[0], base_in[1], base_in[2]};
          in[c] += sign * delta;
          const DenseVector moved = forward(m, in);
          const SolutionField truth = solve_fdm(problem_for(space, in), n_nodes);
          for (std::size_t i = 0; i < n_nodes; ++i) {
            row.max_output_deviation = std::max(row.max_output_deviation, std::abs(moved[i] - base[i]));
            row.max_truth_deviation = std::max(row.max_truth_deviation, std::abs(truth.values[i] - d.outputs(idx, i)));
          }
        }
    }
    r.sensitivity_table.push_back(row);
  }

  const std::size_t fine_nodes = 2 * (n_nodes - 1) + 1;
  r.fine_nodes = fine_nodes;
  const std::vector<double> fine_grid = uniform_grid(space.x0, space.x1, fine_nodes);
  double sq = 0.0;
  double violation = 0.0;
  for (std::size_t idx : probe) {
    const auto in = d.inputs.row(idx);
    const DenseVector pred = forward(m, in);
    const auto fine_pred = resample_linear(d.grid, pred.values(), fine_grid);
    const SolutionField fine_truth = solve_fdm(problem_for(space, in), fine_nodes);
    for (std::size_t i = 0; i < fine_nodes; ++i)
      sq += (fine_pred[i] - fine_truth.values[i]) * (fine_pred[i] - fine_truth.values[i]);
    violation += 0.5 * (std::abs(pred[0] - in[1]) + std::abs(pred[n_nodes - 1] - in[2]));
  }
  r.discretization_transfer = std::sqrt(sq / static_cast<double>(probe.size() * fine_nodes));
  r.boundary_violation = violation / static_cast<double>(probe.size());
  return r;
}

std::vector<DataCurvePoint> data_curve(const ParameterSpace& space, std::size_t n_nodes,
                                       const std::vector<std::size_t>& sample_counts,
                                       const std::vector<std::uint64_t>& seeds, const ArchSpec& arch,
                                       const TrainConfig& cfg, const SplitRatios& ratios) {
  if (seeds.empty()) throw ParameterError("data_curve: need at least one seed");
  std::vector<DataCurvePoint> curve;
  for (std::size_t n : sample_counts) {
    DataCurvePoint pt{n, 0.0, {}};
    for (std::uint64_t seed : seeds) {
      ParameterSpace s = space;
      s.n_samples = n;
      s.master_seed = derive_seed(seed, 1);
      SurrogateDataset d = split_dataset(generate_dataset(s, n_nodes), ratios, derive_seed(seed, 2));
      TrainConfig c = cfg;
      c.init_seed = derive_seed(seed, 3);
      const TrainResult trained = train_surrogate(d, arch, c);
      const auto test = d.batch(SplitTag::test);
      if (!test) throw ParameterError("data_curve: " + std::to_string(n) + " samples leave the test split empty");
      pt.per_seed.push_back(rmse(trained.model, *test));
    }
    pt.mean_test_rmse = std::accumulate(pt.per_seed.begin(), pt.per_seed.end(), 0.0) / static_cast<double>(seeds.size());
    curve.push_back(std::move(pt));
  }
  return curve;
}

std::vector<ArchSweepRow> arch_sweep(const SurrogateDataset& d, const std::vector<ArchSpec>& archs,
                                     const TrainConfig& cfg) {
  std::vector<ArchSweepRow> rows;
  for (const auto& arch : archs) {
    const TrainResult t = train_surrogate(d, arch, cfg);
    ArchSweepRow row{arch, std::nullopt, std::nullopt, std::nullopt, t.report.epochs_run, t.report.stop_reason};
    if (auto b = d.batch(SplitTag::train)) row.rmse_train = rmse(t.model, *b);
    if (auto b = d.batch(SplitTag::val)) row.rmse_val = rmse(t.model, *b);
    if (auto b = d.batch(SplitTag::test)) row.rmse_test = rmse(t.model, *b);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ArchSpec> default_arch_ladder() {
  return {ArchSpec{{}, Transfer::tanh, Transfer::purelin}, ArchSpec{{8}, Transfer::tanh, Transfer::purelin},
          ArchSpec{{16, 16}, Transfer::tanh, Transfer::purelin}};
}

// ---------------------------------------------------------------------------
// Persistence

std::string inputs_csv(const SurrogateDataset& d) {
  std::ostringstream os;
  os << "g,y0,y1,split\n";
  for (std::size_t i = 0; i < d.size(); ++i)
    os << format_real(d.inputs(i, 0)) << ',' << format_real(d.inputs(i, 1)) << ',' << format_real(d.inputs(i, 2)) << ','
       << to_string(d.split[i]) << '\n';
  return os.str();
}

std::string outputs_csv(const SurrogateDataset& d) {
  std::ostringstream os;
  for (std::size_t j = 0; j < d.nodes(); ++j) os << (j ? "," : "") << "y_" << j;
  os << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.nodes(); ++j) os << (j ? "," : "") << format_real(d.outputs(i, j));
    os << '\n';
  }
  return os.str();
}

SurrogateDataset dataset_from_csv(std::string_view inputs, std::string_view outputs, std::vector<double> grid) {
  const CsvTable in = parse_csv(inputs);
  const CsvTable out = parse_csv(outputs);
  if (in.rows.size() != out.rows.size() || in.rows.empty())
    throw ShapeError("surrogate dataset CSV: row counts differ or are zero");
  if (out.header.size() != grid.size()) throw ShapeError("surrogate dataset CSV: node count differs from grid");
  const std::size_t n = in.rows.size();
  SurrogateDataset d{DenseMatrix(n, 3), DenseMatrix(n, grid.size()), std::move(grid),
                     std::vector<SplitTag>(n, SplitTag::train), 0.0};
  const std::size_t cols[3] = {in.column("g"), in.column("y0"), in.column("y1")};
  const std::size_t csplit = in.column("split");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < 3; ++c) d.inputs(i, c) = parse_real(in.rows[i][cols[c]]);
    d.split[i] = split_from_string(in.rows[i][csplit]);
    for (std::size_t j = 0; j < d.nodes(); ++j) d.outputs(i, j) = parse_real(out.rows[i][j]);
  }
  return d;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string opt_csv(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json extrap = nlohmann::json::array();
  for (const auto& p : r.extrapolation_curve) extrap.push_back({{"multiplier", p.multiplier}, {"rmse", p.rmse}});
  nlohmann::json sens = nlohmann::json::array();
  for (const auto& s : r.sensitivity_table)
    sens.push_back({{"perturbation", s.perturbation},
                    {"max_output_deviation", s.max_output_deviation},
                    {"max_truth_deviation", s.max_truth_deviation}});
  nlohmann::json j{{"extrapolation_curve", extrap},
                   {"sensitivity_table", sens},
                   {"discretization_transfer", opt(r.discretization_transfer)},
                   {"fine_nodes", r.fine_nodes},
                   {"boundary_violation", r.boundary_violation},
                   {"probe_rows", r.probe_rows}};
  // Absent split metrics are left out rather than written as zero.
  if (r.rmse_train) j["rmse_train"] = *r.rmse_train;
  if (r.rmse_val) j["rmse_val"] = *r.rmse_val;
  if (r.rmse_test) j["rmse_test"] = *r.rmse_test;
  return j;
}

std::string extrapolation_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "multiplier,rmse\n";
  for (const auto& p : r.extrapolation_curve) os << format_real(p.multiplier) << ',' << format_real(p.rmse) << '\n';
  return os.str();
}

std::string sensitivity_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "perturbation,max_output_deviation,max_truth_deviation\n";
  for (const auto& s : r.sensitivity_table)
    os << format_real(s.perturbation) << ',' << format_real(s.max_output_deviation) << ','
       << format_real(s.max_truth_deviation) << '\n';
  return os.str();
}

std::string data_curve_csv(const std::vector<DataCurvePoint>& curve) {
  std::ostringstream os;
  os << "n_samples,mean_test_rmse\n";
  for (const auto& p : curve) os << p.n_samples << ',' << format_real(p.mean_test_rmse) << '\n';
  return os.str();
}

std::string arch_sweep_csv(const std::vector<ArchSweepRow>& rows, std::size_t n_outputs) {
  std::ostringstream os;
  os << "arch,rmse_train,rmse_val,rmse_test,epochs_run,stop_reason\n";
  for (const auto& r : rows) {
    std::string name = describe(r.arch, n_outputs);
    std::replace(name.begin(), name.end(), ',', ' ');
    os << name << ',' << opt_csv(r.rmse_train) << ',' << opt_csv(r.rmse_val) << ',' << opt_csv(r.rmse_test) << ','
       << r.epochs_run << ',' << to_string(r.stop_reason) << '\n';
  }
  return os.str();
}

}  // namespace pdelab
