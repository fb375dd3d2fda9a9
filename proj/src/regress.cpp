#include "pdelab/regress.hpp"

#include <cmath>
#include <sstream>

#include "pdelab/errors.hpp"
#include "pdelab/random.hpp"
#include "pdelab/textio.hpp"

namespace pdelab {

RegressionDataset::RegressionDataset(std::vector<double> inputs, std::vector<double> targets, DatasetMeta meta)
    : inputs_(std::move(inputs)), targets_(std::move(targets)), meta_(std::move(meta)) {
  if (inputs_.size() != targets_.size())
    throw ShapeError("RegressionDataset: " + std::to_string(inputs_.size()) + " inputs vs " +
                     std::to_string(targets_.size()) + " targets");
  if (inputs_.size() < 2) throw ParameterError("RegressionDataset: need at least 2 samples");
}

RegressionDataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 2) throw ParameterError("generate_synthetic: n must be >= 2");
  if (!(spec.x_lo < spec.x_hi)) throw ParameterError("generate_synthetic: require lo < hi");
  if (!(spec.noise_amplitude >= 0.0) || !std::isfinite(spec.noise_amplitude))
    throw ParameterError("generate_synthetic: noise amplitude must be finite and >= 0");

  Rng rng(spec.seed);
  std::vector<double> x(spec.n);
  std::vector<double> y(spec.n);
  for (auto& xi : x) xi = rng.uniform(spec.x_lo, spec.x_hi);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double e = rng.uniform(-spec.noise_amplitude, spec.noise_amplitude);
    y[i] = spec.true_w * x[i] + spec.true_b + e;
  }
  return RegressionDataset(std::move(x), std::move(y),
                           DatasetMeta{spec.seed, spec.noise_amplitude, spec.true_w, spec.true_b});
}

DenseMatrix build_design_matrix(const RegressionDataset& d) {
  DenseMatrix x(d.size(), 2);
  for (std::size_t i = 0; i < d.size(); ++i) {
    x(i, 0) = d.inputs()[i];
    x(i, 1) = 1.0;
  }
  return x;
}

LinearModel fit_least_squares(const RegressionDataset& d) {
  const DenseMatrix pinv = pseudoinverse(build_design_matrix(d));
  const DenseVector beta = matvec(pinv, d.targets());
  return {beta[0], beta[1]};
}

double sse(const LinearModel& m, const RegressionDataset& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e = d.targets()[i] - m(d.inputs()[i]);
    s += e * e;
  }
  return s;
}

std::string to_csv(const RegressionDataset& d) {
  std::ostringstream os;
  os << "x,y\n";
  for (std::size_t i = 0; i < d.size(); ++i) os << format_real(d.inputs()[i]) << ',' << format_real(d.targets()[i]) << '\n';
  return os.str();
}

RegressionDataset dataset_from_csv(std::string_view text) {
  const CsvTable t = parse_csv(text);
  const std::size_t cx = t.column("x");
  const std::size_t cy = t.column("y");
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& row : t.rows) {
    x.push_back(parse_real(row[cx]));
    y.push_back(parse_real(row[cy]));
  }
  return RegressionDataset(std::move(x), std::move(y));
}

nlohmann::json meta_to_json(const DatasetMeta& meta) {
  nlohmann::json j{{"seed", meta.seed}, {"noise_amplitude", meta.noise_amplitude}};
  j["true_w"] = meta.true_w ? nlohmann::json(*meta.true_w) : nlohmann::json(nullptr);
  j["true_b"] = meta.true_b ? nlohmann::json(*meta.true_b) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const LinearModel& m) { return {{"w", m.w}, {"b", m.b}}; }

LinearModel linear_model_from_json(const nlohmann::json& j) {
  return {j.at("w").get<double>(), j.at("b").get<double>()};
}

}  // namespace pdelab
