#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>

#include "pdelab/config.hpp"
#include "pdelab/errors.hpp"
#include "pdelab/manifest.hpp"
#include "pdelab/textio.hpp"

using namespace pdelab;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(PDELAB_SOURCE_DIR) / "configs";

json full_doc() {
  return json::parse(R"({
    "problem": {"g": 2, "y0": 0, "y1": 1},
    "grid": {"n_nodes": 51},
    "space": {"g_range": [0, 4], "y0_range": [0, 1], "y1_range": [0, 1], "n_samples": 27,
              "sampling": "grid", "master_seed": 3},
    "split": {"train": 0.6, "val": 0.2, "test": 0.2, "seed": 4},
    "arch": {"hidden": [8, 4], "hidden_transfer": "tanh", "output_transfer": "purelin"},
    "train": {"learning_rate": 0.002, "stop_tolerance": 1e-8, "max_epochs": 50, "init_seed": 5},
    "eval": {"extrap_multipliers": [1, 2], "perturbations": [0, 0.1], "seed": 6,
             "data_curve": {"sample_counts": [8, 16], "seeds": [1]},
             "arch_sweep": [{"hidden": []}, {"hidden": [4]}]},
    "output": {"directory": "out", "formats": ["json"]}
  })");
}

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("sections parse into typed values") {
  const auto c = parse_config(full_doc());
  REQUIRE(c.problems.size() == 1);
  CHECK(c.problems[0].problem.g == 2.0);
  CHECK(c.problems[0].problem.x1 == 1.0);
  CHECK(c.n_nodes == 51);
  REQUIRE(c.space);
  CHECK(c.space->sampling == Sampling::grid);
  CHECK(c.space->n_samples == 27);
  REQUIRE(c.arch);
  CHECK(c.arch->hidden == std::vector<std::size_t>{8, 4});
  REQUIRE(c.train);
  CHECK(c.train->max_epochs == 50);
  REQUIRE(c.eval);
  CHECK(c.eval->arch_sweep->size() == 2);
  CHECK(c.eval->data_curve->seeds == std::vector<std::uint64_t>{1});
  CHECK(c.output.json);
  CHECK_FALSE(c.output.csv);
  CHECK_FALSE(c.regression);
  CHECK_FALSE(c.ledger);
}

TEST_CASE("round trip: parse, serialize, parse") {
  const auto c = parse_config(full_doc());
  CHECK(parse_config(to_json(c)) == c);
  CHECK(to_json(parse_config(to_json(c))) == to_json(c));

  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    CAPTURE(entry.path().string());
    const auto shipped = load_config(entry.path());
    CHECK(parse_config(to_json(shipped)) == shipped);
  }
}

TEST_CASE("unknown keys are rejected with their path") {
  auto doc = full_doc();
  doc["extra"] = 1;
  CHECK(error_of(doc).find("/extra") != std::string::npos);

  doc = full_doc();
  doc["train"]["momentum"] = 0.9;
  CHECK(error_of(doc).find("/train/momentum") != std::string::npos);

  doc = full_doc();
  doc["eval"]["data_curve"]["reps"] = 2;
  CHECK(error_of(doc).find("/eval/data_curve/reps") != std::string::npos);
}

TEST_CASE("seeds must be explicit") {
  for (const auto& [section, key] : {std::pair{"space", "master_seed"}, std::pair{"split", "seed"},
                                     std::pair{"train", "init_seed"}, std::pair{"eval", "seed"}}) {
    auto doc = full_doc();
    doc[section].erase(key);
    const auto msg = error_of(doc);
    CAPTURE(msg);
    CHECK(msg.find(std::string("/") + section + "/" + key) != std::string::npos);
    CHECK(msg.find("missing") != std::string::npos);
  }
  CHECK_FALSE(error_of(json{{"regression", {{"n", 10}}}}).empty());
}

TEST_CASE("type and range errors") {
  const auto bad = [](const char* pointer, json value) {
    auto doc = full_doc();
    doc[json::json_pointer(pointer)] = std::move(value);
    return error_of(doc);
  };
  CHECK_FALSE(bad("/grid/n_nodes", 2).empty());
  CHECK_FALSE(bad("/grid/n_nodes", -5).empty());
  CHECK_FALSE(bad("/grid/n_nodes", "101").empty());
  CHECK_FALSE(bad("/space/g_range", json::array({4, 0})).empty());
  CHECK_FALSE(bad("/space/n_samples", 26).empty());  // grid sampling needs a cube
  CHECK_FALSE(bad("/space/sampling", "sobol").empty());
  CHECK_FALSE(bad("/split/test", 0.5).empty());
  CHECK_FALSE(bad("/arch/hidden", json::array({0})).empty());
  CHECK_FALSE(bad("/arch/output_transfer", "relu").empty());
  CHECK_FALSE(bad("/train/learning_rate", 0).empty());
  CHECK_FALSE(bad("/eval/perturbations", json::array({-0.1})).empty());
  CHECK_FALSE(bad("/output/formats", json::array({"png"})).empty());
  CHECK_FALSE(bad("/problem", json::array()).empty());
  CHECK_FALSE(error_of(json::array()).empty());
}

TEST_CASE("load_config distinguishes missing files from malformed ones") {
  const auto dir = fs::temp_directory_path() / "pdelab_test_config";
  fs::create_directories(dir);
  CHECK_THROWS_AS(load_config(dir / "absent.json"), MissingInputError);

  write_file(dir / "broken.json", "{\n  \"grid\": {\"n_nodes\": 5},\n  oops\n}\n");
  try {
    load_config(dir / "broken.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("override_seeds replaces every seed") {
  auto c = parse_config(full_doc());
  c.regression = RegressionSection{};
  override_seeds(c, 77);
  CHECK(c.space->master_seed == 77);
  CHECK(c.split->seed == 77);
  CHECK(c.train->init_seed == 77);
  CHECK(c.eval->options.seed == 77);
  CHECK(c.regression->synthetic.seed == 77);
}

TEST_CASE("digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
