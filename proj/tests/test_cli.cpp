// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "test_util.hpp"

namespace sarvi {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + SARVI_CLI_PATH + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

json read_json(const fs::path& p) { return json::parse(testing::slurp(p)); }

class Cli : public ::testing::Test {
 protected:
  testing::TempDir dir{"cli"};
  fs::path log() const { return dir / "log.txt"; }
  std::string p(const std::string& name) const { return "\"" + (dir / name).string() + "\""; }
  int sarvi(const std::string& args) { return run(args, log()); }
  std::string log_text() const { return testing::slurp(log()); }
};

TEST_F(Cli, SynthIsByteIdenticalAcrossRuns) {
  const std::string common = " --seed 7 --areas 3 --acq-min 10 --acq-max 12";
  ASSERT_EQ(sarvi("synth --out " + p("a") + common), 0) << log_text();
  ASSERT_EQ(sarvi("--threads 1 synth --out " + p("b") + common), 0) << log_text();
  ASSERT_EQ(sarvi("--threads 8 synth --out " + p("c") + common), 0) << log_text();
  for (const char* f : {"dataset.csv", "oracle.json"}) {
    EXPECT_EQ(testing::slurp(dir / "a" / f), testing::slurp(dir / "b" / f)) << f;
    EXPECT_EQ(testing::slurp(dir / "a" / f), testing::slurp(dir / "c" / f)) << f;
  }
  const auto run_json = read_json(dir / "a" / "run.json");
  EXPECT_EQ(run_json.at("command"), "synth");
  EXPECT_EQ(run_json.at("seed"), 7);
  EXPECT_TRUE(run_json.contains("version"));
  EXPECT_TRUE(run_json.at("outputs").is_array());
}

TEST_F(Cli, ManifestSuppliesOptions) {
  std::ofstream(dir / "m.json") << R"({"seed": 7, "areas": 3, "acq_min": 10, "acq-max": 12})";
  ASSERT_EQ(sarvi("--manifest " + p("m.json") + " synth --out " + p("m")), 0) << log_text();
  ASSERT_EQ(sarvi("synth --out " + p("f") + " --seed 7 --areas 3 --acq-min 10 --acq-max 12"), 0);
  EXPECT_EQ(testing::slurp(dir / "m" / "dataset.csv"), testing::slurp(dir / "f" / "dataset.csv"));
  // Command-line values win over the manifest.
  ASSERT_EQ(sarvi("--manifest " + p("m.json") + " synth --out " + p("g") + " --areas 2"), 0);
  EXPECT_LT(line_count(dir / "g" / "dataset.csv"), line_count(dir / "m" / "dataset.csv"));
  EXPECT_EQ(read_json(dir / "m" / "run.json").at("manifest").at("areas"), 3);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(sarvi(""), 2);
  EXPECT_EQ(sarvi("frobnicate"), 2);
  EXPECT_EQ(sarvi("synth --out " + p("x") + " --no-such-flag 3"), 2);
  EXPECT_EQ(sarvi("train --out " + p("x")), 2);
  EXPECT_EQ(sarvi("train --out " + p("x") + " --train " + p("missing.csv")), 1);
  EXPECT_NE(log_text().find("missing.csv"), std::string::npos);
  EXPECT_EQ(sarvi("--manifest " + p("missing.json") + " synth --out " + p("x")), 2);
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_EQ(sarvi("--manifest " + p("bad.json") + " synth --out " + p("x")), 2);
}

TEST_F(Cli, RecipeSynthSplitTrainEval) {
  ASSERT_EQ(sarvi("synth --out " + p("d") + " --seed 3 --areas 20 --acq-min 30 --acq-max 40 "
                  "--label-noise 0.01 --sar-noise 0.2"),
            0)
      << log_text();
  ASSERT_EQ(sarvi("split --out " + p("s") + " --seed 3 --data " + p("d/dataset.csv")), 0) << log_text();
  ASSERT_EQ(sarvi("train --out " + p("t") + " --seed 3 --train " + p("s/train.csv") +
                  " --params '{\"n_estimators\": 60, \"max_features\": \"all\"}'"),
            0)
      << log_text();
  ASSERT_EQ(sarvi("eval --out " + p("e") + " --model " + p("t/model.json") + " --test " + p("s/test.csv")), 0)
      << log_text();
  const auto report = read_json(dir / "e" / "eval.json");
  EXPECT_GE(report.at("overall").at("r2").get<double>(), 0.9) << report.dump();
  EXPECT_EQ(line_count(dir / "e" / "eval.csv"), 5u);

  ASSERT_EQ(sarvi("importance --out " + p("i") + " --repeats 2 --model " + p("t/model.json") +
                  " --data " + p("s/test.csv")),
            0)
      << log_text();
  EXPECT_EQ(line_count(dir / "i" / "importance.csv"), 14u);

  ASSERT_EQ(sarvi("infer --out " + p("ts") + " --model " + p("t/model.json") + " --data " + p("s/test.csv")), 0)
      << log_text();
  ASSERT_EQ(sarvi("smooth --out " + p("sm") + " --input " + p("ts/timeseries.csv")), 0) << log_text();
  EXPECT_EQ(line_count(dir / "sm" / "smoothed.csv"), line_count(dir / "ts" / "timeseries.csv"));
}

TEST_F(Cli, ThreadCountDoesNotChangeOutputs) {
  ASSERT_EQ(sarvi("synth --out " + p("d") + " --seed 5 --areas 4 --acq-min 10 --acq-max 14"), 0);
  ASSERT_EQ(sarvi("split --out " + p("s") + " --seed 5 --data " + p("d/dataset.csv")), 0);
  for (const char* threads : {"1", "8"}) {
    const std::string o = std::string("r") + threads;
    ASSERT_EQ(sarvi(std::string("--threads ") + threads + " train --out " + p(o) + " --seed 9 --train " +
                    p("s/train.csv") + " --params '{\"n_estimators\": 12, \"max_features\": \"sqrt\"}'"),
              0)
        << log_text();
    ASSERT_EQ(sarvi(std::string("--threads ") + threads + " importance --out " + p(o + "/imp") +
                    " --repeats 3 --seed 2 --model " + p(o + "/model.json") + " --data " + p("s/test.csv")),
              0)
        << log_text();
    ASSERT_EQ(sarvi(std::string("--threads ") + threads + " eval --out " + p(o + "/ev") + " --model " +
                    p(o + "/model.json") + " --test " + p("s/test.csv")),
              0);
  }
  for (const char* f : {"model.json", "imp/importance.csv", "imp/importance.json", "ev/eval.json", "ev/eval.csv"})
    EXPECT_EQ(testing::slurp(dir / "r1" / f), testing::slurp(dir / "r8" / f)) << f;
}

TEST_F(Cli, TuneRfrGridReportsEveryConfig) {
  ASSERT_EQ(sarvi("synth --out " + p("d") + " --seed 1 --areas 5 --acq-min 3 --acq-max 4"), 0);
  ASSERT_EQ(sarvi("tune --out " + p("t") + " --model forest --grid paper-rfr --train " + p("d/dataset.csv")), 0)
      << log_text();
  EXPECT_EQ(line_count(dir / "t" / "tuning.csv"), 161u);
  const auto summary = read_json(dir / "t" / "tuning.json");
  EXPECT_EQ(summary.at("n_configs"), 160);
  EXPECT_EQ(summary.at("n_success"), 150);
  EXPECT_EQ(sarvi("tune --out " + p("u") + " --model gbt --grid paper-rfr --train " + p("d/dataset.csv")), 2);
}

TEST_F(Cli, PairBuildsDatasetFromEventTables) {
  std::ofstream(dir / "sar.csv") << "area_id,timestamp,vv,vh,angle,lia,elevation,slope\n"
                                    "A1,2021-07-01T17:00:00Z,-10,-16,39,35,800,6\n"
                                    "A1,2021-07-03T05:00:00Z,-11,-17,41,37,800,6\n"
                                    "A1,2021-07-09T05:00:00Z,-11,-17,41,37,800,6\n";
  std::ofstream(dir / "opt.csv") << "area_id,timestamp,nir,red,blue\n"
                                    "A1,2021-07-01T10:00:00Z,0.5,0.2,0.1\n"
                                    "A1,2021-07-03T10:00:00Z,0.4,0.2,0.1\n";
  std::ofstream(dir / "areas.csv") << "area_id,class_label,forest_type\nA1,healthy_broadleaved,broadleaved\n";
  {
    std::ofstream w(dir / "weather.csv");
    w << "timestamp,total_precipitation,temperature_2m\n";
    for (int d = 1; d <= 10; ++d)
      for (int h = 0; h < 24; ++h) {
        char ts[32];
        std::snprintf(ts, sizeof ts, "2021-07-%02dT%02d:00:00Z", d, h);
        w << ts << ",0.0001,290\n";
      }
  }
  ASSERT_EQ(sarvi("pair --out " + p("pr") + " --sar " + p("sar.csv") + " --optical " + p("opt.csv") +
                  " --weather " + p("weather.csv") + " --area-table " + p("areas.csv")),
            0)
      << log_text();
  const auto loaded = load_dataset(dir / "pr" / "dataset.csv");
  ASSERT_EQ(loaded.dataset.size(), 2u);
  const auto& r = loaded.dataset.records[0];
  EXPECT_NEAR(*r.ndvi, 0.3 / 0.7, 1e-15);
  EXPECT_NEAR(r.prec_12h, 0.0012, 1e-15);
  EXPECT_EQ(r.temp, 290);
  EXPECT_EQ(r.forest_type, ForestType::broadleaved);
}

TEST_F(Cli, AblateAndSearchWriteReports) {
  ASSERT_EQ(sarvi("synth --out " + p("d") + " --seed 2 --areas 4 --acq-min 10 --acq-max 12"), 0);
  ASSERT_EQ(sarvi("split --out " + p("s") + " --seed 2 --data " + p("d/dataset.csv")), 0);
  const std::string data = " --train " + p("s/train.csv") + " --test " + p("s/test.csv");
  ASSERT_EQ(sarvi("ablate --out " + p("af") + " --kind features --params '{\"n_estimators\": 5}'" + data), 0)
      << log_text();
  EXPECT_EQ(line_count(dir / "af" / "ablation.csv"), 4u);
  ASSERT_EQ(sarvi("ablate --out " + p("ar") + " --kind robustness --repeats 2 --params '{\"n_estimators\": 5}'" +
                  data),
            0)
      << log_text();
  EXPECT_EQ(read_json(dir / "ar" / "ablation.json").size(), 2u);
  EXPECT_EQ(sarvi("ablate --out " + p("ax") + " --kind nonsense" + data), 2);
  ASSERT_EQ(sarvi("search --out " + p("se") + " --budget 2 --train " + p("s/train.csv")), 0) << log_text();
  EXPECT_TRUE(fs::exists(dir / "se" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir / "se" / "search.json"));
  EXPECT_TRUE(fs::exists(dir / "se" / "run.json"));
}

TEST_F(Cli, InferCaseWritesRasters) {
  ASSERT_EQ(sarvi("synth --out " + p("d") + " --seed 4 --areas 3 --acq-min 8 --acq-max 10"), 0);
  ASSERT_EQ(sarvi("train --out " + p("t") + " --train " + p("d/dataset.csv") + " --params '{\"n_estimators\": 4}'"), 0);
  auto c = testing::random_case(8, 3);
  json j;
  for (const auto& [name, r] : c.feature_rasters) {
    write_grid(r, dir / (name + ".asc"));
    j["rasters"][name] = name + ".asc";
  }
  write_grid(c.forest_type, dir / "ft.asc");
  write_grid(c.mask, dir / "mask.asc");
  write_grid(Raster(8, 8, 0.7, 20), dir / "truth.asc");
  j["forest_type"] = "ft.asc";
  j["mask"] = "mask.asc";
  j["truth"] = "truth.asc";
  j["scalars"] = c.scalars;
  std::ofstream(dir / "case.json") << j.dump();
  ASSERT_EQ(sarvi("infer --out " + p("inf") + " --model " + p("t/model.json") + " --case " + p("case.json")), 0)
      << log_text();
  const auto pred = read_grid(dir / "inf" / "prediction.asc");
  EXPECT_TRUE(pred.same_grid(c.mask));
  EXPECT_GT(read_json(dir / "inf" / "error.json").at("n").get<int>(), 0);
  EXPECT_TRUE(fs::exists(dir / "inf" / "abs_error.asc"));
}

}  // namespace
}  // namespace sarvi
