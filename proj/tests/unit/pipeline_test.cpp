#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "random_models.hpp"
#include "tailfactor/error.hpp"
#include "tailfactor/io.hpp"
#include "tailfactor/model.hpp"
#include "tailfactor/pipeline.hpp"

namespace fs = std::filesystem;
namespace tf = tailfactor;

namespace {

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root = fs::temp_directory_path() /
           ("tailfactor_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root);
    fs::create_directories(root);
    model_path = (root / "model.cfg").string();
    tf::write_text_file(model_path, tf::format_model_config(tftest::three_site_model(), 3));
  }
  void TearDown() override { fs::remove_all(root); }

  std::string path(const std::string& name) const { return (root / name).string(); }

  std::string simulate(std::size_t n) {
    tf::SimulateOptions o;
    o.model = model_path;
    o.n = n;
    tf::run_command(o, path("sim"));
    return path("sim/sample.csv");
  }

  tf::FitOptions coarse_fit(const std::string& data) const {
    tf::FitOptions o;
    o.data = data;
    o.k = 400;
    o.kappa_grid = {0.005, 0.01};
    o.lambda_grid = {0.0, 0.0002};
    return o;
  }

  fs::path root;
  std::string model_path;
};

}  // namespace

TEST(DefaultThresholdCount, FivePercentClamped) {
  EXPECT_EQ(tf::default_threshold_count(2700), 135u);
  EXPECT_EQ(tf::default_threshold_count(100), 10u);
  EXPECT_THROW(tf::default_threshold_count(11), tf::ParameterError);
}

TEST_F(PipelineTest, SimulateWritesSampleTruthAndManifest) {
  simulate(500);
  EXPECT_TRUE(fs::exists(path("sim/sample.csv")));
  EXPECT_TRUE(fs::exists(path("sim/truth.json")));
  EXPECT_TRUE(fs::exists(path("sim/manifest.json")));
  const auto table = tf::read_csv(path("sim/sample.csv"));
  EXPECT_EQ(table.values.rows(), 500);
  EXPECT_EQ(table.header, (std::vector<std::string>{"y1", "y2", "y3"}));
}

TEST_F(PipelineTest, FitThenRiskEqualsSingleShot) {
  const std::string data = simulate(8000);
  tf::run_command(coarse_fit(data), path("fit"));

  tf::RiskOptions staged;
  staged.fit = coarse_fit(data);
  staged.model = path("fit/model.json");
  staged.thresholds = {20.0, 50.0};
  tf::run_command(staged, path("risk_staged"));

  tf::RiskOptions single = staged;
  single.model.clear();
  tf::run_command(single, path("risk_single"));

  EXPECT_EQ(tf::read_text_file(path("risk_staged/risk.csv")),
            tf::read_text_file(path("risk_single/risk.csv")));
  EXPECT_EQ(tf::read_text_file(path("fit/model.json")),
            tf::read_text_file(path("risk_single/model.json")));
}

TEST_F(PipelineTest, RiskDecreasesInAlpha) {
  const std::string data = simulate(8000);
  tf::RiskOptions o;
  o.fit = coarse_fit(data);
  o.thresholds = {30.0};
  tf::run_command(o, path("risk"));
  std::string text = tf::read_text_file(path("risk/risk.csv"));
  for (const char* flag : {"false", "true"})
    for (auto at = text.find(flag); at != std::string::npos; at = text.find(flag))
      text.replace(at, std::string(flag).size(), flag[0] == 't' ? "1" : "0");
  const auto t = tf::parse_csv(text, "risk");
  ASSERT_EQ(t.values.rows(), 9);
  for (Eigen::Index i = 1; i < t.values.rows(); ++i) EXPECT_LE(t.values(i, 2), t.values(i - 1, 2));
}

TEST_F(PipelineTest, RerunIsByteIdentical) {
  const std::string data = simulate(4000);
  tf::BootstrapOptions b;
  b.risk.fit = coarse_fit(data);
  b.risk.thresholds = {20.0};
  b.risk.alphas = {0.3, 0.6};
  b.replicates = 49;
  const auto first = tf::run_command(b, path("boot"));
  tf::rerun_manifest(path("boot/manifest.json"), path("boot_again"));
  for (const auto& name : first.outputs)
    EXPECT_EQ(tf::read_text_file(path("boot/" + name)), tf::read_text_file(path("boot_again/" + name)))
        << name;
}

TEST_F(PipelineTest, FailureRemovesPartialOutputs) {
  const std::string data = simulate(300);
  tf::RiskOptions o;
  o.fit = coarse_fit(data);
  o.fit.k = 20;
  // Fitting succeeds and writes model.json; the missing thresholds fail afterwards.
  try {
    tf::run_command(o, path("broken"));
    FAIL() << "expected a configuration error";
  } catch (const tf::ConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("grid:"), std::string::npos) << e.what();
  }
  EXPECT_FALSE(fs::exists(path("broken")));
}

TEST_F(PipelineTest, StageTaggedInputError) {
  tf::write_text_file(path("bad.csv"), "a,b\n1,2\n3,oops\n");
  tf::TpdmOptions o;
  o.data = path("bad.csv");
  try {
    tf::run_command(o, path("tpdm"));
    FAIL() << "expected an input error";
  } catch (const tf::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("ingest: "), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST_F(PipelineTest, FittedModelJsonRoundTrip) {
  const std::string data_path = simulate(5000);
  const tf::DataMatrix data = tf::read_observations(data_path);
  const auto settings = tf::resolve_selection(coarse_fit(data_path), data.n());
  const auto model = tf::fit_tail_model(data, settings, 400);
  const std::string text = tf::fitted_model_to_json(model, false);
  bool lower = true;
  const auto back = tf::fitted_model_from_json(text, data, &lower);
  EXPECT_FALSE(lower);
  EXPECT_EQ(back.loading.matrix, model.loading.matrix);
  EXPECT_EQ(back.psi_hat.atoms, model.psi_hat.atoms);
  EXPECT_EQ(tf::fitted_model_to_json(back, false), text);
}
