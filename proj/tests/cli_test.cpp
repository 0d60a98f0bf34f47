#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "rarequant/atomic_file.hpp"

namespace rarequant::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct Result {
    int code;
    std::string out, err;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("rarequant_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        write_config(R"({
            "seed": 3, "models": 2,
            "vectorizer": {"dim": 2048},
            "train": {"max_iters": 60},
            "synth": {"vocab_size": 400, "doc_length_mean": 40, "train_size": 300,
                      "target_size": 600, "target_prevalence": 0.05, "separation": 2.0}
        })");
    }
    void TearDown() override { fs::remove_all(dir_); }

    void write_config(const std::string& text, const std::string& name = "config.json") {
        std::ofstream(dir_ / name) << text;
    }

    Result run_cli(std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = run(args, out, err);
        return {code, out.str(), err.str()};
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void synth_and_train(int models = 2) {
        ASSERT_EQ(run_cli({"synth", "--config", path("config.json"), "--out", path("corpus")}).code, kOk);
        ASSERT_EQ(run_cli({"train", "--config", path("config.json"), "--corpus", path("corpus/train.jsonl"), "--out",
                           path("bundle.json"), "--models", std::to_string(models)})
                      .code,
                  kOk);
    }

    fs::path dir_;
};

TEST_F(CliTest, SynthWritesThreeFiles) {
    const auto r = run_cli({"synth", "--config", path("config.json"), "--out", path("corpus")});
    EXPECT_EQ(r.code, kOk) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "corpus/train.jsonl"));
    EXPECT_TRUE(fs::exists(dir_ / "corpus/target.jsonl"));
    EXPECT_TRUE(fs::exists(dir_ / "corpus/target.truth.jsonl"));
}

TEST_F(CliTest, MissingConfigIsUsageErrorNamingThePath) {
    const auto r = run_cli({"synth", "--config", path("nope.json"), "--out", path("corpus")});
    EXPECT_EQ(r.code, kUsage);
    EXPECT_NE(r.err.find("nope.json"), std::string::npos);
}

TEST_F(CliTest, InvalidFieldIsUsageErrorNamingTheField) {
    write_config(R"({"synth": {"train_prevalence": 1.5}})", "bad.json");
    const auto r = run_cli({"synth", "--config", path("bad.json"), "--out", path("corpus")});
    EXPECT_EQ(r.code, kUsage);
    EXPECT_NE(r.err.find("synth.train_prevalence"), std::string::npos);
}

TEST_F(CliTest, UnknownFlagsAndCommandsAreUsageErrors) {
    EXPECT_EQ(run_cli({"synth", "--bogus"}).code, kUsage);
    EXPECT_EQ(run_cli({"fly"}).code, kUsage);
    EXPECT_EQ(run_cli({}).code, kUsage);
    EXPECT_EQ(run_cli({"--help"}).code, kOk);
}

TEST_F(CliTest, TrainWithOneModelAndRerunIsByteIdentical) {
    synth_and_train(1);
    const auto bundle = json::parse(slurp(dir_ / "bundle.json"));
    EXPECT_EQ(bundle.at("members").size(), 1u);
    EXPECT_FALSE(bundle.at("single_model").is_null());
    const auto first = slurp(dir_ / "bundle.json");
    ASSERT_EQ(run_cli({"train", "--config", path("config.json"), "--corpus", path("corpus/train.jsonl"), "--out",
                       path("bundle.json"), "--models", "1"})
                  .code,
              kOk);
    EXPECT_EQ(slurp(dir_ / "bundle.json"), first);
}

TEST_F(CliTest, TrainPrintsMemberWeights) {
    ASSERT_EQ(run_cli({"synth", "--config", path("config.json"), "--out", path("corpus")}).code, kOk);
    const auto r = run_cli({"train", "--config", path("config.json"), "--corpus", path("corpus/train.jsonl"), "--out",
                            path("bundle.json")});
    EXPECT_EQ(r.code, kOk) << r.err;
    EXPECT_NE(r.out.find("member 0"), std::string::npos);
    EXPECT_NE(r.out.find("member 1"), std::string::npos);
    EXPECT_NE(r.out.find("validation weight"), std::string::npos);
}

TEST_F(CliTest, SingleClassCorpusIsDataError) {
    std::ofstream(dir_ / "pos.jsonl") << R"({"id":"a","text":"x y","label":1}
{"id":"b","text":"y z","label":1}
)";
    const auto r = run_cli({"train", "--corpus", path("pos.jsonl"), "--out", path("bundle.json")});
    EXPECT_EQ(r.code, kDataError);
    EXPECT_NE(r.err.find("SingleClassError"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_ / "bundle.json"));
}

TEST_F(CliTest, MalformedCorpusIsDataError) {
    std::ofstream(dir_ / "bad.jsonl") << "{\"id\":\"a\",\"text\":\"x\",\"label\":1}\n{oops\n";
    const auto r = run_cli({"train", "--corpus", path("bad.jsonl"), "--out", path("bundle.json")});
    EXPECT_EQ(r.code, kDataError);
    EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, EstimateAllWithTruthReportsFourRowsWithBias) {
    synth_and_train();
    const auto r = run_cli({"estimate", "--bundle", path("bundle.json"), "--target", path("corpus/target.jsonl"),
                            "--all", "--out", path("report.json")});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto report = json::parse(slurp(dir_ / "report.json"));
    ASSERT_EQ(report.at("rows").size(), 4u);
    const std::vector<std::string> order = {"label_count", "raw_prob_sum", "calibrated_sum", "ensemble_calibrated"};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& row = report["rows"][i];
        EXPECT_EQ(row.at("kind"), order[i]);
        for (const char* key : {"tp", "est_pos", "bias", "accuracy", "balanced_accuracy", "n_target"})
            EXPECT_TRUE(row.contains(key)) << key;
    }
    EXPECT_EQ(report.at("method"), "bayes_posterior_mean");
    EXPECT_TRUE(report.contains("config_digest"));
}

TEST_F(CliTest, EstimateWithoutSidecarOmitsBias) {
    synth_and_train();
    fs::remove(dir_ / "corpus/target.truth.jsonl");
    const auto r = run_cli({"estimate", "--bundle", path("bundle.json"), "--target", path("corpus/target.jsonl"),
                            "--kind", "all", "--out", path("report.json")});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto report = json::parse(slurp(dir_ / "report.json"));
    ASSERT_EQ(report.at("rows").size(), 4u);
    for (const auto& row : report["rows"]) {
        EXPECT_TRUE(row.contains("est_pos"));
        EXPECT_TRUE(row.contains("prevalence"));
        EXPECT_FALSE(row.contains("bias"));
        EXPECT_FALSE(row.contains("tp"));
    }
}

TEST_F(CliTest, EstimateSingleKindAndMethodFlag) {
    synth_and_train();
    const auto r = run_cli({"estimate", "--bundle", path("bundle.json"), "--target", path("corpus/target.jsonl"),
                            "--kind", "label_count", "--method", "em", "--out", path("report.json")});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto report = json::parse(slurp(dir_ / "report.json"));
    ASSERT_EQ(report.at("rows").size(), 1u);
    EXPECT_EQ(report.at("method"), "em_ml");
    const double est = report["rows"][0]["est_pos"];
    EXPECT_EQ(est, std::floor(est));

    EXPECT_EQ(run_cli({"estimate", "--bundle", path("bundle.json"), "--target", path("corpus/target.jsonl"),
                       "--kind", "votes", "--out", path("r2.json")})
                  .code,
              kUsage);
    EXPECT_EQ(run_cli({"estimate", "--bundle", path("bundle.json"), "--target", path("corpus/target.jsonl"),
                       "--method", "mle", "--out", path("r2.json")})
                  .code,
              kUsage);
}

TEST_F(CliTest, IncompatibleBundleExitsWithFour) {
    synth_and_train();
    auto bundle = json::parse(slurp(dir_ / "bundle.json"));
    bundle["vectorizer"]["dim"] = 4096;
    std::ofstream(dir_ / "dim.json") << bundle.dump();
    auto r = run_cli({"estimate", "--bundle", path("dim.json"), "--target", path("corpus/target.jsonl"), "--out",
                      path("report.json")});
    EXPECT_EQ(r.code, kIncompatible);

    bundle = json::parse(slurp(dir_ / "bundle.json"));
    bundle["version"] = 99;
    std::ofstream(dir_ / "future.json") << bundle.dump();
    r = run_cli({"estimate", "--bundle", path("future.json"), "--target", path("corpus/target.jsonl"), "--out",
                 path("report.json")});
    EXPECT_EQ(r.code, kIncompatible);
    EXPECT_FALSE(fs::exists(dir_ / "report.json"));
}

TEST_F(CliTest, ExperimentOneSeedWritesReportAndSeries) {
    const auto r = run_cli({"experiment", "--config", path("config.json"), "--out", path("exp")});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto report = json::parse(slurp(dir_ / "exp/report.json"));
    ASSERT_EQ(report.at("runs").size(), 1u);
    EXPECT_EQ(report["runs"][0].at("rows").size(), 4u);
    EXPECT_TRUE(report.contains("aggregate"));
    const auto csv = slurp(dir_ / "exp/bias_series.csv");
    EXPECT_EQ(csv.rfind("kind,bias\n", 0), 0u);
    EXPECT_TRUE(fs::exists(dir_ / "exp/bias_per_seed.csv"));
}

TEST_F(CliTest, ExperimentIsByteIdenticalAcrossRuns) {
    write_config(R"({
        "seed": 3, "models": 2, "threads": 1,
        "vectorizer": {"dim": 2048}, "train": {"max_iters": 40},
        "synth": {"vocab_size": 300, "doc_length_mean": 30, "train_size": 200,
                  "target_size": 300, "target_prevalence": 0.05, "separation": 2.0},
        "experiment": {"seeds": [1, 2]}
    })", "multi.json");
    ASSERT_EQ(run_cli({"experiment", "--config", path("multi.json"), "--out", path("a")}).code, kOk);
    ASSERT_EQ(run_cli({"experiment", "--config", path("multi.json"), "--out", path("b")}).code, kOk);
    for (const char* f : {"report.json", "bias_series.csv", "bias_per_seed.csv"})
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
}

TEST_F(CliTest, InterruptedWriteLeavesNoFile) {
    const auto target = dir_ / "partial.json";
    EXPECT_THROW(write_file_atomic(target,
                                   [](std::ostream& out) {
                                       out << "{\"half\":";
                                       throw std::runtime_error("interrupted");
                                   }),
                 std::runtime_error);
    EXPECT_FALSE(fs::exists(target));
    EXPECT_FALSE(fs::exists(target.string() + ".tmp"));

    // An existing file survives a failed rewrite untouched.
    write_file_atomic(target, std::string_view("old"));
    EXPECT_THROW(write_file_atomic(target, [](std::ostream&) { throw std::runtime_error("x"); }), std::runtime_error);
    EXPECT_EQ(slurp(target), "old");
}

}  // namespace
}  // namespace rarequant::cli
