#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "cli.hpp"
#include "sscc/io.hpp"

namespace sscc::cli {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sscc_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST(Usage, MissingOrUnknownArgumentsExitTwo) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  const CliRun r = run_cli({"build-kb"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_EQ(run_cli({"generate", "d", "kb", "-o", "x.csv", "-n", "0"}).code, 2);
}

TEST(Usage, HelpExitsZero) { EXPECT_EQ(run_cli({"--help"}).code, 0); }

TEST_F(CliDir, MissingDatasetExitsOne) {
  const CliRun r = run_cli({"stats", path("nowhere")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error: dataset manifest not found"), std::string::npos) << r.err;
}

TEST_F(CliDir, EmptyDatasetExitsOne) {
  fs::create_directories(dir_ / "empty");
  io::write_file_atomic(dir_ / "empty" / "manifest.json",
                        R"({"name": "empty", "tables": [{"name": "T", "file": "t.csv", "kind": "point"}]})");
  io::write_file_atomic(dir_ / "empty" / "t.csv", "id,name,wkt\n");
  const CliRun r = run_cli({"build-kb", path("empty"), "-o", path("kb")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("dataset contains no entities"), std::string::npos) << r.err;
}

TEST_F(CliDir, EndToEndIsDeterministicAndValid) {
  ASSERT_EQ(run_cli({"synth", "-o", path("ds"), "--points", "300", "--lines", "300", "--regions", "80", "--tables",
                     "9", "--extent", "6000", "--seed", "7"})
                .code,
            0);
  const CliRun stats = run_cli({"stats", path("ds"), "-o", path("stats.json")});
  ASSERT_EQ(stats.code, 0);
  EXPECT_NE(stats.out.find("entities 680"), std::string::npos) << stats.out;
  EXPECT_TRUE(fs::exists(path("stats.json.manifest.json")));

  const CliRun build = run_cli({"build-kb", path("ds"), "-o", path("kb"), "--timestamp", "2024-01-01T00:00:00Z"});
  ASSERT_EQ(build.code, 0) << build.err;
  EXPECT_NE(build.out.find("retained"), std::string::npos);
  const auto manifest = nlohmann::json::parse(io::read_file(path("kb.manifest.json")));
  EXPECT_EQ(manifest.at("command"), "build-kb");
  EXPECT_GT(manifest.at("items").get<std::size_t>(), 0u);

  for (const char* name : {"a.csv", "b.csv"}) {
    const CliRun gen = run_cli({"generate", path("ds"), path("kb"), "-o", path(name), "--seed", "42"});
    ASSERT_EQ(gen.code, 0) << gen.err;
    EXPECT_NE(gen.out.find("generated 100 of 100 pairs"), std::string::npos) << gen.out;
  }
  EXPECT_EQ(io::read_file(path("a.csv")), io::read_file(path("b.csv")));

  const CliRun val = run_cli({"validate", path("ds"), path("a.csv"), "--min-validity", "95"});
  EXPECT_EQ(val.code, 0) << val.err;
  EXPECT_NE(val.out.find("validity 100/100"), std::string::npos) << val.out;
  EXPECT_TRUE(fs::exists(path("a.csv.validation.csv")));
}

TEST_F(CliDir, ValidityBelowMinimumExitsThree) {
  ASSERT_EQ(run_cli({"synth", "-o", path("ds"), "--points", "20", "--seed", "1"}).code, 0);
  io::write_file_atomic(dir_ / "c.csv",
                        "id,query_type,template_id,nl,exe,provenance\n"
                        "q0001,range,t,x,query Nope feed consume,er:1:2:inside\n");
  const CliRun r = run_cli({"validate", path("ds"), path("c.csv"), "--min-validity", "50"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("validity 0/1"), std::string::npos) << r.out;
}

TEST_F(CliDir, UnknownConfigKeyExitsOne) {
  ASSERT_EQ(run_cli({"synth", "-o", path("ds"), "--points", "20", "--seed", "1"}).code, 0);
  io::write_file_atomic(dir_ / "bad.toml", "[extraction]\nradius = 3\n");
  const CliRun r = run_cli({"build-kb", path("ds"), "-o", path("kb"), "--config", path("bad.toml")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("unknown config key 'radius'"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace sscc::cli
