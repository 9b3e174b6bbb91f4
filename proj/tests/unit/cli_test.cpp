#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(CEURL_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ceurl-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("teleport"), 2);
  EXPECT_EQ(run("run"), 2);
  EXPECT_EQ(run("run --threads 0 --config x.ini"), 2);
  EXPECT_EQ(run("emit-plot --metric m"), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, BadConfigExitsTwoAndWritesNothing) {
  const fs::path dir = fresh_dir("bad");
  std::ofstream(dir / "bad.ini") << "[env]\nfamily = appendix-a1\ncolour = blue\n";
  EXPECT_EQ(run("run --config " + (dir / "bad.ini").string() + " --out-dir " + (dir / "runs").string()), 2);
  EXPECT_FALSE(fs::exists(dir / "runs"));
  EXPECT_EQ(run("run --config " + (dir / "missing.ini").string() + " --out-dir " + (dir / "runs").string()), 2);
}

TEST(Cli, PipelineAndPlot) {
  const fs::path dir = fresh_dir("pipeline");
  const std::string cfg = std::string(CEURL_CONFIG_DIR) + "/smoke.ini";
  ASSERT_EQ(run("pretrain --config " + cfg + " --out-dir " + dir.string()), 0);
  ASSERT_EQ(run("run --config " + cfg + " --out-dir " + dir.string() + " --threads 2"), 0);
  ASSERT_EQ(run("run --seed 2 --config " + cfg + " --out-dir " + dir.string()), 0);
  std::string runs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) runs += (runs.empty() ? "" : ",") + entry.path().filename().string();
  EXPECT_NE(runs.find(','), std::string::npos);
  EXPECT_EQ(run("emit-plot --out-dir " + dir.string() + " --runs " + runs +
                " --metric pretrain/ce_reward --output " + (dir / "ce.csv").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "ce.csv"));
  EXPECT_EQ(run("emit-plot --out-dir " + dir.string() + " --runs nosuchrun --metric m --output " +
                (dir / "x.csv").string()),
            1);
}

TEST(Cli, VerificationSuitesPass) {
  const fs::path dir = fresh_dir("verify");
  EXPECT_EQ(run("verify-geometry --out-dir " + dir.string()), 0);
  EXPECT_EQ(run("verify-skills --out-dir " + dir.string()), 0);
  EXPECT_EQ(run("verify-theorem --threads 2 --out-dir " + dir.string()), 0);
  EXPECT_EQ(run("verify --log " + (dir / "all.jsonl").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "verify.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "all.jsonl"));
}
