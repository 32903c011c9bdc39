#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fjlt/dataset.hpp"
#include "fjlt/transform.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("fjlt_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) const {
        const std::string cmd = std::string(FJLT_CLI_PATH) + " " + args + " > " +
                                (dir_ / "stdout.txt").string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenIsDeterministic) {
    ASSERT_EQ(run("gen --kind sparse --n 16 --count 5 --sparsity 2 --seed 3 --out " + path("a.bin")), 0);
    ASSERT_EQ(run("gen --kind sparse --n 16 --count 5 --sparsity 2 --seed 3 --out " + path("b.bin")), 0);
    EXPECT_EQ(slurp(path("a.bin")), slurp(path("b.bin")));
    const auto data = fjlt::load_dataset(path("a.bin"));
    EXPECT_EQ(data.n(), 16u);
    EXPECT_EQ(data.count(), 5u);
}

TEST_F(Cli, PadThenEmbedMatchesLibrary) {
    ASSERT_EQ(run("gen --n 12 --count 4 --seed 1 --format csv --out " + path("raw.csv")), 0);
    ASSERT_EQ(run("pad --in " + path("raw.csv") + " --out " + path("pad.bin")), 0);
    ASSERT_EQ(run("embed --in " + path("pad.bin") + " --k 4 --seed 9 --out " + path("emb.bin") +
                  " --save-transform " + path("t.fjlt")),
              0);
    const auto padded = fjlt::load_dataset(path("pad.bin"));
    ASSERT_EQ(padded.n(), 16u);
    const auto embedded = fjlt::load_dataset(path("emb.bin"));
    ASSERT_EQ(embedded.n(), 4u);
    const auto t = fjlt::sample_transform(16, 4, 9);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto expected = t.apply(padded.row(i));
        EXPECT_TRUE(std::ranges::equal(expected, embedded.row(i)));
    }
    std::ifstream tf(path("t.fjlt"), std::ios::binary);
    EXPECT_EQ(fjlt::read_transform(tf), t);
    EXPECT_NE(slurp(path("emb.bin.meta")).find("k = 4"), std::string::npos);
}

TEST_F(Cli, VerifyReportReproducesFromHeader) {
    ASSERT_EQ(run("verify rip --n 16 --k 8 --r 2 --seed 3 --out " + path("r1.txt")), 0);
    ASSERT_EQ(run("verify --from-report " + path("r1.txt") + " --out " + path("r2.txt")), 0);
    const std::string a = slurp(path("r1.txt"));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(path("r2.txt")));
    EXPECT_NE(a.find("seed = 3"), std::string::npos);
    EXPECT_NE(a.find("validation = pass"), std::string::npos);
}

TEST_F(Cli, EmbedRejectsNonPowerOfTwo) {
    ASSERT_EQ(run("gen --n 12 --count 2 --seed 1 --out " + path("raw.bin")), 0);
    EXPECT_EQ(run("embed --in " + path("raw.bin") + " --k 4 --out " + path("e.bin")), 2);
    EXPECT_NE(slurp(path("stdout.txt")).find("pad"), std::string::npos);
}

TEST_F(Cli, BadArgumentsExitTwo) {
    EXPECT_EQ(run("gen --kind nope --n 8 --count 1 --out " + path("x.bin")), 2);
    EXPECT_EQ(run("verify rip --n 12 --k 4 --out " + path("x.txt")), 2);
    EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(Cli, BenchReportIsReproducibleApartFromTimings) {
    const std::string args = "bench --n-list 256,512 --repeats 1 --seed 4 --out ";
    ASSERT_EQ(run(args + path("b1.txt")), 0);
    ASSERT_EQ(run(args + path("b2.txt")), 0);
    const auto strip = [](const std::string& text) {
        std::istringstream in(text);
        std::string line, kept;
        while (std::getline(in, line)) {
            const auto key = line.substr(0, line.find(' '));
            const bool timing = key.ends_with("_ns") || key.ends_with("_speedup") ||
                                key.ends_with("_ratio_per_doubling");
            if (!timing) kept += line + "\n";
        }
        return kept;
    };
    const std::string a = slurp(path("b1.txt"));
    EXPECT_NE(a.find("n_list = 256,512"), std::string::npos);
    EXPECT_NE(a.find("n512.k = 128"), std::string::npos);
    EXPECT_EQ(strip(a), strip(slurp(path("b2.txt"))));
}
