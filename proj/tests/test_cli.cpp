#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("pepsmqc_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) const {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    int run(const std::string& args) const {
        const std::string cmd = std::string(PEPSMQC_CLI) + " " + args + " >" + (dir_ / "stdout").string() + " 2>" +
                                (dir_ / "stderr").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    nlohmann::json output() const {
        std::ifstream in(dir_ / "stdout");
        return nlohmann::json::parse(in);
    }

    fs::path dir_;
};

const char* kIdentity = R"({"wires":1,"gates":[{"type":"su2","wire":0,"matrix":[[1,0],[0,1]]}]})";
const char* kCz = R"({"wires":2,"gates":[{"type":"cz","wires":[0,1]}]})";

}  // namespace

TEST_F(Cli, CompileAndSimulate) {
    const auto circuit = write("c.json", kIdentity);
    const auto pattern = dir_ / "p.json";
    ASSERT_EQ(run("compile " + circuit.string() + " -o " + pattern.string()), 0);
    EXPECT_EQ(run("simulate " + pattern.string()), 0);
    const auto report = output();
    EXPECT_EQ(report.at("schema"), "peps-mqc/1");
    EXPECT_EQ(report.at("summary").at("branches"), 4);
    EXPECT_EQ(report.at("inputs").at(0).at("git_blob_sha1").get<std::string>().size(), 40U);
    EXPECT_EQ(run("simulate " + pattern.string() + " --max-branches 2"), 3);
}

TEST_F(Cli, CzPatternHasThreeVerticalSites) {
    const auto circuit = write("c.json", kCz);
    ASSERT_EQ(run("compile " + circuit.string()), 0);
    const auto steps = output().at("pattern").at("steps");
    int entanglers = 0;
    for (const auto& s : steps) {
        if (s.at("kind") == "entangler") {
            ++entanglers;
            EXPECT_EQ(s.at("sites").size(), 3U);
        }
    }
    EXPECT_EQ(entanglers, 1);
}

TEST_F(Cli, SampleIsReproducible) {
    const auto circuit = write("c.json", kCz);
    const auto pattern = dir_ / "p.json";
    ASSERT_EQ(run("compile " + circuit.string() + " -o " + pattern.string()), 0);
    ASSERT_EQ(run("simulate " + pattern.string() + " --sample 5 --seed 9"), 0);
    const auto a = output().at("branches");
    ASSERT_EQ(run("simulate " + pattern.string() + " --sample 5 --seed 9"), 0);
    EXPECT_EQ(output().at("branches"), a);
}

TEST_F(Cli, InputErrors) {
    EXPECT_EQ(run("compile " + write("bad.json", "{bad").string()), 2);
    EXPECT_EQ(run("compile " + write("bad2.json", R"({"wires":1,"gates":[]})").string()), 2);
    EXPECT_EQ(run("compile " + (dir_ / "missing.json").string()), 2);
    EXPECT_EQ(run("crossing --gamma 7"), 2);
    EXPECT_EQ(run("hamiltonian verify --listings " + dir_.string()), 2);
    EXPECT_EQ(run("no-such-command"), 2);
    EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, CrossingAndHamiltonianAndOracle) {
    ASSERT_EQ(run("crossing --gamma 1.5707963267948966 --verify 20"), 0);
    const auto c = output();
    EXPECT_EQ(c.at("templates").at(0), "Z(θ1)Σ(i)⊗Z(θ2)Σ(j)");
    EXPECT_EQ(c.at("verification").at("fail"), 0);
    EXPECT_EQ(c.at("config").at("gamma"), 1.5707963267948966);

    ASSERT_EQ(run("crossing"), 0);
    EXPECT_EQ(output().at("templates").at(0), "U(2)⊗U(2)");

    ASSERT_EQ(run("hamiltonian verify"), 0);
    EXPECT_EQ(output().at("passed"), "7/7");

    const auto circuit = write("c.json", kCz);
    ASSERT_EQ(run("oracle validate --circuit " + circuit.string() + " --max-sites 10"), 0);
    EXPECT_TRUE(output().at("passed").get<bool>());
    EXPECT_EQ(run("oracle validate --circuit " + circuit.string() + " --max-sites 4"), 3);

    ASSERT_EQ(run("dump-model"), 0);
    EXPECT_EQ(output().at("schema"), "peps-mqc/1");
}
