// Runs the command-line binary and checks exit codes and outputs.
#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

const std::string kSrc = GETIN_SOURCE_DIR;

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(GETIN_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp(const std::string& name) {
    const auto d = std::filesystem::temp_directory_path() / "getin-cli-tests";
    std::filesystem::create_directories(d);
    return (d / name).string();
}

}  // namespace

TEST(Cli, ValidateShippedContent) {
    const auto r = run("validate " + kSrc + "/content/scenarios/*.scenario --world " + kSrc + "/content/world.json");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("7/7 skills covered"), std::string::npos) << r.out;
}

TEST(Cli, ValidateBrokenFileExitsOne) {
    const auto bad = tmp("bad.scenario");
    std::ofstream(bad) << R"({"id":"x","title":"x","skills":[],"entry":"a","terminals":[],"steps":{}})";
    const auto r = run("validate " + bad);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("defect:"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("report --form mid --out -").code, 2);
    EXPECT_EQ(run("simulate --out -").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, SimulateReproducesGoldens) {
    for (const auto* id : {"phishing", "sqli", "exploit", "badusb"}) {
        const auto out = tmp(std::string(id) + ".txt");
        const auto r = run("simulate --script " + kSrc + "/content/scripts/" + id + ".script --out " + out);
        EXPECT_EQ(r.code, 0) << id;
        EXPECT_EQ(slurp(out), slurp(kSrc + "/content/golden/" + id + ".txt")) << id;
    }
    EXPECT_EQ(run("simulate --script /nonexistent --out -").code, 1);
}

TEST(Cli, PlayFromStdin) {
    const auto script = tmp("play.txt");
    std::ofstream(script) << "1\nlogin \"' OR '1'='1\" \"' OR '1'='1\"\n1\ncat /data/customers.csv\n1\n2\n";
    const auto r = run("play --scenario sqli < " + script);
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("Scenario complete."), std::string::npos);
    std::ofstream(script) << "1\n:quit\n";
    EXPECT_EQ(run("play --scenario sqli < " + script).code, 1);
    EXPECT_EQ(run("play --scenario nope < " + script).code, 1);
}

TEST(Cli, ReportExports) {
    const auto store = tmp("responses.jsonl");
    std::ofstream(store, std::ios::trunc)
        << R"({"token":"a","form_id":"pre","answers":{"phishing-mail":"yes"},"submitted_at":"2024-01-01T00:00:00Z"})" "\n"
        << R"({"token":"a","form_id":"post","answers":{"phishing-rollout":4},"submitted_at":"2024-01-01T00:10:00Z"})" "\n";
    auto r = run("report --form pre --store " + store + " --out -");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "question_id,answer_value,count\nphishing-mail,yes,1\n");
    r = run("report --form post --paired --store " + store + " --out -");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\na,"), std::string::npos) << r.out;
    EXPECT_EQ(run("report --form pre --store /nonexistent/r.jsonl --out -").code, 1);
    EXPECT_EQ(run("report --form pre --paired --responses --store " + store + " --out -").code, 2);
}
