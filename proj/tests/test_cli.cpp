#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "fairmix-cli-tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

RunResult run_cli(const std::string& args) {
    const fs::path dir = work_dir();
    const fs::path so = dir / "stdout.txt";
    const fs::path se = dir / "stderr.txt";
    const std::string cmd = std::string(FAIRMIX_CLI_PATH) + " " + args + " > " + so.string() +
                            " 2> " + se.string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(so);
    r.err = slurp(se);
    return r;
}

// small two-group table: one continuous sensitive column, two plain predictors
std::string numeric_fixture(const fs::path& dir) {
    std::mt19937 gen(12345);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::ostringstream csv;
    csv << "y,mix,z1,z2\n";
    char buf[160];
    for (int i = 0; i < 260; ++i) {
        const bool g = ud(gen) < 0.45;
        const double mix = (g ? 3.2 : 0.0) + nd(gen);
        const double z1 = nd(gen), z2 = nd(gen);
        const double y = 1.0 + (g ? 1.4 : -0.2) + 0.8 * z1 - 0.5 * z2 + 0.4 * nd(gen);
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f\n", y, mix, z1, z2);
        csv << buf;
    }
    const fs::path p = dir / "numeric.csv";
    spit(p, csv.str());
    const fs::path sp = dir / "numeric-schema.json";
    spit(sp, std::string("{\"path\":\"") + p.string() +
                 "\",\"response\":\"y\",\"sensitive_continuous\":[\"mix\"],"
                 "\"other\":[\"z1\",\"z2\"],\"split\":0.7,\"seed\":3}");
    return sp.string();
}

// census-style table with spaces after commas and categorical sensitive columns
std::string census_fixture(const fs::path& dir) {
    std::mt19937 gen(777);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::ostringstream csv;
    csv << "age, group_a, group_b, hours, income\n";
    for (int i = 0; i < 320; ++i) {
        const bool g = ud(gen) < 0.5;
        const char* ga = ud(gen) < (g ? 0.85 : 0.25) ? "Alpha" : "Beta";
        const char* gb = ud(gen) < (g ? 0.7 : 0.3) ? "North" : "South";
        const int age = 22 + static_cast<int>(40 * ud(gen));
        const int hours = 20 + static_cast<int>(30 * ud(gen));
        const double eta = -0.8 + (g ? 1.6 : 0.0) + 0.02 * (hours - 35) + 0.25 * nd(gen);
        const int income = ud(gen) < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
        csv << age << ", " << ga << ", " << gb << ", " << hours << ", " << income << "\n";
    }
    const fs::path p = dir / "census.csv";
    spit(p, csv.str());
    const fs::path sp = dir / "census-schema.json";
    spit(sp, std::string("{\"path\":\"") + p.string() +
                 "\",\"response\":\"income\",\"sensitive_categorical\":[\"group_a\",\"group_b\"],"
                 "\"other\":[\"age\",\"hours\"],\"split\":0.65,\"seed\":11}");
    return sp.string();
}

}  // namespace

TEST_CASE("threshold calculator prints and writes its report") {
    const fs::path dir = work_dir() / "theory";
    fs::create_directories(dir);
    const RunResult r = run_cli("theory separation-threshold --mixing 0.2,0.3,0.5 --alpha 0.05 "
                                "--out " + dir.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("4.33204576") != std::string::npos);
    const json j = json::parse(slurp(dir / "theory-separation-threshold.json"));
    CHECK(j["calculator"] == "separation-threshold");
    CHECK(std::abs(j["values"]["threshold"].get<double>() - 4.3320457643318918) < 1e-9);
}

TEST_CASE("usage errors exit with the schema code") {
    CHECK(run_cli("theory separation-threshold --no-such-flag 1").code == 2);
    CHECK(run_cli("fit-mixture").code == 2);  // --schema is required
    const fs::path dir = work_dir();
    spit(dir / "broken-schema.json", "{\"path\":\"x.csv\"}");
    CHECK(run_cli("fit-mixture --schema " + (dir / "broken-schema.json").string()).code == 2);
}

TEST_CASE("numeric breakdowns exit with the numeric code") {
    CHECK(run_cli("theory separation-threshold --mixing 0.5,-0.5 --alpha 0.05").code == 3);
    CHECK(run_cli("theory gaussian-accuracy-uni --means 0,1 --mixing 0.2,0.3,0.5").code == 3);
}

TEST_CASE("mixture fitting writes report and posterior tables") {
    const fs::path dir = work_dir() / "mix";
    fs::create_directories(dir);
    const std::string schema = numeric_fixture(work_dir());
    const RunResult r =
        run_cli("fit-mixture --schema " + schema + " --K 2 --out " + dir.string());
    CHECK(r.code == 0);
    const json j = json::parse(slurp(dir / "mixture.json"));
    CHECK(j["task"] == "mixture");
    CHECK(j["family"] == "gaussian");
    CHECK(j["converged"] == true);
    CHECK(j["mixing"].size() == 2);

    const std::string post = slurp(dir / "posterior-train.csv");
    CHECK(post.rfind("g1,g2\n", 0) == 0);
    CHECK(!slurp(dir / "posterior-test.csv").empty());
}

TEST_CASE("starved fitting budget exits with the convergence code yet reports") {
    const fs::path dir = work_dir() / "noconv";
    fs::create_directories(dir);
    const std::string schema = numeric_fixture(work_dir());
    const RunResult r = run_cli("fit-mixture --schema " + schema +
                                " --K 2 --em-max-iter 2 --restarts 1 --out " + dir.string());
    CHECK(r.code == 4);
    const json j = json::parse(slurp(dir / "mixture.json"));
    CHECK(j["converged"] == false);
}

TEST_CASE("config file sets defaults and flags override it") {
    const fs::path dir = work_dir() / "cfg";
    fs::create_directories(dir);
    const std::string schema = numeric_fixture(work_dir());
    spit(dir / "run.json", "{\"epsilon\": 0.25, \"K\": 2}");

    RunResult r = run_cli("fit-regression --schema " + schema + " --config " +
                          (dir / "run.json").string() + " --out " + dir.string());
    CHECK(r.code == 0);
    json j = json::parse(slurp(dir / "report-eps0.25.json"));
    CHECK(j["tuning"]["epsilon"] == 0.25);
    CHECK(j["task"] == "regression");

    r = run_cli("fit-regression --schema " + schema + " --config " +
                (dir / "run.json").string() + " --epsilon 0.5 --out " + dir.string());
    CHECK(r.code == 0);
    j = json::parse(slurp(dir / "report-eps0.5.json"));
    CHECK(j["tuning"]["epsilon"] == 0.5);

    // malformed configuration is a schema error
    spit(dir / "bad.json", "{\"epsilon\": {\"nested\": true}}");
    r = run_cli("fit-regression --schema " + schema + " --config " +
                (dir / "bad.json").string() + " --out " + dir.string());
    CHECK(r.code == 2);
}

TEST_CASE("classifier grid writes one report per penalty weight") {
    const fs::path dir = work_dir() / "grid";
    fs::create_directories(dir);
    const std::string schema = numeric_fixture(work_dir());
    const RunResult r = run_cli("fit-classifier --schema " + schema +
                                " --K 2 --lambda 0,1 --newton --out " + dir.string());
    CHECK(r.code == 0);
    for (const char* name : {"report-lambda0.json", "report-lambda1.json"}) {
        const json j = json::parse(slurp(dir / name));
        CHECK(j["task"] == "classification");
        CHECK(j["diagnostics"]["test"].contains("acc"));
    }
    CHECK(fs::exists(dir / "report-lambda0-predictions.csv"));
}

TEST_CASE("census-style table runs end to end through the classifier") {
    const fs::path dir = work_dir() / "census";
    fs::create_directories(dir);
    const std::string schema = census_fixture(work_dir());
    const RunResult r = run_cli("fit-classifier --schema " + schema + " --K 2 --newton --out " +
                                dir.string());
    CHECK(r.code == 0);
    const json j = json::parse(slurp(dir / "report-lambda0.json"));
    const json& test = j["diagnostics"]["test"];
    CHECK(test["acc"].is_number());
    CHECK(test["acc"].get<double>() > 0.5);
    CHECK(test["delta_eo"].is_number());
    CHECK(test["delta_dp"].is_number());
    CHECK(test["md"].is_number());
}

TEST_CASE("trade-off sweep writes curve files") {
    const fs::path dir = work_dir() / "trade";
    fs::create_directories(dir);
    const std::string schema = numeric_fixture(work_dir());
    const RunResult r = run_cli("tradeoff --schema " + schema +
                                " --task regression --grid 0,0.5,1 --out " + dir.string());
    CHECK(r.code == 0);
    const std::string csv = slurp(dir / "tradeoff.csv");
    CHECK(csv.rfind("tuning,accuracy,fairness\n", 0) == 0);
    const json j = json::parse(slurp(dir / "tradeoff.json"));
    CHECK(j["points"].size() == 3);
}

TEST_CASE("simulation sweeps reproduce byte for byte") {
    const fs::path d1 = work_dir() / "sim1";
    const fs::path d2 = work_dir() / "sim2";
    fs::create_directories(d1);
    fs::create_directories(d2);
    const std::string args = "simulate categorical replicates=2 --n 2000 --grid 0.3,0.6 --seed 5";
    CHECK(run_cli(args + " --out " + d1.string()).code == 0);
    CHECK(run_cli(args + " --out " + d2.string()).code == 0);
    CHECK(slurp(d1 / "categorical-curve.csv") == slurp(d2 / "categorical-curve.csv"));
    CHECK(slurp(d1 / "categorical-manifest.json") == slurp(d2 / "categorical-manifest.json"));
    CHECK(!slurp(d1 / "categorical-curve.csv").empty());
}

TEST_CASE("reference oracle subcommand writes its report") {
    const fs::path dir = work_dir() / "oracle";
    fs::create_directories(dir);
    const RunResult r = run_cli("verify threshold-accuracy --means 0,3 --mixing 0.7,0.3 --out " +
                                dir.string());
    CHECK(r.code == 0);
    const json j = json::parse(slurp(dir / "oracle-threshold-accuracy.json"));
    CHECK(std::abs(j["value"].get<double>() - 0.94035418899387103) < 1e-9);
    CHECK(j["se"] == 0.0);
    CHECK(j["inputs_hash"].is_string());
}

TEST_CASE("screening subcommand ranks candidate blocks") {
    const fs::path dir = work_dir() / "screen";
    fs::create_directories(dir);
    const std::string schema = numeric_fixture(work_dir());
    const RunResult r = run_cli("screen --schema " + schema +
                                " --task regression --candidates \"0;1;2\" --out " + dir.string());
    CHECK(r.code == 0);
    const json j = json::parse(slurp(dir / "screening.json"));
    CHECK(j["results"].size() == 3);
    int chosen = 0;
    for (const auto& res : j["results"]) chosen += res["chosen"].get<bool>() ? 1 : 0;
    CHECK(chosen == 1);
}
