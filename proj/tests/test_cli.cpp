#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fadingsched/analysis.hpp"
#include "fadingsched/cli.hpp"

using namespace fadingsched;
using cli::ExitCode;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string log;
};

Outcome invoke(const std::vector<std::string>& args) {
    std::ostringstream out, log;
    const int code = cli::main_entry(args, out, log);
    return {code, out.str(), log.str()};
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "fadingsched_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("parse scaling config") {
    auto cfg = cli::parse_config({"scaling", "--dist", "pareto:alpha=3", "--n", "256,1024,4096", "--trials", "50",
                                  "--seed", "7"});
    CHECK(cfg.subcommand == cli::Subcommand::Scaling);
    CHECK(cfg.n_list == std::vector<std::size_t>{256, 1024, 4096});
    CHECK(cfg.trials == 50);
    CHECK(cfg.master_seed == 7);
    CHECK(cfg.output_format == cli::OutputFormat::Csv);

    auto def = cli::parse_config({"schedule"});
    CHECK(def.beta == 1.0);
    CHECK(def.noise == 0.1);
    CHECK(def.master_seed == 42);
    CHECK(def.heuristic.mode == scheduler::Mode::AdaptivePrefix);
}

TEST_CASE("configuration errors") {
    try {
        cli::parse_config({"schedule", "--dist", "pareto:alpha=1.5"});
        FAIL("accepted alpha = 1.5");
    } catch (const cli::ConfigError& e) {
        CHECK(std::string(e.what()).find("alpha must be > 2") != std::string::npos);
    }
    try {
        cli::parse_config({"scaling", "--n", "64,32", "--trials", "5", "--beta", "-1"});
        FAIL("accepted three bad fields");
    } catch (const cli::ConfigError& e) {
        CHECK(e.problems().size() == 3);
    }
    auto empty = invoke({});
    CHECK(empty.code == ExitCode::kUsage);
    CHECK(empty.log.find("solve") != std::string::npos);
    CHECK(invoke({"bogus"}).code == ExitCode::kUsage);
    CHECK(invoke({"schedule", "--mode", "fast"}).code == ExitCode::kInvalidConfig);
    CHECK(invoke({"solve", "--wmax", "many"}).code == ExitCode::kInvalidConfig);
    auto help = invoke({"scaling", "--help"});
    CHECK(help.code == ExitCode::kOk);
    CHECK(help.out.find("--fit-out") != std::string::npos);
}

TEST_CASE("schedule output is deterministic") {
    const std::vector<std::string> args{"schedule", "--mode", "adaptive", "--dist", "gamma:m=1,omega=1", "--n", "1024",
                                        "--seed", "1"};
    auto a = invoke(args);
    auto b = invoke(args);
    REQUIRE(a.code == ExitCode::kOk);
    CHECK(a.out == b.out);
    auto j = nlohmann::json::parse(a.out);
    for (auto key : {"n", "mode", "t_target", "T_realized", "all_succeeded"}) CHECK(j.contains(key));
    CHECK(j["n"] == 1024);
    CHECK(j["all_succeeded"] == (j["t_target"] == j["T_realized"]));
}

TEST_CASE("solve subcommand") {
    auto guard = invoke({"solve", "--solver", "exhaustive", "--n", "25"});
    CHECK(guard.code == ExitCode::kGuardRefused);
    CHECK(guard.log.find("2^25") != std::string::npos);

    auto ex = invoke({"solve", "--solver", "exhaustive", "--n", "10", "--seed", "3"});
    auto wb = invoke({"solve", "--solver", "weight-bounded", "--wmax", "10", "--n", "10", "--seed", "3"});
    REQUIRE(ex.code == ExitCode::kOk);
    REQUIRE(wb.code == ExitCode::kOk);
    auto je = nlohmann::json::parse(ex.out);
    auto jw = nlohmann::json::parse(wb.out);
    CHECK(je["explored"] == 1024);
    CHECK(je["best_T"] == jw["best_T"]);

    auto lg = nlohmann::json::parse(invoke({"solve", "--solver", "weight-bounded", "--n", "20"}).out);
    CHECK(lg["w_max"] == 5);
    CHECK(lg["explored"] == 21700);
}

TEST_CASE("gendata feeds solve") {
    const auto path = scratch("instance.csv");
    REQUIRE(invoke({"gendata", "--n", "9", "--dist", "lognormal:mu=0,sigma=1", "--seed", "5", "--out", path.string()})
                .code == ExitCode::kOk);
    auto from_file = invoke({"solve", "--instance", path.string()});
    auto generated = invoke({"solve", "--n", "9", "--dist", "lognormal:mu=0,sigma=1", "--seed", "5"});
    REQUIRE(from_file.code == ExitCode::kOk);
    CHECK(from_file.out == generated.out);
    CHECK(invoke({"solve", "--instance", scratch("missing.csv").string()}).code == ExitCode::kIo);
}

TEST_CASE("scaling csv and fit files") {
    const auto table = scratch("table.csv");
    const auto fit = scratch("fit.json");
    auto r = invoke({"scaling", "--dist", "pareto:alpha=3", "--n", "64,128,256,512,1024", "--trials", "30", "--out",
                     table.string(), "--fit-out", fit.string()});
    REQUIRE(r.code == ExitCode::kOk);
    std::ifstream in(table);
    auto rows = analysis::read_scaling_csv(in);
    REQUIRE(rows.size() == 5);
    for (const auto& row : rows) {
        CHECK(row.trials == 30);
        CHECK(row.mean_delay == doctest::Approx(row.n / row.mean_T));
    }
    auto j = nlohmann::json::parse(slurp(fit));
    for (auto key : {"model", "params", "r_squared", "expected_form"}) CHECK(j.contains(key));
    CHECK(j["model"] == "power_law");

    // no stray temp files next to the outputs
    for (const auto& e : std::filesystem::directory_iterator(table.parent_path()))
        CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("results do not depend on the worker count") {
    const std::vector<std::string> args{"scaling", "--dist", "gamma:m=1,omega=1", "--n", "100,200", "--trials", "40"};
    ::setenv("FADING_SCHED_THREADS", "1", 1);
    auto one = invoke(args);
    ::setenv("FADING_SCHED_THREADS", "4", 1);
    auto four = invoke(args);
    ::unsetenv("FADING_SCHED_THREADS");
    REQUIRE(one.code == ExitCode::kOk);
    CHECK(one.out == four.out);
}

TEST_CASE("unwritable output maps to the io code") {
    auto r = invoke({"gendata", "--n", "3", "--out", "/nonexistent-dir/x.csv"});
    CHECK(r.code == ExitCode::kIo);
}

TEST_CASE("validate-lemmas report") {
    auto r = invoke({"validate-lemmas", "--os-reps", "100", "--ldp-reps", "4000"});
    REQUIRE(r.code == ExitCode::kOk);
    auto j = nlohmann::json::parse(r.out);
    for (auto key : {"intermediate_order_statistics", "normalizer_ratio", "ldp_light_tail", "ldp_heavy_tail"})
        CHECK(j.contains(key));
    CHECK(invoke({"validate-lemmas", "--os-reps", "10"}).code == ExitCode::kInvalidConfig);
}
