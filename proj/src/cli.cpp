#include "fadingsched/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "fadingsched/analysis.hpp"
#include "fadingsched/dist.hpp"
#include "fadingsched/network.hpp"
#include "fadingsched/solvers.hpp"

namespace fadingsched::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string s;
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (k) s += sep;
        s += items[k];
    }
    return s;
}

std::vector<std::size_t> parse_n_list(const std::string& text, std::vector<std::string>& problems) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t pos = 0;
            if (!token.empty() && token[0] == '-') throw std::invalid_argument("negative");
            const auto v = std::stoull(token, &pos);
            if (pos != token.size()) throw std::invalid_argument("trailing");
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            problems.push_back("--n: '" + token + "' is not a non-negative integer");
        }
    }
    if (out.empty() && problems.empty()) problems.push_back("--n: at least one value is required");
    return out;
}

struct RawOptions {
    std::string dist = "gamma:m=1,omega=1";
    std::string n = "64";
    long long trials = 100;
    double beta = 1.0;
    double noise = 0.1;
    std::uint64_t seed = 42;
    std::string solver = "exhaustive";
    std::string wmax = "log2n";
    long long n_guard = 24;
    std::string instance;
    std::string mode = "adaptive";
    double epsilon = 0.1;
    double delta = 0.05;
    long long t = 0;
    long long os_reps = 2000;
    long long ldp_reps = 1000000;
    std::string out;
    std::string fit_out;
};

void add_common(CLI::App* sub, RawOptions& o, bool with_dist = true) {
    if (with_dist) sub->add_option("--dist", o.dist, "Channel power law, e.g. gamma:m=2,omega=1, weibull:k=0.4,lambda=1, pareto:alpha=3, lognormal:mu=0,sigma=1")->capture_default_str();
    sub->add_option("--beta", o.beta, "SINR threshold")->capture_default_str();
    sub->add_option("--n0", o.noise, "Noise power")->capture_default_str();
    sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    sub->add_option("--out", o.out, "Output file (written atomically); stdout when omitted");
}

Json activation_json(const network::ActivationVector& x) { return x.to_string(); }

void emit(const RunConfig& cfg, const std::string& contents, std::ostream& out) {
    if (cfg.output_path.empty()) {
        out << contents;
        out.flush();
        return;
    }
    write_atomically(cfg.output_path, contents);
}

std::uint64_t instance_seed(const RunConfig& cfg, std::size_t n) { return child_seed(cfg.master_seed, n, 0); }

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    network::ModelParams p{cfg.beta, cfg.noise};
    std::optional<network::ChannelMatrix> matrix;
    if (!cfg.instance_path.empty()) {
        std::ifstream in(cfg.instance_path);
        if (!in) {
            log << "error: cannot open instance file " << cfg.instance_path << '\n';
            return kIo;
        }
        auto loaded = network::read_instance_csv(in);
        p = loaded.params;
        matrix.emplace(std::move(loaded.matrix));
    }
    const std::size_t n = matrix ? matrix->size() : cfg.n_list.front();
    if (cfg.solver == SolverKind::Exhaustive && n > cfg.n_guard) {
        log << "error: exhaustive search over n = " << n << " needs 2^" << n << " subsets; guard is n <= "
            << cfg.n_guard << '\n';
        return kGuardRefused;
    }
    if (cfg.solver == SolverKind::WeightBounded && n > 63) {
        log << "error: weight-bounded search supports at most 63 pairs\n";
        return kGuardRefused;
    }
    if (!matrix) {
        if (n > network::kDenseLimit) {
            log << "error: dense instance with n = " << n << " exceeds " << network::kDenseLimit << '\n';
            return kGuardRefused;
        }
        matrix.emplace(network::generate_instance(n, dist::parse_distribution(cfg.dist_spec), instance_seed(cfg, n)));
    }

    solvers::SolveResult r;
    Json j;
    j["n"] = n;
    switch (cfg.solver) {
        case SolverKind::Exhaustive:
            r = solvers::exhaustive_optimal(*matrix, p, cfg.n_guard);
            j["solver"] = "exhaustive";
            break;
        case SolverKind::WeightBounded: {
            const std::size_t w = cfg.w_max.value_or(solvers::log2_weight_bound(n));
            if (w > n) {
                log << "error: --wmax " << w << " exceeds n = " << n << '\n';
                return kInvalidConfig;
            }
            r = solvers::weight_bounded_search(*matrix, p, w);
            j["solver"] = "weight-bounded";
            j["w_max"] = w;
            break;
        }
        case SolverKind::Greedy:
            r = solvers::greedy_insertion(*matrix, p);
            j["solver"] = "greedy";
            break;
    }
    j["best_T"] = r.best_T;
    j["best_x"] = activation_json(r.best_x);
    j["explored"] = r.explored;
    j["dist"] = matrix->origin().dist;
    j["seed"] = matrix->origin().seed;
    emit(cfg, j.dump(2) + "\n", out);
    log << "solve: n=" << n << " best_T=" << r.best_T << " explored=" << r.explored << '\n';
    return kOk;
}

int run_schedule(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const auto d = dist::parse_distribution(cfg.dist_spec);
    const network::ModelParams p{cfg.beta, cfg.noise};
    const std::size_t n = cfg.n_list.front();
    const network::LazyChannel channel(n, d, instance_seed(cfg, n));
    const auto r = scheduler::schedule(channel, d, p, cfg.heuristic);
    Json j;
    j["n"] = n;
    j["mode"] = std::string(scheduler::to_string(cfg.heuristic.mode));
    j["t_target"] = r.t_target;
    j["T_realized"] = r.T_realized;
    j["all_succeeded"] = r.all_succeeded();
    j["dist"] = d.to_string();
    j["seed"] = cfg.master_seed;
    emit(cfg, j.dump(2) + "\n", out);
    log << "schedule: n=" << n << " t_target=" << r.t_target << " T_realized=" << r.T_realized << '\n';
    return kOk;
}

Json fit_json(const analysis::ScalingFit& fit) {
    Json j;
    j["model"] = std::string(analysis::to_string(fit.model.kind));
    j["params"] = {{"slope", fit.fit.slope}, {"intercept", fit.fit.intercept}, {"model_parameter", fit.model.parameter}};
    j["r_squared"] = fit.fit.r_squared;
    j["expected_form"] = fit.expected_form;
    return j;
}

int run_scaling(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const auto d = dist::parse_distribution(cfg.dist_spec);
    const network::ModelParams p{cfg.beta, cfg.noise};
    const auto table = analysis::scaling_experiment(d, p, cfg.heuristic, cfg.n_list, cfg.trials, cfg.master_seed);
    std::ostringstream csv;
    analysis::write_scaling_csv(csv, table);
    if (!cfg.fit_path.empty()) {
        const auto fit = analysis::fit_scaling(table, analysis::predicted_scaling(d));
        write_atomically(cfg.fit_path, fit_json(fit).dump(2) + "\n");
    }
    emit(cfg, csv.str(), out);
    log << "scaling: " << d.to_string() << " rows=" << table.rows.size() << " trials=" << cfg.trials << '\n';
    return kOk;
}

int run_validate_lemmas(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    RandomSource rng(cfg.master_seed);
    Json report;

    const dist::Distribution exponential(dist::GammaParams{1.0, 1.0});
    {
        Json os;
        os["dist"] = exponential.to_string();
        os["reps"] = cfg.os_reps;
        os["rank_rule"] = "ceil(sqrt(n))";
        std::vector<double> ks;
        for (std::size_t n : {1000UL, 10000UL, 100000UL}) {
            const auto e = analysis::intermediate_os_experiment(exponential, n, analysis::sqrt_rank, cfg.os_reps, rng);
            ks.push_back(e.ks_vs_normal);
            os["rows"].push_back({{"n", n},
                                  {"i", e.i},
                                  {"a_n", e.normalizers.a_n},
                                  {"b_n", e.normalizers.b_n},
                                  {"ks_vs_normal", e.ks_vs_normal}});
        }
        const int decreasing = (ks[1] < ks[0]) + (ks[2] < ks[1]) + (ks[2] < ks[0]);
        os["ks_decreasing_pairs"] = decreasing;
        report["intermediate_order_statistics"] = os;
    }
    {
        const std::vector<dist::Distribution> catalog{
            dist::Distribution(dist::GammaParams{1.0, 1.0}), dist::Distribution(dist::GammaParams{4.0, 1.0}),
            dist::Distribution(dist::WeibullParams{2.0, 1.0}), dist::Distribution(dist::WeibullParams{0.4, 1.0}),
            dist::Distribution(dist::ParetoParams{3.0}), dist::Distribution(dist::LogNormalParams{0.0, 1.0})};
        for (const auto& d : catalog) {
            Json row;
            row["dist"] = d.to_string();
            bool increasing = true;
            double prev = -std::numeric_limits<double>::infinity();
            for (std::size_t n : {1000UL, 10000UL, 100000UL, 1000000UL}) {
                const auto f = analysis::falk_normalizers(d, n, analysis::sqrt_rank(n));
                const double ratio = f.a_n / f.b_n;
                row["n"].push_back(n);
                row["a_over_b"].push_back(ratio);
                increasing = increasing && ratio > prev;
                prev = ratio;
            }
            row["increasing"] = increasing;
            report["normalizer_ratio"].push_back(row);
        }
    }
    {
        Json light;
        light["dist"] = exponential.to_string();
        light["K"] = 1.5;
        light["reps"] = cfg.ldp_reps;
        std::vector<double> ts;
        std::vector<double> logs;
        for (std::size_t t : {10UL, 20UL, 40UL, 80UL}) {
            const double prob = analysis::ldp_tail_experiment(exponential, t, 1.5, cfg.ldp_reps, rng);
            light["rows"].push_back({{"t", t}, {"probability", prob}});
            if (prob > 0.0) {
                ts.push_back(static_cast<double>(t));
                logs.push_back(std::log(prob));
            }
        }
        if (ts.size() >= 2) light["log_probability_slope"] = analysis::least_squares(ts, logs).slope;
        report["ldp_light_tail"] = light;
    }
    {
        const dist::Distribution pareto(dist::ParetoParams{2.5});
        Json heavy;
        heavy["dist"] = pareto.to_string();
        heavy["K"] = 2.0;
        for (std::size_t t : {100UL, 1000UL}) {
            const std::size_t reps = t >= 1000 ? std::max<std::size_t>(1000, cfg.ldp_reps / 4) : cfg.ldp_reps;
            const double prob = analysis::ldp_tail_experiment(pareto, t, 2.0, reps, rng);
            const double jump = analysis::single_jump_tail(pareto, t, 2.0);
            heavy["rows"].push_back(
                {{"t", t}, {"reps", reps}, {"probability", prob}, {"single_jump", jump}, {"ratio", prob / jump}});
        }
        report["ldp_heavy_tail"] = heavy;
    }

    emit(cfg, report.dump(2) + "\n", out);
    log << "validate-lemmas: done\n";
    return kOk;
}

int run_gendata(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const std::size_t n = cfg.n_list.front();
    if (n > network::kDenseLimit) {
        log << "error: dense instance with n = " << n << " exceeds " << network::kDenseLimit << '\n';
        return kGuardRefused;
    }
    const auto d = dist::parse_distribution(cfg.dist_spec);
    const auto m = network::generate_instance(n, d, instance_seed(cfg, n));
    std::ostringstream csv;
    network::write_instance_csv(csv, m, {cfg.beta, cfg.noise});
    emit(cfg, csv.str(), out);
    log << "gendata: n=" << n << " dist=" << d.to_string() << '\n';
    return kOk;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration:\n  " + join(problems, "\n  ")), problems_(std::move(problems)) {}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Throughput scaling experiments for one-hop wireless networks with i.i.d. fading", "fading_sched"};
    app.require_subcommand(1);
    RawOptions o;

    auto* solve = app.add_subcommand("solve", "Optimal or baseline activation for one instance");
    add_common(solve, o);
    solve->add_option("--n", o.n, "Number of source-destination pairs")->capture_default_str();
    solve->add_option("--solver", o.solver, "exhaustive | weight-bounded | greedy")->capture_default_str();
    solve->add_option("--wmax", o.wmax, "Weight bound for weight-bounded search: integer or log2n")->capture_default_str();
    solve->add_option("--n-guard", o.n_guard, "Largest n exhaustive search accepts")->capture_default_str();
    solve->add_option("--instance", o.instance, "Instance CSV produced by gendata (overrides --dist/--n/--seed)");

    auto* sched = app.add_subcommand("schedule", "Strongest-direct-links activation on one instance");
    add_common(sched, o);
    sched->add_option("--n", o.n, "Number of source-destination pairs")->capture_default_str();
    sched->add_option("--mode", o.mode, "theorem | adaptive | fixed")->capture_default_str();
    sched->add_option("--epsilon", o.epsilon, "Theorem-mode epsilon in (0,1)")->capture_default_str();
    sched->add_option("--delta", o.delta, "Theorem-mode delta in (0,1)")->capture_default_str();
    sched->add_option("--t", o.t, "Active count for fixed mode");

    auto* scaling = app.add_subcommand("scaling", "Mean throughput versus n over independent trials (CSV)");
    add_common(scaling, o);
    scaling->add_option("--n", o.n, "Comma-separated, strictly increasing n values")->capture_default_str();
    scaling->add_option("--trials", o.trials, "Trials per n (>= 30)")->capture_default_str();
    scaling->add_option("--mode", o.mode, "theorem | adaptive | fixed")->capture_default_str();
    scaling->add_option("--epsilon", o.epsilon, "Theorem-mode epsilon in (0,1)")->capture_default_str();
    scaling->add_option("--delta", o.delta, "Theorem-mode delta in (0,1)")->capture_default_str();
    scaling->add_option("--t", o.t, "Active count for fixed mode");
    scaling->add_option("--fit-out", o.fit_out, "Also write the fitted growth model as JSON");

    auto* lemmas = app.add_subcommand("validate-lemmas", "Order-statistic and large-deviation checks (JSON)");
    lemmas->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    lemmas->add_option("--out", o.out, "Output file (written atomically); stdout when omitted");
    lemmas->add_option("--os-reps", o.os_reps, "Replications per order-statistic experiment")->capture_default_str();
    lemmas->add_option("--ldp-reps", o.ldp_reps, "Replications per large-deviation estimate")->capture_default_str();

    auto* gendata = app.add_subcommand("gendata", "Dump one dense instance as CSV");
    add_common(gendata, o);
    gendata->add_option("--n", o.n, "Number of source-destination pairs")->capture_default_str();

    if (args.empty()) throw UsageError(app.help(), kUsage);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        throw UsageError(subs.empty() ? app.help() : subs.front()->help(), kOk);
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\n\n" + app.help(), kUsage);
    }

    RunConfig cfg;
    std::vector<std::string> problems;
    const CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    if (name == "solve") cfg.subcommand = Subcommand::Solve;
    else if (name == "schedule") cfg.subcommand = Subcommand::Schedule;
    else if (name == "scaling") cfg.subcommand = Subcommand::Scaling;
    else if (name == "validate-lemmas") cfg.subcommand = Subcommand::ValidateLemmas;
    else cfg.subcommand = Subcommand::GenData;

    cfg.output_format = (cfg.subcommand == Subcommand::Scaling || cfg.subcommand == Subcommand::GenData)
                            ? OutputFormat::Csv
                            : OutputFormat::Json;
    cfg.master_seed = o.seed;
    cfg.output_path = o.out;
    cfg.fit_path = o.fit_out;
    cfg.beta = o.beta;
    cfg.noise = o.noise;
    if (!(std::isfinite(o.beta) && o.beta > 0.0)) problems.push_back("--beta: must be > 0");
    if (!(std::isfinite(o.noise) && o.noise > 0.0)) problems.push_back("--n0: must be > 0");

    if (cfg.subcommand == Subcommand::ValidateLemmas) {
        if (o.os_reps < 100) problems.push_back("--os-reps: must be >= 100");
        if (o.ldp_reps < 1000) problems.push_back("--ldp-reps: must be >= 1000");
        cfg.os_reps = static_cast<std::size_t>(std::max(0LL, o.os_reps));
        cfg.ldp_reps = static_cast<std::size_t>(std::max(0LL, o.ldp_reps));
        if (!problems.empty()) throw ConfigError(problems);
        return cfg;
    }

    cfg.dist_spec = o.dist;
    try {
        cfg.dist_spec = dist::parse_distribution(o.dist).to_string();
    } catch (const std::exception& e) {
        problems.push_back(std::string("--dist: ") + e.what());
    }

    const bool instance_given = cfg.subcommand == Subcommand::Solve && !o.instance.empty();
    cfg.instance_path = o.instance;
    cfg.n_list = parse_n_list(o.n, problems);
    for (std::size_t k = 0; k < cfg.n_list.size(); ++k) {
        if (cfg.n_list[k] == 0) problems.push_back("--n: values must be >= 1");
        if (k > 0 && cfg.n_list[k] <= cfg.n_list[k - 1]) problems.push_back("--n: values must be strictly increasing");
    }
    if (cfg.subcommand != Subcommand::Scaling && cfg.n_list.size() > 1) {
        problems.push_back("--n: " + name + " takes a single value");
    }

    if (cfg.subcommand == Subcommand::Solve) {
        if (o.solver == "exhaustive") cfg.solver = SolverKind::Exhaustive;
        else if (o.solver == "weight-bounded") cfg.solver = SolverKind::WeightBounded;
        else if (o.solver == "greedy") cfg.solver = SolverKind::Greedy;
        else problems.push_back("--solver: '" + o.solver + "' is not one of exhaustive, weight-bounded, greedy");
        if (o.wmax != "log2n") {
            try {
                std::size_t pos = 0;
                if (!o.wmax.empty() && o.wmax[0] == '-') throw std::invalid_argument("negative");
                cfg.w_max = std::stoull(o.wmax, &pos);
                if (pos != o.wmax.size()) throw std::invalid_argument("trailing");
                if (!instance_given && !cfg.n_list.empty() && *cfg.w_max > cfg.n_list.front()) {
                    problems.push_back("--wmax: must not exceed n");
                }
            } catch (const std::invalid_argument&) {
                problems.push_back("--wmax: '" + o.wmax + "' is neither an integer nor log2n");
            }
        }
        if (o.n_guard < 1) problems.push_back("--n-guard: must be >= 1");
        cfg.n_guard = static_cast<std::size_t>(std::max(1LL, o.n_guard));
    }

    if (cfg.subcommand == Subcommand::Schedule || cfg.subcommand == Subcommand::Scaling) {
        auto& h = cfg.heuristic;
        if (o.mode == "theorem") h.mode = scheduler::Mode::TheoremFaithful;
        else if (o.mode == "adaptive") h.mode = scheduler::Mode::AdaptivePrefix;
        else if (o.mode == "fixed") h.mode = scheduler::Mode::FixedCount;
        else problems.push_back("--mode: '" + o.mode + "' is not one of theorem, adaptive, fixed");
        h.epsilon = o.epsilon;
        h.delta = o.delta;
        if (!(o.epsilon > 0.0 && o.epsilon < 1.0)) problems.push_back("--epsilon: must lie in (0, 1)");
        if (!(o.delta > 0.0 && o.delta < 1.0)) problems.push_back("--delta: must lie in (0, 1)");
        if (h.mode == scheduler::Mode::FixedCount) {
            if (o.t < 1) {
                problems.push_back("--t: fixed mode needs --t >= 1");
            } else {
                h.fixed_t = static_cast<std::size_t>(o.t);
                for (std::size_t n : cfg.n_list) {
                    if (h.fixed_t > n) {
                        problems.push_back("--t: must not exceed n = " + std::to_string(n));
                        break;
                    }
                }
            }
        }
    }

    if (cfg.subcommand == Subcommand::Scaling) {
        if (o.trials < 30) problems.push_back("--trials: must be >= 30");
        cfg.trials = static_cast<std::size_t>(std::max(0LL, o.trials));
        if (!cfg.fit_path.empty() && cfg.n_list.size() < 5) problems.push_back("--fit-out: needs at least five n values");
    }

    if (!problems.empty()) throw ConfigError(problems);
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    try {
        switch (cfg.subcommand) {
            case Subcommand::Solve: return run_solve(cfg, out, log);
            case Subcommand::Schedule: return run_schedule(cfg, out, log);
            case Subcommand::Scaling: return run_scaling(cfg, out, log);
            case Subcommand::ValidateLemmas: return run_validate_lemmas(cfg, out, log);
            case Subcommand::GenData: return run_gendata(cfg, out, log);
        }
    } catch (const solvers::GuardRefusal& e) {
        log << "error: " << e.what() << '\n';
        return kGuardRefused;
    } catch (const std::length_error& e) {
        log << "error: " << e.what() << '\n';
        return kGuardRefused;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::ios_base::failure& e) {
        log << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const std::domain_error& e) {
        log << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const std::runtime_error& e) {
        // overflow/underflow/non-convergence and malformed instance files
        log << "error: " << e.what() << '\n';
        return dynamic_cast<const std::overflow_error*>(&e) || dynamic_cast<const std::underflow_error*>(&e) ||
                       std::string_view(e.what()).find("converge") != std::string_view::npos
                   ? kNumerical
                   : kIo;
    }
    return kUsage;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
    RunConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const UsageError& e) {
        (e.code() == kOk ? out : log) << e.what() << '\n';
        return e.code();
    } catch (const ConfigError& e) {
        log << e.what() << '\n';
        return kInvalidConfig;
    }
    return run(cfg, out, log);
}

void write_atomically(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::ios_base::failure("cannot open " + tmp.string() + " for writing");
        f << contents;
        f.flush();
        if (!f) {
            f.close();
            fs::remove(tmp);
            throw std::ios_base::failure("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::ios_base::failure("cannot move results into " + path + ": " + ec.message());
    }
}

}  // namespace fadingsched::cli
