#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "fadingsched/analysis.hpp"
#include "oracles.hpp"

using namespace fadingsched;
using analysis::ScalingRow;
using analysis::ScalingTable;

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

ScalingTable synthetic(const std::function<double(double)>& T) {
    ScalingTable t;
    for (std::size_t k = 6; k <= 14; ++k) {
        const std::size_t n = std::size_t{1} << k;
        t.rows.push_back({n, 30, T(double(n)), 0.0, n / T(double(n))});
    }
    return t;
}

}  // namespace

TEST_CASE("falk normalizers") {
    dist::Distribution e(dist::GammaParams{1, 1});
    auto f = analysis::falk_normalizers(e, 10000, 100);
    CHECK(f.a_n == doctest::Approx(std::log(100.0)).epsilon(1e-14));
    CHECK(f.b_n == doctest::Approx(0.1).epsilon(1e-12));
    for (auto [n, i] : {std::pair<std::size_t, std::size_t>{1000, 32}, {12345, 7}, {100000, 317}, {50, 50}}) {
        auto g = analysis::falk_normalizers(e, n, i);
        CHECK(std::fabs(g.a_n - std::log(double(n) / i)) < 1e-12);
        CHECK(std::fabs(g.b_n - 1.0 / std::sqrt(double(i))) < 1e-12);
    }
    CHECK(analysis::falk_normalizers(dist::Distribution(dist::ParetoParams{3}), 100, 100).a_n == 0.0);
    CHECK(analysis::falk_normalizers(dist::Distribution(dist::WeibullParams{1, 3}), 100, 100).a_n == 0.0);
    CHECK(analysis::falk_normalizers(dist::Distribution(dist::GammaParams{1, 2}), 100, 100).a_n == 0.0);
    // f(0) = 0 leaves b_n undefined at i = n
    CHECK_THROWS_AS(analysis::falk_normalizers(dist::Distribution(dist::WeibullParams{2, 1}), 100, 100),
                    std::underflow_error);
    CHECK_THROWS_AS(analysis::falk_normalizers(dist::Distribution(dist::GammaParams{2, 1}), 100, 100),
                    std::underflow_error);

    // log-normal via an erfc cdf and a bisection quantile written here
    auto ln = analysis::falk_normalizers(dist::Distribution(dist::LogNormalParams{0, 1}), 1000000, 1000);
    const double a_ref = oracle::bisect([](double x) { return x <= 0 ? 0.0 : std_normal_cdf(std::log(x)); },
                                        1.0 - 1e-3, 0.0, 1e3);
    const double pdf_ref = std::exp(-0.5 * std::log(a_ref) * std::log(a_ref)) / (a_ref * std::sqrt(2 * std::numbers::pi));
    CHECK(ln.a_n == doctest::Approx(a_ref).epsilon(1e-9));
    CHECK(ln.b_n == doctest::Approx(std::sqrt(1000.0) / (1e6 * pdf_ref)).epsilon(1e-8));

    CHECK_THROWS_AS(analysis::falk_normalizers(e, 10, 0), std::invalid_argument);
    CHECK_THROWS_AS(analysis::falk_normalizers(e, 10, 11), std::invalid_argument);
    CHECK(analysis::sqrt_rank(100000) == 317);
    CHECK(analysis::sqrt_rank(100) == 10);
}

TEST_CASE("normalizer ratio grows for every catalog member") {
    for (auto spec : {"gamma:m=1,omega=1", "gamma:m=4,omega=1", "weibull:k=2,lambda=1", "weibull:k=0.4,lambda=1",
                      "pareto:alpha=3", "lognormal:mu=0,sigma=1"}) {
        auto d = dist::parse_distribution(spec);
        double prev = -1e300;
        for (double n : {1e3, 1e4, 1e5, 1e6}) {
            const auto nn = static_cast<std::size_t>(n);
            auto f = analysis::falk_normalizers(d, nn, analysis::sqrt_rank(nn));
            CAPTURE(spec);
            CHECK(f.a_n / f.b_n > prev);
            prev = f.a_n / f.b_n;
        }
    }
}

TEST_CASE("ks statistic") {
    const std::vector<double> median{0.0};
    CHECK(analysis::ks_statistic(median, std_normal_cdf) == doctest::Approx(0.5));

    // uniform cdf on [0,1], samples at 1/4, 2/4, 3/4
    auto unif = [](double x) { return std::clamp(x, 0.0, 1.0); };
    const std::vector<double> q{0.25, 0.5, 0.75};
    CHECK(analysis::ks_statistic(q, unif) == doctest::Approx(0.25).epsilon(1e-15));

    RandomSource rng(10);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = rng.uniform01();
    std::sort(xs.begin(), xs.end());
    const double d = analysis::ks_statistic(xs, unif);
    CHECK(d < analysis::ks_critical_999(xs.size()));

    // joint monotone transform leaves D unchanged
    std::vector<double> ys(xs.size());
    std::transform(xs.begin(), xs.end(), ys.begin(), [](double x) { return std::exp(3 * x); });
    const double d2 = analysis::ks_statistic(ys, [](double y) { return std::clamp(std::log(y) / 3.0, 0.0, 1.0); });
    CHECK(d2 == doctest::Approx(d).epsilon(1e-9));

    CHECK_THROWS(analysis::ks_statistic(std::vector<double>{}, unif));
    CHECK_THROWS(analysis::ks_statistic(std::vector<double>{2.0, 1.0}, unif));
}

TEST_CASE("order statistic experiment") {
    dist::Distribution e(dist::GammaParams{1, 1});
    RandomSource rng(1);
    CHECK_THROWS(analysis::intermediate_os_experiment(e, 1000, analysis::sqrt_rank, 0, rng));
    auto r = analysis::intermediate_os_experiment(e, 1000, analysis::sqrt_rank, 300, rng);
    CHECK(r.i == 32);
    CHECK(r.normalized.size() == 300);
    CHECK(std::is_sorted(r.normalized.begin(), r.normalized.end()));
    CHECK(r.ks_vs_normal == doctest::Approx(analysis::ks_statistic(r.normalized, std_normal_cdf)));
    RandomSource a(5), b(5);
    CHECK(analysis::intermediate_os_experiment(e, 500, analysis::sqrt_rank, 200, a).normalized ==
          analysis::intermediate_os_experiment(e, 500, analysis::sqrt_rank, 200, b).normalized);
}

TEST_CASE("large deviations") {
    dist::Distribution e(dist::GammaParams{1, 1});
    RandomSource rng(2);
    CHECK(analysis::ldp_tail_experiment(e, 10, 1e6, 1000, rng) == 0.0);
    CHECK_THROWS(analysis::ldp_tail_experiment(e, 10, 1.0, 1000, rng));
    CHECK_THROWS(analysis::ldp_tail_experiment(e, 10, 2.0, 999, rng));
    // sum of 10 unit exponentials is Gamma(10, 1): P{S >= 15}
    dist::Distribution g10(dist::GammaParams{10, 10});
    const double exact = g10.ccdf(15.0);
    const std::size_t reps = 200000;
    const double est = analysis::ldp_tail_experiment(e, 10, 1.5, reps, rng);
    CHECK(std::fabs(est - exact) < 5.0 * std::sqrt(exact * (1 - exact) / reps));

    dist::Distribution par(dist::ParetoParams{2.5});
    CHECK(analysis::single_jump_tail(par, 100, 2.0) == doctest::Approx(100.0 * par.ccdf(100.0 * par.mean())));
}

TEST_CASE("least squares and fits") {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{3, 5, 7, 9};
    auto f = analysis::least_squares(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK_THROWS(analysis::least_squares(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}));

    using analysis::ModelKind;
    auto log_fit = analysis::fit_scaling(synthetic([](double n) { return 3.0 * std::log(n); }), {ModelKind::LogN, 0});
    CHECK(std::fabs(log_fit.fit.slope - 3.0) < 1e-9);
    CHECK(std::fabs(log_fit.fit.r_squared - 1.0) < 1e-9);
    auto pow_fit = analysis::fit_scaling(synthetic([](double n) { return std::pow(n, 0.25); }), {ModelKind::PowerLaw, 0.25});
    CHECK(std::fabs(pow_fit.fit.slope - 0.25) < 1e-9);
    CHECK(std::fabs(pow_fit.fit.r_squared - 1.0) < 1e-9);
    auto wb = analysis::fit_scaling(synthetic([](double n) { return 2.0 * std::sqrt(std::log(n)) + 1; }),
                                    {ModelKind::LogNPow, 0.5});
    CHECK(std::fabs(wb.fit.slope - 2.0) < 1e-9);
    CHECK(std::fabs(wb.fit.intercept - 1.0) < 1e-9);
    auto es = analysis::fit_scaling(synthetic([](double n) { return 0.5 * std::exp(1.4 * std::sqrt(std::log(n))); }),
                                    {ModelKind::ExpSqrtLog, 1.4});
    CHECK(std::fabs(es.fit.slope - 1.4) < 1e-9);

    ScalingTable short_table;
    short_table.rows.resize(4);
    CHECK_THROWS(analysis::fit_scaling(short_table, {ModelKind::LogN, 0}));
}

TEST_CASE("predicted scaling") {
    using analysis::ModelKind;
    auto p = analysis::predicted_scaling(dist::Distribution(dist::ParetoParams{3}));
    CHECK(p.kind == ModelKind::PowerLaw);
    CHECK(p.parameter == doctest::Approx(0.25));
    CHECK(analysis::predicted_scaling(dist::Distribution(dist::GammaParams{7, 1})).kind == ModelKind::LogN);
    auto w = analysis::predicted_scaling(dist::Distribution(dist::WeibullParams{2, 1}));
    CHECK(w.kind == ModelKind::LogNPow);
    CHECK(w.parameter == doctest::Approx(0.5));
    auto ln = analysis::predicted_scaling(dist::Distribution(dist::LogNormalParams{0, 1}));
    CHECK(ln.kind == ModelKind::ExpSqrtLog);
    CHECK(ln.parameter == doctest::Approx(std::numbers::sqrt2));
}

TEST_CASE("scaling experiment") {
    network::ModelParams p{1.0, 0.1};
    scheduler::HeuristicConfig cfg{0.1, 0.05, scheduler::Mode::AdaptivePrefix, 1};
    for (auto spec : {"gamma:m=1,omega=1", "pareto:alpha=3", "lognormal:mu=0,sigma=1"}) {
        auto d = dist::parse_distribution(spec);
        const std::vector<std::size_t> ns{4};
        auto t = analysis::scaling_experiment(d, p, cfg, ns, 30, 9);
        CHECK(t.rows[0].mean_T >= 1.0);
        CHECK(t.rows[0].mean_T <= 4.0);
    }
    dist::Distribution e(dist::GammaParams{1, 1});
    std::vector<std::size_t> ns;
    for (std::size_t k = 8; k <= 14; ++k) ns.push_back(std::size_t{1} << k);
    auto a = analysis::scaling_experiment(e, p, cfg, ns, 30, 42);
    auto b = analysis::scaling_experiment(e, p, cfg, ns, 30, 42);
    for (std::size_t r = 0; r < ns.size(); ++r) {
        CHECK(a.rows[r].mean_T == b.rows[r].mean_T);
        CHECK(a.rows[r].std_T == b.rows[r].std_T);
        CHECK(a.rows[r].mean_delay * a.rows[r].mean_T == doctest::Approx(double(ns[r])).epsilon(1e-15));
        if (r > 0) CHECK(a.rows[r].mean_T > a.rows[r - 1].mean_T);
    }

    // a row does not depend on its neighbours in the n list
    const std::vector<std::size_t> only{1024};
    auto c = analysis::scaling_experiment(e, p, cfg, only, 30, 42);
    CHECK(c.rows[0].mean_T == a.rows[2].mean_T);

    const std::vector<std::size_t> bad{8, 8};
    CHECK_THROWS(analysis::scaling_experiment(e, p, cfg, bad, 30, 1));
    CHECK_THROWS(analysis::scaling_experiment(e, p, cfg, only, 29, 1));

    std::stringstream ss;
    analysis::write_scaling_csv(ss, a);
    CHECK(ss.str().rfind("n,trials,mean_T,std_T,mean_delay\n", 0) == 0);
    auto rows = analysis::read_scaling_csv(ss);
    REQUIRE(rows.size() == a.rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        CHECK(rows[r].n == a.rows[r].n);
        CHECK(rows[r].mean_T == a.rows[r].mean_T);
        CHECK(rows[r].mean_delay == a.rows[r].mean_delay);
    }
}
