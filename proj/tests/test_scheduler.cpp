#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fadingsched/scheduler.hpp"
#include "fadingsched/solvers.hpp"
#include "oracles.hpp"

using namespace fadingsched;
using network::ChannelMatrix;
using network::ModelParams;

namespace {

std::vector<dist::Distribution> catalog() {
    return {dist::Distribution(dist::GammaParams{1, 1}), dist::Distribution(dist::GammaParams{2, 1}),
            dist::Distribution(dist::WeibullParams{2, 1}), dist::Distribution(dist::WeibullParams{0.4, 1}),
            dist::Distribution(dist::ParetoParams{3}), dist::Distribution(dist::LogNormalParams{0, 1})};
}

ChannelMatrix with_diagonal(const std::vector<double>& diag) {
    const std::size_t n = diag.size();
    std::vector<double> g(n * n, 0.01);
    for (std::size_t i = 0; i < n; ++i) g[i * n + i] = diag[i];
    return ChannelMatrix(n, g);
}

}  // namespace

TEST_CASE("G function") {
    dist::Distribution par(dist::ParetoParams{3});
    CHECK(scheduler::g_function(par, 2.0, 4.0) == doctest::Approx(108.0).epsilon(1e-13));
    for (const auto& d : catalog()) CHECK(scheduler::g_function(d, 1.0, 1e-9) < 1e-8);

    // large-x form Gamma(m) (2/(beta m))^(m-1) x^(2-m) e^(beta m x / 2) for m = 2, beta = 1
    dist::Distribution g2(dist::GammaParams{2, 1});
    const double x = 30.0;
    const double asym = std::tgamma(2.0) * std::pow(2.0 / 2.0, 1.0) * std::pow(x, 0.0) * std::exp(x);
    CHECK(std::fabs(scheduler::g_function(g2, 1.0, x) / asym - 1.0) < 0.05);

    RandomSource rng(3);
    for (const auto& d : catalog()) {
        for (int k = 0; k < 50; ++k) {
            double a = 20.0 * rng.uniform01() + 1e-3, b = 20.0 * rng.uniform01() + 1e-3;
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            CHECK(scheduler::g_function(d, 1.0, a) < scheduler::g_function(d, 1.0, b));
        }
    }
}

TEST_CASE("G inverse") {
    for (const auto& d : catalog()) {
        CAPTURE(d.to_string());
        for (double n : {10.0, 1e3, 1e6}) {
            const double t = scheduler::g_inverse(d, 1.0, n);
            CHECK(std::fabs(scheduler::g_function(d, 1.0, t) - n) / n <= 1e-9);
        }
        RandomSource rng(5);
        for (int k = 0; k < 20; ++k) {
            const double x = 0.5 + 10.0 * rng.uniform01();
            const double y = scheduler::g_inverse(d, 1.0, scheduler::g_function(d, 1.0, x));
            CHECK(std::fabs(y - x) / x <= 1e-8);
        }
    }

    dist::Distribution par(dist::ParetoParams{3});
    const double ref = oracle::bisect([](double t) { return t * std::pow(1 + t / 2, 3); }, 1e3, 0.0, 1e3);
    CHECK(std::fabs(scheduler::g_inverse(par, 2.0, 1e3) - ref) / ref < 1e-8);

    // G^-1(n) / sqrt(ln n) settles for Weibull k = 2
    dist::Distribution w(dist::WeibullParams{2, 1});
    std::vector<double> ratio;
    for (double n : {1e2, 1e4, 1e6, 1e8}) ratio.push_back(scheduler::g_inverse(w, 1.0, n) / std::sqrt(std::log(n)));
    for (std::size_t i = 2; i < ratio.size(); ++i) {
        CHECK(std::fabs(ratio[i] - ratio[i - 1]) < std::fabs(ratio[i - 1] - ratio[i - 2]));
    }
}

TEST_CASE("active count") {
    CHECK(scheduler::theorem_active_count(100.0, 0.1, 0.05, 1000) == 71);
    CHECK(scheduler::theorem_active_count(0.3, 0.1, 0.05, 10) == 1);
    CHECK(scheduler::theorem_active_count(1e6, 0.1, 0.05, 10) == 10);
}

TEST_CASE("sorting direct links") {
    CHECK(scheduler::sort_direct_links(with_diagonal({5, 1, 3})) == std::vector<std::size_t>{1, 2, 0});
    CHECK(scheduler::sort_direct_links(with_diagonal({1, 2, 3, 4})) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(scheduler::sort_direct_links(with_diagonal({2, 1, 2})) == std::vector<std::size_t>{1, 0, 2});
    auto m = network::generate_instance(1000, dist::Distribution(dist::GammaParams{1, 1}), 12);
    auto perm = scheduler::sort_direct_links(m);
    for (std::size_t i = 1; i < perm.size(); ++i) CHECK(m.direct(perm[i - 1]) <= m.direct(perm[i]));
}

TEST_CASE("theorem schedule") {
    dist::Distribution d(dist::GammaParams{1, 1});
    ModelParams p{1.0, 0.1};
    scheduler::HeuristicConfig cfg;
    auto one = scheduler::theorem_schedule(ChannelMatrix(1, {2.0}), d, p, cfg);
    CHECK(one.t_target == 1);
    CHECK(one.x.weight() == 1);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto m = network::generate_instance(300, d, seed);
        auto r = scheduler::theorem_schedule(m, d, p, cfg);
        CHECK(r.x.weight() == r.t_target);
        CHECK(r.T_realized == network::throughput(m, r.x, p));
        double min_on = 1e300, max_off = 0.0;
        for (std::size_t i = 0; i < 300; ++i) {
            if (r.x[i]) {
                min_on = std::min(min_on, m.direct(i));
            } else {
                max_off = std::max(max_off, m.direct(i));
            }
        }
        CHECK(min_on >= max_off);
        CHECK(scheduler::adaptive_prefix_schedule(m, p).T_realized >= r.T_realized);
    }

    network::LazyChannel lazy(4096, d, 9);
    auto dense = network::generate_instance(4096, d, 9);
    auto a = scheduler::theorem_schedule(lazy, d, p, cfg);
    auto b = scheduler::theorem_schedule(dense, d, p, cfg);
    CHECK(a.x == b.x);
    CHECK(a.T_realized == b.T_realized);

    cfg.epsilon = 1.0;
    CHECK_THROWS(scheduler::theorem_schedule(dense, d, p, cfg));
}

TEST_CASE("adaptive prefix equals a plain scan over every prefix") {
    ModelParams p{1.0, 0.1};
    CHECK(scheduler::adaptive_prefix_schedule(ChannelMatrix(1, {0.01}), p).t_target == 1);
    for (const auto& d : catalog()) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto m = network::generate_instance(150, d, seed);
            auto r = scheduler::adaptive_prefix_schedule(m, p);
            auto perm = scheduler::sort_direct_links(m);
            std::size_t best = 0, best_j = 1;
            for (std::size_t j = 1; j <= 150; ++j) {
                network::ActivationVector x(150);
                for (std::size_t q = 0; q < j; ++q) x.set(perm[149 - q]);
                const auto t = network::throughput(m, x, p);
                if (t > best) {
                    best = t;
                    best_j = j;
                }
            }
            CAPTURE(d.to_string());
            CHECK(r.T_realized == best);
            CHECK(r.t_target == best_j);
            CHECK(r.x.weight() == best_j);
            network::LazyChannel lazy(150, d, seed);
            CHECK(scheduler::adaptive_prefix_schedule(lazy, p).x == r.x);
        }
    }
    auto d = dist::Distribution(dist::GammaParams{1, 1});
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto m = network::generate_instance(12, d, seed);
        CHECK(scheduler::adaptive_prefix_schedule(m, p).T_realized <= solvers::exhaustive_optimal(m, p).best_T);
    }
}

TEST_CASE("fixed schedule and dispatch") {
    dist::Distribution d(dist::WeibullParams{2, 1});
    ModelParams p{1.0, 0.1};
    auto m = network::generate_instance(50, d, 4);
    scheduler::HeuristicConfig cfg{0.1, 0.05, scheduler::Mode::FixedCount, 7};
    auto r = scheduler::schedule(m, d, p, cfg);
    CHECK(r.t_target == 7);
    CHECK(r.x == scheduler::fixed_schedule(m, p, 7).x);
    CHECK_THROWS(scheduler::fixed_schedule(m, p, 0));
    CHECK_THROWS(scheduler::fixed_schedule(m, p, 51));
    cfg.mode = scheduler::Mode::AdaptivePrefix;
    CHECK(scheduler::schedule(m, d, p, cfg).x == scheduler::adaptive_prefix_schedule(m, p).x);
}
