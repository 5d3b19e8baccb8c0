#include "fadingsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fadingsched::scheduler {

using network::ActivationVector;
using network::ModelParams;

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::TheoremFaithful: return "theorem";
        case Mode::AdaptivePrefix: return "adaptive";
        case Mode::FixedCount: return "fixed";
    }
    return "unknown";
}

double g_function(const dist::Distribution& d, double beta, double x) {
    if (!(x > 0.0)) throw std::domain_error("G(x) needs x > 0");
    if (!(beta > 0.0)) throw std::domain_error("G(x) needs beta > 0");
    const double tail = d.ccdf(beta * d.mean() * x / 2.0);
    if (tail < 1e-300) {
        throw std::overflow_error("G(x): 1 - F underflows at x = " + std::to_string(x) + " for " + d.to_string());
    }
    return x / tail;
}

namespace {

double g_or_inf(const dist::Distribution& d, double beta, double x) {
    try {
        return g_function(d, beta, x);
    } catch (const std::overflow_error&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

double g_inverse(const dist::Distribution& d, double beta, double n, double tol) {
    if (!(n >= 1.0)) throw std::domain_error("G^-1(n) needs n >= 1");
    if (!(tol > 0.0)) throw std::domain_error("G^-1 tolerance must be positive");

    auto close_enough = [&](double g) { return std::fabs(g - n) <= tol * n; };

    double lo = 1.0;
    double hi = 1.0;
    const double g1 = g_or_inf(d, beta, 1.0);
    if (close_enough(g1)) return 1.0;
    int steps = 0;
    if (g1 < n) {
        while (g_or_inf(d, beta, hi) < n) {
            if (++steps > 200) throw std::runtime_error("G^-1: bracket expansion did not converge");
            lo = hi;
            hi *= 2.0;
        }
    } else {
        while (g_or_inf(d, beta, lo) > n) {
            if (++steps > 200) throw std::runtime_error("G^-1: bracket contraction did not converge");
            hi = lo;
            lo *= 0.5;
        }
    }

    for (int it = 0; it < 2000; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        const double g = g_or_inf(d, beta, mid);
        if (close_enough(g) || mid <= lo || mid >= hi) return mid;
        if (g < n) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw std::runtime_error("G^-1: bisection did not converge");
}

std::size_t theorem_active_count(double t, double epsilon, double delta, std::size_t n) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    const double raw = std::floor((1.0 - epsilon) * std::pow(t, 1.0 - delta));
    if (!(raw >= 1.0)) return 1;
    if (raw >= static_cast<double>(n)) return n;
    return static_cast<std::size_t>(raw);
}

namespace {

template <network::LinkGains C>
std::vector<std::size_t> sort_direct_impl(const C& m) {
    std::vector<std::size_t> perm(m.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return m.direct(a) < m.direct(b); });
    return perm;
}

template <network::LinkGains C>
ScheduleResult activate_top(const C& m, const ModelParams& p, std::vector<std::size_t> perm, std::size_t t) {
    const std::size_t n = m.size();
    ScheduleResult r;
    r.x = ActivationVector(n);
    for (std::size_t j = 0; j < t; ++j) r.x.set(perm[n - 1 - j]);
    r.t_target = t;
    r.T_realized = network::throughput(m, r.x, p);
    r.sorted_perm = std::move(perm);
    return r;
}

template <network::LinkGains C>
ScheduleResult fixed_impl(const C& m, const ModelParams& p, std::size_t t) {
    p.validate();
    if (t < 1 || t > m.size()) throw std::invalid_argument("fixed active count must lie in [1, n]");
    return activate_top(m, p, sort_direct_impl(m), t);
}

template <network::LinkGains C>
ScheduleResult theorem_impl(const C& m, const dist::Distribution& d, const ModelParams& p,
                            const HeuristicConfig& cfg) {
    p.validate();
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    const std::size_t n = m.size();
    const double t = g_inverse(d, p.beta, static_cast<double>(n));
    return activate_top(m, p, sort_direct_impl(m), theorem_active_count(t, cfg.epsilon, cfg.delta, n));
}

template <network::LinkGains C>
ScheduleResult adaptive_impl(const C& m, const ModelParams& p) {
    p.validate();
    const std::size_t n = m.size();
    auto perm = sort_direct_impl(m);

    std::vector<double> interference(n, 0.0);
    std::vector<std::uint8_t> in_prefix(n, 0);
    std::vector<std::size_t> alive;
    alive.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        if (network::receiver_succeeds(m.direct(r), 0.0, p)) alive.push_back(r);
    }
    std::vector<std::uint8_t> is_alive(n, 0);
    for (std::size_t r : alive) is_alive[r] = 1;

    std::size_t prefix_alive = 0;
    std::size_t best_t = 0;
    std::size_t best_j = 1;
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t src = perm[n - j];
        std::size_t kept = 0;
        for (std::size_t idx = 0; idx < alive.size(); ++idx) {
            const std::size_t r = alive[idx];
            if (r != src) {
                interference[r] += m.gain(src, r);
                if (!network::receiver_succeeds(m.direct(r), interference[r], p)) {
                    is_alive[r] = 0;
                    if (in_prefix[r]) --prefix_alive;
                    continue;
                }
            }
            alive[kept++] = r;
        }
        alive.resize(kept);
        in_prefix[src] = 1;
        if (is_alive[src]) ++prefix_alive;

        if (prefix_alive > best_t) {
            best_t = prefix_alive;
            best_j = j;
        }
        // Later prefixes can only count receivers that are still alive.
        if (alive.size() <= best_t) break;
    }
    return activate_top(m, p, std::move(perm), best_j);
}

}  // namespace

std::vector<std::size_t> sort_direct_links(const network::ChannelMatrix& m) { return sort_direct_impl(m); }
std::vector<std::size_t> sort_direct_links(const network::LazyChannel& m) { return sort_direct_impl(m); }

ScheduleResult theorem_schedule(const network::ChannelMatrix& m, const dist::Distribution& d, const ModelParams& p,
                                const HeuristicConfig& cfg) {
    return theorem_impl(m, d, p, cfg);
}
ScheduleResult theorem_schedule(const network::LazyChannel& m, const dist::Distribution& d, const ModelParams& p,
                                const HeuristicConfig& cfg) {
    return theorem_impl(m, d, p, cfg);
}

ScheduleResult fixed_schedule(const network::ChannelMatrix& m, const ModelParams& p, std::size_t t) {
    return fixed_impl(m, p, t);
}
ScheduleResult fixed_schedule(const network::LazyChannel& m, const ModelParams& p, std::size_t t) {
    return fixed_impl(m, p, t);
}

ScheduleResult adaptive_prefix_schedule(const network::ChannelMatrix& m, const ModelParams& p) {
    return adaptive_impl(m, p);
}
ScheduleResult adaptive_prefix_schedule(const network::LazyChannel& m, const ModelParams& p) {
    return adaptive_impl(m, p);
}

namespace {
template <network::LinkGains C>
ScheduleResult dispatch(const C& m, const dist::Distribution& d, const ModelParams& p, const HeuristicConfig& cfg) {
    switch (cfg.mode) {
        case Mode::TheoremFaithful: return theorem_impl(m, d, p, cfg);
        case Mode::AdaptivePrefix: return adaptive_impl(m, p);
        case Mode::FixedCount: return fixed_impl(m, p, cfg.fixed_t);
    }
    throw std::logic_error("unknown scheduler mode");
}
}  // namespace

ScheduleResult schedule(const network::ChannelMatrix& m, const dist::Distribution& d, const ModelParams& p,
                        const HeuristicConfig& cfg) {
    return dispatch(m, d, p, cfg);
}
ScheduleResult schedule(const network::LazyChannel& m, const dist::Distribution& d, const ModelParams& p,
                        const HeuristicConfig& cfg) {
    return dispatch(m, d, p, cfg);
}

}  // namespace fadingsched::scheduler
