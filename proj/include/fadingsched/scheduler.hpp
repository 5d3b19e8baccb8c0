#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "fadingsched/dist.hpp"
#include "fadingsched/network.hpp"

namespace fadingsched::scheduler {

enum class Mode { TheoremFaithful, AdaptivePrefix, FixedCount };

std::string_view to_string(Mode m);

struct HeuristicConfig {
    double epsilon = 0.1;
    double delta = 0.05;
    Mode mode = Mode::TheoremFaithful;
    /// Active count for Mode::FixedCount.
    std::size_t fixed_t = 1;
};

struct ScheduleResult {
    network::ActivationVector x;
    std::size_t t_target = 0;
    std::size_t T_realized = 0;
    /// Pair indices by ascending direct-link power.
    std::vector<std::size_t> sorted_perm;

    bool all_succeeded() const noexcept { return T_realized == t_target; }
};

/// x / (1 - F(beta * mu * x / 2)) with mu the channel mean.
/// Throws std::overflow_error when the tail underflows below 1e-300.
double g_function(const dist::Distribution& d, double beta, double x);

/// t with |G(t) - n| / n <= tol, by bisection on the increasing G.
/// Throws std::runtime_error if bracketing needs more than 200 doublings.
double g_inverse(const dist::Distribution& d, double beta, double n, double tol = 1e-9);

/// floor((1 - epsilon) * t^(1 - delta)) clamped to [1, n].
std::size_t theorem_active_count(double t, double epsilon, double delta, std::size_t n);

/// Permutation ordering pairs by ascending direct gain; ties by index.
std::vector<std::size_t> sort_direct_links(const network::ChannelMatrix& m);
std::vector<std::size_t> sort_direct_links(const network::LazyChannel& m);

/// Activates the t1 strongest direct links, t1 derived from G^-1(n).
ScheduleResult theorem_schedule(const network::ChannelMatrix& m, const dist::Distribution& d,
                                const network::ModelParams& p, const HeuristicConfig& cfg);
ScheduleResult theorem_schedule(const network::LazyChannel& m, const dist::Distribution& d,
                                const network::ModelParams& p, const HeuristicConfig& cfg);

/// Activates the t strongest direct links.
ScheduleResult fixed_schedule(const network::ChannelMatrix& m, const network::ModelParams& p, std::size_t t);
ScheduleResult fixed_schedule(const network::LazyChannel& m, const network::ModelParams& p, std::size_t t);

/// Best prefix of the strongest-first order: the j maximizing throughput when
/// the top j pairs transmit (smallest j on ties).
///
/// Receivers whose interference already defeats them are dropped for good,
/// since adding sources only raises interference; the scan stops once the
/// surviving receivers cannot beat the best prefix so far. The result equals
/// a scan of every j in [1, n].
ScheduleResult adaptive_prefix_schedule(const network::ChannelMatrix& m, const network::ModelParams& p);
ScheduleResult adaptive_prefix_schedule(const network::LazyChannel& m, const network::ModelParams& p);

/// Dispatches on cfg.mode.
ScheduleResult schedule(const network::ChannelMatrix& m, const dist::Distribution& d, const network::ModelParams& p,
                        const HeuristicConfig& cfg);
ScheduleResult schedule(const network::LazyChannel& m, const dist::Distribution& d, const network::ModelParams& p,
                        const HeuristicConfig& cfg);

}  // namespace fadingsched::scheduler
