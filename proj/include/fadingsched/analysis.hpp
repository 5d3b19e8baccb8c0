#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fadingsched/dist.hpp"
#include "fadingsched/network.hpp"
#include "fadingsched/rng.hpp"
#include "fadingsched/scheduler.hpp"

namespace fadingsched::analysis {

// ---------------------------------------------------------------------------
// Intermediate order statistics
// ---------------------------------------------------------------------------

/// Centering and scaling for the (n - i + 1)-th order statistic:
/// a_n = F^-1(1 - i/n), b_n = sqrt(i) / (n f(a_n)).
struct FalkNormalizers {
    double a_n;
    double b_n;
};

/// Throws std::invalid_argument unless 1 <= i <= n, and std::underflow_error
/// when f(a_n) is zero or not finite.
FalkNormalizers falk_normalizers(const dist::Distribution& d, std::size_t n, std::size_t i);

/// i = ceil(sqrt(n)).
std::size_t sqrt_rank(std::size_t n);

using RankRule = std::function<std::size_t(std::size_t)>;

struct OrderStatisticExperiment {
    std::size_t n = 0;
    std::size_t i = 0;
    FalkNormalizers normalizers{};
    /// (X_(n-i+1) - a_n) / b_n per replication, sorted ascending.
    std::vector<double> normalized;
    /// KS distance of `normalized` to N(0, 1).
    double ks_vs_normal = 0.0;
};

/// Draws `reps` samples of size n and normalizes the i-th largest of each.
/// Replications use child streams of one seed drawn from `rng`.
OrderStatisticExperiment intermediate_os_experiment(const dist::Distribution& d, std::size_t n, const RankRule& i_rule,
                                                    std::size_t reps, RandomSource& rng);

// ---------------------------------------------------------------------------
// Goodness of fit
// ---------------------------------------------------------------------------

/// sup_x |F_hat(x) - F(x)| for sorted samples, checking both sides of every jump.
double ks_statistic(std::span<const double> sorted_samples, const std::function<double(double)>& cdf);

/// Asymptotic 99.9% critical value 1.95 / sqrt(N).
double ks_critical_999(std::size_t samples);

// ---------------------------------------------------------------------------
// Large deviations
// ---------------------------------------------------------------------------

/// Monte Carlo estimate of P{(X_1 + ... + X_t) / t >= K mu}. Requires t >= 1,
/// K > 1, reps >= 1000.
double ldp_tail_experiment(const dist::Distribution& d, std::size_t t, double K, std::size_t reps,
                           RandomSource& rng);

/// t * P{X_1 > t mu (K - 1)}: the single-big-jump approximation of the sum
/// tail for subexponential laws.
double single_jump_tail(const dist::Distribution& d, std::size_t t, double K);

// ---------------------------------------------------------------------------
// Throughput scaling
// ---------------------------------------------------------------------------

struct ScalingRow {
    std::size_t n = 0;
    std::size_t trials = 0;
    double mean_T = 0.0;
    double std_T = 0.0;
    /// n / mean_T: slots until a given pair is served.
    double mean_delay = 0.0;
};

struct ScalingTable {
    std::string dist;
    double beta = 1.0;
    double noise = 0.1;
    scheduler::Mode mode = scheduler::Mode::AdaptivePrefix;
    std::vector<ScalingRow> rows;
};

/// Runs `trials` independent instances per n. Trial (n, k) uses the instance
/// seed child_seed(master_seed, n, k), so results do not depend on the worker
/// count or on which other n are in the list.
ScalingTable scaling_experiment(const dist::Distribution& d, const network::ModelParams& p,
                                const scheduler::HeuristicConfig& cfg, std::span<const std::size_t> n_list,
                                std::size_t trials, std::uint64_t master_seed);

enum class ModelKind { LogN, LogNPow, PowerLaw, ExpSqrtLog };

std::string_view to_string(ModelKind k);

/// Growth form of the achievable throughput for a catalog member.
///   LogN:       a ln n + b
///   LogNPow:    a (ln n)^parameter + b, parameter = 1/k
///   PowerLaw:   a n^parameter, parameter = 1/(1 + alpha)
///   ExpSqrtLog: a exp(parameter sqrt(ln n)), parameter = sqrt(2) sigma
struct ScalingModel {
    ModelKind kind;
    double parameter = 0.0;

    std::string describe() const;
};

ScalingModel predicted_scaling(const dist::Distribution& d);

struct LinearFit {
    double slope;
    double intercept;
    double r_squared;
};

/// Ordinary least squares y = slope x + intercept. Throws std::invalid_argument
/// when x is constant or fewer than two points are given.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct ScalingFit {
    ScalingModel model;
    /// Regression in the model's transformed coordinates. For PowerLaw and
    /// ExpSqrtLog the slope is the measured exponent.
    LinearFit fit;
    std::string expected_form;
};

/// Fits mean_T against the model's regressor:
///   LogN       T ~ ln n            LogNPow     T ~ (ln n)^p
///   PowerLaw   ln T ~ ln n         ExpSqrtLog  ln T ~ sqrt(ln n)
/// Needs at least five rows.
ScalingFit fit_scaling(const ScalingTable& table, const ScalingModel& model);

/// CSV with header "n,trials,mean_T,std_T,mean_delay".
void write_scaling_csv(std::ostream& out, const ScalingTable& table);
std::vector<ScalingRow> read_scaling_csv(std::istream& in);

}  // namespace fadingsched::analysis
