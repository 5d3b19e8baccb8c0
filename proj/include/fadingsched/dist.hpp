#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fadingsched/rng.hpp"

namespace fadingsched::dist {

/// Nakagami-m channel power: shape m, mean power omega.
struct GammaParams {
    double m;
    double omega;
};

/// Weibull power with shape k and scale lambda.
struct WeibullParams {
    double k;
    double lambda;
};

/// Generalized Pareto power, f(x) = alpha / (1 + x)^(alpha + 1), alpha > 2.
struct ParetoParams {
    double alpha;
};

/// Log-normal power. `mu_log` is the location of ln(X), not the channel mean.
struct LogNormalParams {
    double mu_log;
    double sigma;
};

using DistributionSpec = std::variant<GammaParams, WeibullParams, ParetoParams, LogNormalParams>;

enum class DistKind { Gamma, Weibull, GeneralizedPareto, LogNormal };

enum class TailType { SuperExponential, HeavyTailed };
enum class HeavyTailSubtype { RegularlyVarying, LogNormalType, WeibullLike };

struct TailClass {
    TailType type;
    std::optional<HeavyTailSubtype> subtype;
    /// False only for Weibull with 0.5 <= k < 1, which is neither of the
    /// light- nor heavy-tailed families the throughput lower bound covers.
    bool theorem_coverage = true;
};

std::string_view to_string(TailType t);
std::string_view to_string(HeavyTailSubtype t);

/// A validated, immutable channel power law.
///
/// Safe to share across threads; sampling state lives in the caller's
/// RandomSource.
class Distribution {
public:
    /// Throws std::invalid_argument when a parameter leaves its domain.
    explicit Distribution(DistributionSpec spec);

    const DistributionSpec& spec() const noexcept { return spec_; }
    DistKind kind() const noexcept;

    double pdf(double x) const;
    double cdf(double x) const;
    /// 1 - cdf(x), computed from the upper tail directly.
    double ccdf(double x) const;
    /// Inverse cdf on [0, 1). p >= 1 is a domain error.
    double quantile(double p) const;
    /// Inverse ccdf on (0, 1]: the x with 1 - F(x) = q. Accurate for tiny q
    /// where quantile(1 - q) would lose digits forming 1 - q.
    double upper_quantile(double q) const;
    double mean() const noexcept { return mean_; }
    /// f(x) / (1 - F(x)); throws std::overflow_error when the tail underflows.
    double hazard(double x) const;

    double sample(RandomSource& rng) const;

    /// Inverse-transform draw for the closed-form kinds (Weibull, Pareto) and
    /// the m = 1 Gamma. Throws std::logic_error for the other kinds.
    double from_uniform(double u) const;
    bool has_closed_form_quantile() const noexcept;

    TailClass tail_class() const noexcept;
    /// Catalog metadata: every member satisfies condition set 1 analytically.
    bool condition_set1() const noexcept { return true; }

    /// Characteristic scale used to seed quantile brackets.
    double scale() const noexcept;

    /// Canonical spec string, e.g. "gamma:m=2,omega=1".
    std::string to_string() const;

private:
    double bisect_quantile(double p, double q) const;

    DistributionSpec spec_;
    double mean_ = 0.0;
};

/// Parses "gamma:m=2,omega=1", "weibull:k=0.4,lambda=1", "pareto:alpha=3",
/// "lognormal:mu=0,sigma=1". Errors name the offending token.
Distribution parse_distribution(std::string_view text);

/// Numerical look at condition set 1 on a grid: x h(x) and d/dx (1/h(x)).
struct ConditionSet1Report {
    std::vector<double> grid;
    std::vector<double> x_hazard;
    std::vector<double> inv_hazard_slope;
    /// |successive differences of x h(x)| shrink along the grid.
    bool x_hazard_settling = false;
    /// |d/dx 1/h| is non-increasing along the grid.
    bool inv_hazard_slope_decaying = false;
};

ConditionSet1Report condition_set1_diagnostic(const Distribution& d, std::span<const double> grid);

}  // namespace fadingsched::dist
