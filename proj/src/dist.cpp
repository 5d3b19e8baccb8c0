#include "fadingsched/dist.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fadingsched/special.hpp"

namespace fadingsched::dist {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

void validate(const DistributionSpec& spec) {
    std::visit(overloaded{
                   [](const GammaParams& g) {
                       require(std::isfinite(g.m) && g.m > 0.0, "gamma m must be > 0 (got " + fmt_double(g.m) + ")");
                       require(std::isfinite(g.omega) && g.omega > 0.0,
                               "gamma omega must be > 0 (got " + fmt_double(g.omega) + ")");
                   },
                   [](const WeibullParams& w) {
                       require(std::isfinite(w.k) && w.k > 0.0, "weibull k must be > 0 (got " + fmt_double(w.k) + ")");
                       require(std::isfinite(w.lambda) && w.lambda > 0.0,
                               "weibull lambda must be > 0 (got " + fmt_double(w.lambda) + ")");
                   },
                   [](const ParetoParams& p) {
                       require(std::isfinite(p.alpha) && p.alpha > 2.0,
                               "pareto alpha must be > 2 for a regularly varying tail with finite variance (got " +
                                   fmt_double(p.alpha) + ")");
                   },
                   [](const LogNormalParams& l) {
                       require(std::isfinite(l.mu_log), "lognormal mu must be finite");
                       require(std::isfinite(l.sigma) && l.sigma > 0.0,
                               "lognormal sigma must be > 0 (got " + fmt_double(l.sigma) + ")");
                   },
               },
               spec);
}

double compute_mean(const DistributionSpec& spec) {
    return std::visit(overloaded{
                          [](const GammaParams& g) { return g.omega; },
                          [](const WeibullParams& w) { return w.lambda * std::tgamma(1.0 + 1.0 / w.k); },
                          [](const ParetoParams& p) { return 1.0 / (p.alpha - 1.0); },
                          [](const LogNormalParams& l) { return std::exp(l.mu_log + 0.5 * l.sigma * l.sigma); },
                      },
                      spec);
}

void check_x(double x) {
    if (!(x >= 0.0)) throw std::domain_error("channel power argument must be non-negative");
}

double standard_normal(RandomSource& rng) {
    const double u1 = rng.uniform_open_low();
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Marsaglia-Tsang for shape >= 1, with the u^(1/a) boost below 1. Unit scale.
double standard_gamma(double a, RandomSource& rng) {
    if (a < 1.0) {
        const double u = rng.uniform_open_low();
        return standard_gamma(a + 1.0, rng) * std::pow(u, 1.0 / a);
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z;
        double v;
        do {
            z = standard_normal(rng);
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open_low();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace

std::string_view to_string(TailType t) {
    return t == TailType::SuperExponential ? "super-exponential" : "heavy-tailed";
}

std::string_view to_string(HeavyTailSubtype t) {
    switch (t) {
        case HeavyTailSubtype::RegularlyVarying: return "regularly-varying";
        case HeavyTailSubtype::LogNormalType: return "lognormal-type";
        case HeavyTailSubtype::WeibullLike: return "weibull-like";
    }
    return "unknown";
}

Distribution::Distribution(DistributionSpec spec) : spec_(spec) {
    validate(spec_);
    mean_ = compute_mean(spec_);
}

DistKind Distribution::kind() const noexcept {
    return static_cast<DistKind>(spec_.index());
}

double Distribution::pdf(double x) const {
    check_x(x);
    return std::visit(overloaded{
                          [x](const GammaParams& g) {
                              const double rate = g.m / g.omega;
                              if (x == 0.0) {
                                  if (g.m < 1.0) return std::numeric_limits<double>::infinity();
                                  return g.m == 1.0 ? rate : 0.0;
                              }
                              return std::exp((g.m - 1.0) * std::log(x) - rate * x - std::lgamma(g.m) +
                                              g.m * std::log(rate));
                          },
                          [x](const WeibullParams& w) {
                              const double r = x / w.lambda;
                              if (x == 0.0) {
                                  if (w.k < 1.0) return std::numeric_limits<double>::infinity();
                                  return w.k == 1.0 ? 1.0 / w.lambda : 0.0;
                              }
                              return (w.k / w.lambda) * std::pow(r, w.k - 1.0) * std::exp(-std::pow(r, w.k));
                          },
                          [x](const ParetoParams& p) { return p.alpha * std::pow(1.0 + x, -(p.alpha + 1.0)); },
                          [x](const LogNormalParams& l) {
                              if (x == 0.0) return 0.0;
                              const double z = (std::log(x) - l.mu_log) / l.sigma;
                              return std::exp(-0.5 * z * z) / (x * l.sigma * std::sqrt(2.0 * std::numbers::pi));
                          },
                      },
                      spec_);
}

double Distribution::cdf(double x) const {
    check_x(x);
    return std::visit(overloaded{
                          [x](const GammaParams& g) { return special::gamma_p(g.m, g.m * x / g.omega); },
                          [x](const WeibullParams& w) { return -std::expm1(-std::pow(x / w.lambda, w.k)); },
                          [x](const ParetoParams& p) { return -std::expm1(-p.alpha * std::log1p(x)); },
                          [x](const LogNormalParams& l) {
                              if (x == 0.0) return 0.0;
                              return special::normal_cdf((std::log(x) - l.mu_log) / l.sigma);
                          },
                      },
                      spec_);
}

double Distribution::ccdf(double x) const {
    check_x(x);
    return std::visit(overloaded{
                          [x](const GammaParams& g) { return special::gamma_q(g.m, g.m * x / g.omega); },
                          [x](const WeibullParams& w) { return std::exp(-std::pow(x / w.lambda, w.k)); },
                          [x](const ParetoParams& p) { return std::exp(-p.alpha * std::log1p(x)); },
                          [x](const LogNormalParams& l) {
                              if (x == 0.0) return 1.0;
                              return special::normal_ccdf((std::log(x) - l.mu_log) / l.sigma);
                          },
                      },
                      spec_);
}

bool Distribution::has_closed_form_quantile() const noexcept {
    if (const auto* g = std::get_if<GammaParams>(&spec_)) return g->m == 1.0;
    return kind() == DistKind::Weibull || kind() == DistKind::GeneralizedPareto;
}

double Distribution::from_uniform(double u) const {
    return std::visit(overloaded{
                          [u](const GammaParams& g) -> double {
                              if (g.m != 1.0) throw std::logic_error("gamma with m != 1 has no closed-form quantile");
                              return -g.omega * std::log1p(-u);
                          },
                          [u](const WeibullParams& w) { return w.lambda * std::pow(-std::log1p(-u), 1.0 / w.k); },
                          [u](const ParetoParams& p) { return std::expm1(-std::log1p(-u) / p.alpha); },
                          [](const LogNormalParams&) -> double {
                              throw std::logic_error("lognormal has no closed-form quantile");
                          },
                      },
                      spec_);
}

double Distribution::quantile(double p) const {
    if (!(p >= 0.0)) throw std::domain_error("quantile: p must be >= 0");
    if (!(p < 1.0)) throw std::domain_error("quantile: p must be < 1 (the support is unbounded)");
    if (p == 0.0) return 0.0;
    if (has_closed_form_quantile()) return from_uniform(p);
    return bisect_quantile(p, 1.0 - p);
}

double Distribution::upper_quantile(double q) const {
    if (!(q > 0.0)) throw std::domain_error("upper quantile: q must be > 0 (the support is unbounded)");
    if (!(q <= 1.0)) throw std::domain_error("upper quantile: q must be <= 1");
    if (q == 1.0) return 0.0;
    return std::visit(overloaded{
                          [&](const GammaParams& g) {
                              return g.m == 1.0 ? -g.omega * std::log(q) : bisect_quantile(1.0 - q, q);
                          },
                          [q](const WeibullParams& w) { return w.lambda * std::pow(-std::log(q), 1.0 / w.k); },
                          [q](const ParetoParams& p) { return std::expm1(-std::log(q) / p.alpha); },
                          [&](const LogNormalParams&) { return bisect_quantile(1.0 - q, q); },
                      },
                      spec_);
}

double Distribution::bisect_quantile(double p, double q) const {
    // Upper probabilities are compared on the ccdf side against the exact tail mass q.
    const bool upper = q < 0.5;
    auto below = [&](double x) { return upper ? ccdf(x) > q : cdf(x) < p; };

    double lo = 0.0;
    double hi = scale() * 1e6;
    for (int expansions = 0; below(hi); ++expansions) {
        if (expansions > 2000) throw std::runtime_error("quantile: bracket expansion failed");
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 4000; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (below(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

double Distribution::hazard(double x) const {
    const double tail = ccdf(x);
    if (tail < 1e-300) {
        throw std::overflow_error("hazard: 1 - F(x) underflows at x = " + fmt_double(x) + " for " + to_string());
    }
    return pdf(x) / tail;
}

double Distribution::sample(RandomSource& rng) const {
    return std::visit(overloaded{
                          [&](const GammaParams& g) {
                              if (g.m == 1.0) return from_uniform(rng.uniform01());
                              return standard_gamma(g.m, rng) * g.omega / g.m;
                          },
                          [&](const WeibullParams&) { return from_uniform(rng.uniform01()); },
                          [&](const ParetoParams&) { return from_uniform(rng.uniform01()); },
                          [&](const LogNormalParams& l) { return std::exp(l.mu_log + l.sigma * standard_normal(rng)); },
                      },
                      spec_);
}

TailClass Distribution::tail_class() const noexcept {
    return std::visit(overloaded{
                          [](const GammaParams&) { return TailClass{TailType::SuperExponential, std::nullopt, true}; },
                          [](const WeibullParams& w) {
                              if (w.k >= 1.0) return TailClass{TailType::SuperExponential, std::nullopt, true};
                              return TailClass{TailType::HeavyTailed, HeavyTailSubtype::WeibullLike, w.k < 0.5};
                          },
                          [](const ParetoParams&) {
                              return TailClass{TailType::HeavyTailed, HeavyTailSubtype::RegularlyVarying, true};
                          },
                          [](const LogNormalParams&) {
                              return TailClass{TailType::HeavyTailed, HeavyTailSubtype::LogNormalType, true};
                          },
                      },
                      spec_);
}

double Distribution::scale() const noexcept {
    return std::visit(overloaded{
                          [](const GammaParams& g) { return g.omega; },
                          [](const WeibullParams& w) { return w.lambda; },
                          [](const ParetoParams&) { return 1.0; },
                          [](const LogNormalParams& l) { return std::exp(l.mu_log); },
                      },
                      spec_);
}

std::string Distribution::to_string() const {
    return std::visit(overloaded{
                          [](const GammaParams& g) {
                              return "gamma:m=" + fmt_double(g.m) + ",omega=" + fmt_double(g.omega);
                          },
                          [](const WeibullParams& w) {
                              return "weibull:k=" + fmt_double(w.k) + ",lambda=" + fmt_double(w.lambda);
                          },
                          [](const ParetoParams& p) { return "pareto:alpha=" + fmt_double(p.alpha); },
                          [](const LogNormalParams& l) {
                              return "lognormal:mu=" + fmt_double(l.mu_log) + ",sigma=" + fmt_double(l.sigma);
                          },
                      },
                      spec_);
}

Distribution parse_distribution(std::string_view text) {
    const auto colon = text.find(':');
    const std::string kind(text.substr(0, colon));
    std::map<std::string, double> params;
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view token = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            const auto eq = token.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                throw std::invalid_argument("malformed distribution parameter '" + std::string(token) +
                                            "' (expected name=value)");
            }
            const std::string name(token.substr(0, eq));
            const std::string_view value = token.substr(eq + 1);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size()) {
                throw std::invalid_argument("bad numeric value in distribution parameter '" + std::string(token) + "'");
            }
            if (!params.emplace(name, v).second) {
                throw std::invalid_argument("duplicate distribution parameter '" + std::string(token) + "'");
            }
        }
    }

    auto take = [&](const char* name) {
        auto it = params.find(name);
        if (it == params.end()) {
            throw std::invalid_argument("distribution '" + kind + "' is missing parameter '" + name + "'");
        }
        const double v = it->second;
        params.erase(it);
        return v;
    };

    DistributionSpec spec;
    if (kind == "gamma") {
        const double m = take("m");
        spec = GammaParams{m, take("omega")};
    } else if (kind == "weibull") {
        const double k = take("k");
        spec = WeibullParams{k, take("lambda")};
    } else if (kind == "pareto") {
        spec = ParetoParams{take("alpha")};
    } else if (kind == "lognormal") {
        const double mu = take("mu");
        spec = LogNormalParams{mu, take("sigma")};
    } else {
        throw std::invalid_argument("unknown distribution kind '" + kind +
                                    "' (expected gamma, weibull, pareto or lognormal)");
    }
    if (!params.empty()) {
        throw std::invalid_argument("unknown parameter '" + params.begin()->first + "' for distribution '" + kind + "'");
    }
    return Distribution(spec);
}

ConditionSet1Report condition_set1_diagnostic(const Distribution& d, std::span<const double> grid) {
    ConditionSet1Report report;
    report.grid.assign(grid.begin(), grid.end());
    for (double x : grid) {
        report.x_hazard.push_back(x * d.hazard(x));
        const double step = 1e-4 * std::max(x, 1e-3);
        const double lo = std::max(0.0, x - step);
        const double hi = x + step;
        report.inv_hazard_slope.push_back((1.0 / d.hazard(hi) - 1.0 / d.hazard(lo)) / (hi - lo));
    }

    report.x_hazard_settling = true;
    for (std::size_t i = 2; i < report.x_hazard.size(); ++i) {
        const double prev = std::fabs(report.x_hazard[i - 1] - report.x_hazard[i - 2]);
        const double cur = std::fabs(report.x_hazard[i] - report.x_hazard[i - 1]);
        if (cur > prev) report.x_hazard_settling = false;
    }
    report.inv_hazard_slope_decaying = true;
    for (std::size_t i = 1; i < report.inv_hazard_slope.size(); ++i) {
        if (std::fabs(report.inv_hazard_slope[i]) > std::fabs(report.inv_hazard_slope[i - 1]) + 1e-9) {
            report.inv_hazard_slope_decaying = false;
        }
    }
    return report;
}

}  // namespace fadingsched::dist
