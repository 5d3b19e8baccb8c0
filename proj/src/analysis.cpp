#include "fadingsched/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fadingsched/parallel.hpp"
#include "fadingsched/special.hpp"

namespace fadingsched::analysis {

FalkNormalizers falk_normalizers(const dist::Distribution& d, std::size_t n, std::size_t i) {
    if (n == 0 || i == 0 || i > n) throw std::invalid_argument("falk normalizers need 1 <= i <= n");
    const double a = d.upper_quantile(static_cast<double>(i) / static_cast<double>(n));
    const double density = d.pdf(a);
    if (!(density > 0.0) || !std::isfinite(density)) {
        throw std::underflow_error("falk normalizers: f(a_n) = " + std::to_string(density) + " at a_n = " +
                                   std::to_string(a) + " for " + d.to_string());
    }
    return {a, std::sqrt(static_cast<double>(i)) / (static_cast<double>(n) * density)};
}

std::size_t sqrt_rank(std::size_t n) {
    auto r = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    while (r > 1 && (r - 1) * (r - 1) >= n) --r;
    while (r * r < n) ++r;
    return r;
}

OrderStatisticExperiment intermediate_os_experiment(const dist::Distribution& d, std::size_t n, const RankRule& i_rule,
                                                    std::size_t reps, RandomSource& rng) {
    if (reps == 0) throw std::invalid_argument("order statistic experiment needs reps > 0");
    if (n == 0) throw std::invalid_argument("order statistic experiment needs n > 0");
    const std::size_t i = i_rule(n);
    if (i == 0 || i > n) throw std::invalid_argument("rank rule must return 1 <= i <= n");

    OrderStatisticExperiment out;
    out.n = n;
    out.i = i;
    out.normalizers = falk_normalizers(d, n, i);
    out.normalized.resize(reps);

    const std::uint64_t base = rng();
    parallel_for(reps, [&](std::size_t rep) {
        RandomSource local(child_seed(base, n, rep));
        std::vector<double> xs(n);
        for (auto& x : xs) x = d.sample(local);
        auto nth = xs.begin() + static_cast<std::ptrdiff_t>(n - i);
        std::nth_element(xs.begin(), nth, xs.end());
        out.normalized[rep] = (*nth - out.normalizers.a_n) / out.normalizers.b_n;
    });
    std::sort(out.normalized.begin(), out.normalized.end());
    out.ks_vs_normal = ks_statistic(out.normalized, special::normal_cdf);
    return out;
}

double ks_statistic(std::span<const double> sorted_samples, const std::function<double(double)>& cdf) {
    if (sorted_samples.empty()) throw std::invalid_argument("ks statistic needs at least one sample");
    if (!std::is_sorted(sorted_samples.begin(), sorted_samples.end())) {
        throw std::invalid_argument("ks statistic needs sorted samples");
    }
    const auto count = static_cast<double>(sorted_samples.size());
    double d = 0.0;
    for (std::size_t k = 0; k < sorted_samples.size(); ++k) {
        const double f = cdf(sorted_samples[k]);
        const double above = static_cast<double>(k + 1) / count - f;
        const double below = f - static_cast<double>(k) / count;
        d = std::max({d, above, below});
    }
    return d;
}

double ks_critical_999(std::size_t samples) { return 1.95 / std::sqrt(static_cast<double>(samples)); }

double ldp_tail_experiment(const dist::Distribution& d, std::size_t t, double K, std::size_t reps,
                           RandomSource& rng) {
    if (t == 0) throw std::invalid_argument("ldp experiment needs t >= 1");
    if (!(K > 1.0)) throw std::invalid_argument("ldp experiment needs K > 1");
    if (reps < 1000) throw std::invalid_argument("ldp experiment needs reps >= 1000");

    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (reps + kBlock - 1) / kBlock;
    const double threshold = K * d.mean() * static_cast<double>(t);
    const std::uint64_t base = rng();
    std::vector<std::size_t> hits(blocks, 0);
    parallel_for(blocks, [&](std::size_t b) {
        RandomSource local(child_seed(base, t, b));
        const std::size_t end = std::min(reps, (b + 1) * kBlock);
        std::size_t count = 0;
        for (std::size_t r = b * kBlock; r < end; ++r) {
            double sum = 0.0;
            for (std::size_t k = 0; k < t; ++k) sum += d.sample(local);
            if (sum >= threshold) ++count;
        }
        hits[b] = count;
    });
    const auto total = std::accumulate(hits.begin(), hits.end(), std::size_t{0});
    return static_cast<double>(total) / static_cast<double>(reps);
}

double single_jump_tail(const dist::Distribution& d, std::size_t t, double K) {
    const auto tt = static_cast<double>(t);
    return tt * d.ccdf(tt * d.mean() * (K - 1.0));
}

ScalingTable scaling_experiment(const dist::Distribution& d, const network::ModelParams& p,
                                const scheduler::HeuristicConfig& cfg, std::span<const std::size_t> n_list,
                                std::size_t trials, std::uint64_t master_seed) {
    p.validate();
    if (n_list.empty()) throw std::invalid_argument("scaling experiment needs at least one n");
    if (trials < 30) throw std::invalid_argument("scaling experiment needs at least 30 trials per n");
    for (std::size_t k = 0; k < n_list.size(); ++k) {
        if (n_list[k] == 0) throw std::invalid_argument("n must be positive");
        if (k > 0 && n_list[k] <= n_list[k - 1]) throw std::invalid_argument("n list must be strictly increasing");
    }

    std::vector<double> realized(n_list.size() * trials, 0.0);
    parallel_for(realized.size(), [&](std::size_t job) {
        const std::size_t row = job / trials;
        const std::size_t trial = job % trials;
        const std::size_t n = n_list[row];
        const network::LazyChannel channel(n, d, child_seed(master_seed, n, trial));
        realized[job] = static_cast<double>(scheduler::schedule(channel, d, p, cfg).T_realized);
    });

    ScalingTable table;
    table.dist = d.to_string();
    table.beta = p.beta;
    table.noise = p.noise;
    table.mode = cfg.mode;
    for (std::size_t row = 0; row < n_list.size(); ++row) {
        const auto first = realized.begin() + static_cast<std::ptrdiff_t>(row * trials);
        const auto last = first + static_cast<std::ptrdiff_t>(trials);
        const double mean = std::accumulate(first, last, 0.0) / static_cast<double>(trials);
        double ss = 0.0;
        for (auto it = first; it != last; ++it) ss += (*it - mean) * (*it - mean);
        ScalingRow r;
        r.n = n_list[row];
        r.trials = trials;
        r.mean_T = mean;
        r.std_T = std::sqrt(ss / static_cast<double>(trials - 1));
        r.mean_delay = mean > 0.0 ? static_cast<double>(r.n) / mean : std::numeric_limits<double>::infinity();
        table.rows.push_back(r);
    }
    return table;
}

std::string_view to_string(ModelKind k) {
    switch (k) {
        case ModelKind::LogN: return "log_n";
        case ModelKind::LogNPow: return "log_n_pow";
        case ModelKind::PowerLaw: return "power_law";
        case ModelKind::ExpSqrtLog: return "exp_sqrt_log";
    }
    return "unknown";
}

std::string ScalingModel::describe() const {
    std::ostringstream os;
    switch (kind) {
        case ModelKind::LogN: os << "a*ln(n)+b"; break;
        case ModelKind::LogNPow: os << "a*ln(n)^" << parameter << "+b"; break;
        case ModelKind::PowerLaw: os << "a*n^" << parameter; break;
        case ModelKind::ExpSqrtLog: os << "a*exp(" << parameter << "*sqrt(ln(n)))"; break;
    }
    return os.str();
}

ScalingModel predicted_scaling(const dist::Distribution& d) {
    const auto& spec = d.spec();
    if (std::holds_alternative<dist::GammaParams>(spec)) return {ModelKind::LogN, 1.0};
    if (const auto* w = std::get_if<dist::WeibullParams>(&spec)) return {ModelKind::LogNPow, 1.0 / w->k};
    if (const auto* pa = std::get_if<dist::ParetoParams>(&spec)) return {ModelKind::PowerLaw, 1.0 / (1.0 + pa->alpha)};
    const auto& l = std::get<dist::LogNormalParams>(spec);
    return {ModelKind::ExpSqrtLog, std::sqrt(2.0) * l.sigma};
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("least squares: x and y differ in length");
    if (x.size() < 2) throw std::invalid_argument("least squares needs at least two points");
    const auto count = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / count;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / count;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("least squares: regressor is constant");
    const double slope = sxy / sxx;
    double r2 = 1.0;
    if (syy > 0.0) {
        double ss_res = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double e = y[k] - (my + slope * (x[k] - mx));
            ss_res += e * e;
        }
        r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    }
    return {slope, my - slope * mx, r2};
}

ScalingFit fit_scaling(const ScalingTable& table, const ScalingModel& model) {
    if (table.rows.size() < 5) throw std::invalid_argument("scaling fit needs at least five rows");
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& row : table.rows) {
        const double ln_n = std::log(static_cast<double>(row.n));
        const bool log_response = model.kind == ModelKind::PowerLaw || model.kind == ModelKind::ExpSqrtLog;
        if (log_response && !(row.mean_T > 0.0)) {
            throw std::invalid_argument("scaling fit: log model needs positive mean throughput");
        }
        switch (model.kind) {
            case ModelKind::LogN: x.push_back(ln_n); break;
            case ModelKind::LogNPow: x.push_back(std::pow(ln_n, model.parameter)); break;
            case ModelKind::PowerLaw: x.push_back(ln_n); break;
            case ModelKind::ExpSqrtLog: x.push_back(std::sqrt(ln_n)); break;
        }
        y.push_back(log_response ? std::log(row.mean_T) : row.mean_T);
    }
    return {model, least_squares(x, y), model.describe()};
}

void write_scaling_csv(std::ostream& out, const ScalingTable& table) {
    const auto old_precision = out.precision(17);
    out << "n,trials,mean_T,std_T,mean_delay\n";
    for (const auto& r : table.rows) {
        out << r.n << ',' << r.trials << ',' << r.mean_T << ',' << r.std_T << ',' << r.mean_delay << '\n';
    }
    out.precision(old_precision);
}

std::vector<ScalingRow> read_scaling_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "n,trials,mean_T,std_T,mean_delay") {
        throw std::runtime_error("scaling csv: expected header 'n,trials,mean_T,std_T,mean_delay'");
    }
    std::vector<ScalingRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string f[5];
        for (auto& s : f) {
            if (!std::getline(fields, s, ',')) throw std::runtime_error("scaling csv: short row '" + line + "'");
        }
        std::string extra;
        if (std::getline(fields, extra)) throw std::runtime_error("scaling csv: long row '" + line + "'");
        ScalingRow r;
        try {
            std::size_t pos = 0;
            r.n = std::stoull(f[0], &pos);
            r.trials = std::stoull(f[1], &pos);
            r.mean_T = std::stod(f[2]);
            r.std_T = std::stod(f[3]);
            r.mean_delay = std::stod(f[4]);
        } catch (const std::exception&) {
            throw std::runtime_error("scaling csv: bad number in row '" + line + "'");
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace fadingsched::analysis
