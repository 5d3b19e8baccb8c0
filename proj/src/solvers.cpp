#include "fadingsched/solvers.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <vector>

namespace fadingsched::solvers {

namespace {

using network::ActivationVector;
using network::ChannelMatrix;
using network::ModelParams;
using Clock = std::chrono::steady_clock;

// Interference sums for every subset of a block of sources, per receiver:
// table[s * n + r] = sum_{k in s, k != r} gamma_{offset + k, r}.
std::vector<double> subset_interference(const ChannelMatrix& m, std::size_t offset, std::size_t width) {
    const std::size_t n = m.size();
    const std::size_t count = std::size_t{1} << width;
    std::vector<double> table(count * n, 0.0);
    for (std::size_t s = 1; s < count; ++s) {
        const std::size_t low = static_cast<std::size_t>(std::countr_zero(s));
        const std::size_t prev = s & (s - 1);
        const std::size_t src = offset + low;
        for (std::size_t r = 0; r < n; ++r) {
            table[s * n + r] = table[prev * n + r] + (r == src ? 0.0 : m.gain(src, r));
        }
    }
    return table;
}

// Interference summed in ascending source order, exactly like network::success_mask.
bool exact_success(const ChannelMatrix& m, const ModelParams& p, std::uint64_t mask, std::size_t i) {
    double interference = 0.0;
    for (std::uint64_t b = mask; b; b &= b - 1) {
        const auto k = static_cast<std::size_t>(std::countr_zero(b));
        if (k != i) interference += m.gain(k, i);
    }
    return network::receiver_succeeds(m.direct(i), interference, p);
}

std::size_t subset_throughput(const ChannelMatrix& m, const ModelParams& p, std::uint64_t mask) {
    std::size_t t = 0;
    for (std::uint64_t a = mask; a; a &= a - 1) {
        if (exact_success(m, p, mask, static_cast<std::size_t>(std::countr_zero(a)))) ++t;
    }
    return t;
}

// Table sums differ from the ascending-order sum only by rounding; verdicts
// this close to the threshold are recomputed in canonical order.
constexpr double kRecheckMargin = 1e-12;

// Next k-subset of {0..n-1} in increasing numeric order (Gosper's hack).
std::uint64_t next_combination(std::uint64_t v) {
    const std::uint64_t t = v | (v - 1);
    return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

}  // namespace

SolveResult exhaustive_optimal(const ChannelMatrix& m, const ModelParams& p, std::size_t n_guard) {
    p.validate();
    const std::size_t n = m.size();
    if (n > n_guard || n > 62) {
        throw GuardRefusal("exhaustive search over n = " + std::to_string(n) + " pairs needs 2^" + std::to_string(n) +
                           " subsets; guard is n <= " + std::to_string(n_guard));
    }
    const auto start = Clock::now();

    const std::size_t low_width = n / 2;
    const std::size_t high_width = n - low_width;
    const auto low = subset_interference(m, 0, low_width);
    const auto high = subset_interference(m, low_width, high_width);
    const std::uint64_t low_mask = (std::uint64_t{1} << low_width) - 1;

    std::vector<double> direct(n);
    for (std::size_t i = 0; i < n; ++i) direct[i] = m.direct(i);

    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t best_mask = 0;
    std::size_t best_t = 0;
    for (std::uint64_t mask = 1; mask < total; ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) <= best_t) continue;
        const double* lo_row = &low[(mask & low_mask) * n];
        const double* hi_row = &high[(mask >> low_width) * n];
        std::size_t t = 0;
        for (std::uint64_t a = mask; a; a &= a - 1) {
            const auto i = static_cast<std::size_t>(std::countr_zero(a));
            const double interference = lo_row[i] + hi_row[i];
            const double margin = direct[i] - p.beta * interference - p.beta * p.noise;
            if (std::fabs(margin) > kRecheckMargin * (direct[i] + p.beta * (interference + p.noise))) {
                t += margin > 0.0 ? 1 : 0;
            } else {
                t += exact_success(m, p, mask, i) ? 1 : 0;
            }
        }
        if (t > best_t) {
            best_t = t;
            best_mask = mask;
        }
    }

    SolveResult r;
    r.best_x = ActivationVector::from_mask(best_mask, n);
    r.best_T = best_t;
    r.explored = total;
    r.elapsed = Clock::now() - start;
    return r;
}

SolveResult weight_bounded_search(const ChannelMatrix& m, const ModelParams& p, std::size_t w_max) {
    p.validate();
    const std::size_t n = m.size();
    if (w_max > n) throw std::invalid_argument("w_max must not exceed n");
    if (n > 63) throw std::length_error("weight-bounded search supports at most 63 pairs");
    const auto start = Clock::now();

    std::uint64_t best_mask = 0;
    std::size_t best_t = 0;
    std::uint64_t explored = 1;  // the empty set
    const std::uint64_t limit = std::uint64_t{1} << n;
    for (std::size_t w = 1; w <= w_max; ++w) {
        for (std::uint64_t mask = (std::uint64_t{1} << w) - 1; mask < limit; mask = next_combination(mask)) {
            ++explored;
            const std::size_t t = subset_throughput(m, p, mask);
            if (t > best_t || (t == best_t && t > 0 && mask < best_mask)) {
                best_t = t;
                best_mask = mask;
            }
        }
    }

    SolveResult r;
    r.best_x = ActivationVector::from_mask(best_mask, n);
    r.best_T = best_t;
    r.explored = explored;
    r.elapsed = Clock::now() - start;
    return r;
}

std::size_t log2_weight_bound(std::size_t n) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    return static_cast<std::size_t>(std::bit_width(n - 1));
}

BigCount search_space_size(std::size_t n, std::size_t w_max) {
    if (w_max > n) throw std::invalid_argument("w_max must not exceed n");
    BigCount term = 1;
    BigCount sum = 1;
    for (std::size_t i = 1; i <= w_max; ++i) {
        term = term * (n - i + 1) / i;
        sum += term;
    }
    return sum;
}

double log2_search_count_bound(std::size_t n) {
    if (n < 2) throw std::invalid_argument("bound needs n >= 2");
    const double l = std::log2(static_cast<double>(n));
    return std::log2(l) + l * l;
}

SolveResult greedy_insertion(const ChannelMatrix& m, const ModelParams& p) {
    p.validate();
    const std::size_t n = m.size();
    const auto start = Clock::now();

    ActivationVector current(n);
    std::size_t current_t = 0;
    std::uint64_t explored = 0;
    for (;;) {
        std::size_t best_k = n;
        std::size_t best_t = current_t;
        for (std::size_t k = 0; k < n; ++k) {
            if (current[k]) continue;
            ActivationVector trial = current;
            trial.set(k);
            ++explored;
            const std::size_t t = network::throughput(m, trial, p);
            if (t > best_t) {
                best_t = t;
                best_k = k;
            }
        }
        if (best_k == n) break;
        current.set(best_k);
        current_t = best_t;
    }

    SolveResult r;
    r.best_x = std::move(current);
    r.best_T = current_t;
    r.explored = explored;
    r.elapsed = Clock::now() - start;
    return r;
}

}  // namespace fadingsched::solvers
