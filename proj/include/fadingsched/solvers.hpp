#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "fadingsched/network.hpp"

namespace fadingsched::solvers {

using BigCount = boost::multiprecision::cpp_int;

struct SolveResult {
    network::ActivationVector best_x;
    std::size_t best_T = 0;
    /// Candidate activation vectors whose throughput was evaluated.
    std::uint64_t explored = 0;
    std::chrono::nanoseconds elapsed{0};
};

/// Raised when exhaustive search is asked to enumerate more than 2^n_guard subsets.
class GuardRefusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultExhaustiveGuard = 24;

/// Optimal throughput over all 2^n activation vectors. Ties go to the
/// numerically smallest bit pattern.
SolveResult exhaustive_optimal(const network::ChannelMatrix& m, const network::ModelParams& p,
                               std::size_t n_guard = kDefaultExhaustiveGuard);

/// Best activation among vectors of weight <= w_max. Requires n <= 64.
SolveResult weight_bounded_search(const network::ChannelMatrix& m, const network::ModelParams& p, std::size_t w_max);

/// ceil(log2 n), the default weight bound for light-tailed instances.
std::size_t log2_weight_bound(std::size_t n);

/// Exact sum_{i=0}^{w_max} C(n, i).
BigCount search_space_size(std::size_t n, std::size_t w_max);

/// log2 of log2(n) * 2^(log2(n)^2), the closed-form ceiling on the
/// weight-bounded search count.
double log2_search_count_bound(std::size_t n);

/// Adds, one at a time, the source that most increases throughput; stops
/// when no single addition helps. Ties go to the lowest index.
SolveResult greedy_insertion(const network::ChannelMatrix& m, const network::ModelParams& p);

}  // namespace fadingsched::solvers
