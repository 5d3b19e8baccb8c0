#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fadingsched/dist.hpp"
#include "fadingsched/rng.hpp"

namespace fadingsched::network {

/// SINR threshold beta and noise power N0; transmit power is fixed at 1.
struct ModelParams {
    double beta = 1.0;
    double noise = 0.1;

    /// Throws std::invalid_argument unless beta > 0 and noise > 0.
    void validate() const;
};

/// On-off transmit decision per source.
class ActivationVector {
public:
    ActivationVector() = default;
    explicit ActivationVector(std::size_t n) : bits_(n, 0) {}

    /// Bit i of `mask` is x_i. Requires n <= 64.
    static ActivationVector from_mask(std::uint64_t mask, std::size_t n);
    static ActivationVector from_indices(std::span<const std::size_t> active, std::size_t n);

    std::size_t size() const noexcept { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool on = true) { bits_[i] = on ? 1 : 0; }

    std::size_t weight() const noexcept;
    std::vector<std::size_t> active() const;
    /// Inverse of from_mask. Requires size() <= 64.
    std::uint64_t to_mask() const;
    /// "0110..." with x_1 first.
    std::string to_string() const;

    /// Orders by the binary value sum x_i 2^i, used for deterministic tie-breaks.
    static bool numerically_less(const ActivationVector& a, const ActivationVector& b);

    bool operator==(const ActivationVector&) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// Where an instance came from, for reproducibility.
struct InstanceOrigin {
    std::string dist;
    std::uint64_t seed = 0;
};

/// Gain of the link from source `src` to destination `dst` in the instance
/// keyed by `seed`. Every link has its own counter-derived stream, so dense
/// and lazy views of the same (dist, seed) see identical values.
double link_gain(const dist::Distribution& d, std::uint64_t seed, std::size_t src, std::size_t dst);

/// Dense n x n realization; gain(i, j) is the power from S_i to D_j.
class ChannelMatrix {
public:
    /// Row-major gains, gains[i * n + j] = gamma_{i,j}. All entries must be
    /// finite and strictly positive.
    ChannelMatrix(std::size_t n, std::vector<double> gains, InstanceOrigin origin = {});

    std::size_t size() const noexcept { return n_; }
    double gain(std::size_t src, std::size_t dst) const { return gains_[src * n_ + dst]; }
    double direct(std::size_t i) const { return gains_[i * n_ + i]; }
    std::span<const double> gains() const noexcept { return gains_; }
    const InstanceOrigin& origin() const noexcept { return origin_; }

private:
    std::size_t n_;
    std::vector<double> gains_;
    InstanceOrigin origin_;
};

/// Largest n for which a dense matrix may be generated.
inline constexpr std::size_t kDenseLimit = 30000;

/// Same instance as generate_instance(n, d, seed) but cross gains are
/// regenerated on demand; only the n direct gains are stored.
class LazyChannel {
public:
    LazyChannel(std::size_t n, dist::Distribution d, std::uint64_t seed);

    std::size_t size() const noexcept { return direct_.size(); }
    double gain(std::size_t src, std::size_t dst) const {
        return src == dst ? direct_[src] : link_gain(dist_, seed_, src, dst);
    }
    double direct(std::size_t i) const { return direct_[i]; }
    InstanceOrigin origin() const { return {dist_.to_string(), seed_}; }

private:
    dist::Distribution dist_;
    std::uint64_t seed_;
    std::vector<double> direct_;
};

template <class C>
concept LinkGains = requires(const C& c, std::size_t i) {
    { c.size() } -> std::convertible_to<std::size_t>;
    { c.gain(i, i) } -> std::convertible_to<double>;
    { c.direct(i) } -> std::convertible_to<double>;
};

/// n^2 independent draws. Throws std::length_error above kDenseLimit.
ChannelMatrix generate_instance(std::size_t n, const dist::Distribution& d, std::uint64_t seed);

/// Receiver D_i succeeds iff gamma_ii - beta * I_i > beta * N0, where I_i is
/// the interference from the other active sources.
inline bool receiver_succeeds(double direct, double interference, const ModelParams& p) {
    return direct - p.beta * interference > p.beta * p.noise;
}

namespace detail {
void check_dims(std::size_t n, const ActivationVector& x);
}

/// gamma_ii / (N0 + sum_{k != i, x_k = 1} gamma_ki). Throws std::logic_error
/// when x_i = 0.
template <LinkGains C>
double sinr(const C& m, const ActivationVector& x, std::size_t i, const ModelParams& p) {
    detail::check_dims(m.size(), x);
    if (!x[i]) throw std::logic_error("sinr queried for an inactive pair");
    double interference = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (k != i && x[k]) interference += m.gain(k, i);
    }
    return m.direct(i) / (p.noise + interference);
}

/// Per-receiver success in the linear form; inactive receivers never succeed.
template <LinkGains C>
std::vector<std::uint8_t> success_mask(const C& m, const ActivationVector& x, const ModelParams& p) {
    detail::check_dims(m.size(), x);
    const auto act = x.active();
    std::vector<std::uint8_t> mask(m.size(), 0);
    for (std::size_t i : act) {
        double interference = 0.0;
        for (std::size_t k : act) {
            if (k != i) interference += m.gain(k, i);
        }
        mask[i] = receiver_succeeds(m.direct(i), interference, p) ? 1 : 0;
    }
    return mask;
}

/// Number of successful receivers.
template <LinkGains C>
std::size_t throughput(const C& m, const ActivationVector& x, const ModelParams& p) {
    std::size_t t = 0;
    for (auto b : success_mask(m, x, p)) t += b;
    return t;
}

/// Ax > b with row i holding receiver D_i's constraint:
/// A[i][i] = gamma_ii, A[i][j] = -beta * gamma_ji, b_i = beta * N0.
struct LinearSystem {
    std::size_t n = 0;
    std::vector<double> a;
    std::vector<double> b;

    double at(std::size_t row, std::size_t col) const { return a[row * n + col]; }

    /// Rows whose strict inequality holds for binary x.
    std::vector<std::uint8_t> satisfied_rows(const ActivationVector& x) const;
    /// Satisfied rows restricted to x_i = 1. Throws std::logic_error if an
    /// inactive row is ever satisfied (impossible while b > 0).
    std::size_t satisfied_active_rows(const ActivationVector& x) const;
};

LinearSystem build_linear_system(const ChannelMatrix& m, const ModelParams& p);

/// Debug dump: header "n,beta,n0,dist,seed", one metadata row, then n rows of
/// n gains at 17 significant digits.
void write_instance_csv(std::ostream& out, const ChannelMatrix& m, const ModelParams& p);

struct LoadedInstance {
    ChannelMatrix matrix;
    ModelParams params;
};

LoadedInstance read_instance_csv(std::istream& in);

}  // namespace fadingsched::network
