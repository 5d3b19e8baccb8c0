#include "fadingsched/network.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fadingsched::network {

void ModelParams::validate() const {
    if (!(std::isfinite(beta) && beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    if (!(std::isfinite(noise) && noise > 0.0)) throw std::invalid_argument("noise power N0 must be > 0");
}

ActivationVector ActivationVector::from_mask(std::uint64_t mask, std::size_t n) {
    if (n > 64) throw std::length_error("from_mask supports at most 64 pairs");
    ActivationVector x(n);
    for (std::size_t i = 0; i < n; ++i) x.bits_[i] = (mask >> i) & 1U;
    return x;
}

ActivationVector ActivationVector::from_indices(std::span<const std::size_t> active, std::size_t n) {
    ActivationVector x(n);
    for (std::size_t i : active) {
        if (i >= n) throw std::out_of_range("activation index out of range");
        x.bits_[i] = 1;
    }
    return x;
}

std::size_t ActivationVector::weight() const noexcept {
    std::size_t w = 0;
    for (auto b : bits_) w += b;
    return w;
}

std::vector<std::size_t> ActivationVector::active() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) out.push_back(i);
    }
    return out;
}

std::uint64_t ActivationVector::to_mask() const {
    if (bits_.size() > 64) throw std::length_error("to_mask supports at most 64 pairs");
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) mask |= std::uint64_t{1} << i;
    }
    return mask;
}

std::string ActivationVector::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
}

bool ActivationVector::numerically_less(const ActivationVector& a, const ActivationVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("activation vectors differ in length");
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a.bits_[i] != b.bits_[i]) return a.bits_[i] < b.bits_[i];
    }
    return false;
}

double link_gain(const dist::Distribution& d, std::uint64_t seed, std::size_t src, std::size_t dst) {
    RandomSource rng(child_seed(seed, src, dst));
    return d.sample(rng);
}

ChannelMatrix::ChannelMatrix(std::size_t n, std::vector<double> gains, InstanceOrigin origin)
    : n_(n), gains_(std::move(gains)), origin_(std::move(origin)) {
    if (n_ == 0) throw std::invalid_argument("channel matrix needs at least one pair");
    if (gains_.size() != n_ * n_) throw std::invalid_argument("channel matrix must hold n*n gains");
    for (double g : gains_) {
        if (!(std::isfinite(g) && g > 0.0)) throw std::invalid_argument("channel gains must be finite and > 0");
    }
}

LazyChannel::LazyChannel(std::size_t n, dist::Distribution d, std::uint64_t seed)
    : dist_(std::move(d)), seed_(seed), direct_(n) {
    if (n == 0) throw std::invalid_argument("channel needs at least one pair");
    for (std::size_t i = 0; i < n; ++i) direct_[i] = link_gain(dist_, seed_, i, i);
}

ChannelMatrix generate_instance(std::size_t n, const dist::Distribution& d, std::uint64_t seed) {
    if (n > kDenseLimit) {
        throw std::length_error("dense instance with n = " + std::to_string(n) + " exceeds the limit of " +
                                std::to_string(kDenseLimit));
    }
    std::vector<double> gains(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) gains[i * n + j] = link_gain(d, seed, i, j);
    }
    return ChannelMatrix(n, std::move(gains), {d.to_string(), seed});
}

namespace detail {
void check_dims(std::size_t n, const ActivationVector& x) {
    if (x.size() != n) throw std::invalid_argument("activation vector length does not match the instance");
}
}  // namespace detail

std::vector<std::uint8_t> LinearSystem::satisfied_rows(const ActivationVector& x) const {
    detail::check_dims(n, x);
    std::vector<std::uint8_t> rows(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (x[j]) lhs += at(i, j);
        }
        rows[i] = lhs > b[i] ? 1 : 0;
    }
    return rows;
}

std::size_t LinearSystem::satisfied_active_rows(const ActivationVector& x) const {
    const auto rows = satisfied_rows(x);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i]) continue;
        if (!x[i]) throw std::logic_error("inactive row satisfied; b must be positive");
        ++count;
    }
    return count;
}

LinearSystem build_linear_system(const ChannelMatrix& m, const ModelParams& p) {
    p.validate();
    LinearSystem sys;
    sys.n = m.size();
    sys.a.resize(sys.n * sys.n);
    sys.b.assign(sys.n, p.beta * p.noise);
    for (std::size_t i = 0; i < sys.n; ++i) {
        for (std::size_t j = 0; j < sys.n; ++j) {
            sys.a[i * sys.n + j] = i == j ? m.direct(i) : -p.beta * m.gain(j, i);
        }
    }
    return sys;
}

void write_instance_csv(std::ostream& out, const ChannelMatrix& m, const ModelParams& p) {
    const auto old_precision = out.precision(17);
    out << "n,beta,n0,dist,seed\n";
    out << m.size() << ',' << p.beta << ',' << p.noise << ",\"" << m.origin().dist << "\"," << m.origin().seed << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (j) out << ',';
            out << m.gain(i, j);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::runtime_error(std::string("instance csv: bad ") + what + " '" + s + "'");
    }
    return v;
}

}  // namespace

LoadedInstance read_instance_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"n", "beta", "n0", "dist", "seed"}) {
        throw std::runtime_error("instance csv: expected header 'n,beta,n0,dist,seed'");
    }
    if (!std::getline(in, line)) throw std::runtime_error("instance csv: missing metadata row");
    const auto meta = split_csv_line(line);
    if (meta.size() != 5) throw std::runtime_error("instance csv: metadata row needs 5 fields");
    const auto n = parse_number<std::size_t>(meta[0], "n");
    ModelParams p{parse_number<double>(meta[1], "beta"), parse_number<double>(meta[2], "n0")};
    InstanceOrigin origin{meta[3], parse_number<std::uint64_t>(meta[4], "seed")};

    std::vector<double> gains;
    gains.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("instance csv: truncated gain rows");
        const auto row = split_csv_line(line);
        if (row.size() != n) throw std::runtime_error("instance csv: gain row " + std::to_string(i) + " has wrong width");
        for (const auto& f : row) gains.push_back(parse_number<double>(f, "gain"));
    }
    p.validate();
    return {ChannelMatrix(n, std::move(gains), std::move(origin)), p};
}

}  // namespace fadingsched::network
