#include "fadingsched/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fadingsched::special {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEps = 1e-16;

// Series gamma(a,x) x^-a e^x Gamma(a)^-1 expansion; converges fast for x < a + 1.
double lower_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw std::runtime_error("incomplete gamma series did not converge");
}

// Modified Lentz continued fraction for Q(a,x); valid for x >= a + 1.
double upper_continued_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
        }
    }
    throw std::runtime_error("incomplete gamma continued fraction did not converge");
}

void check_args(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("incomplete gamma: shape must be positive");
    if (!(x >= 0.0)) throw std::domain_error("incomplete gamma: argument must be non-negative");
}

}  // namespace

double gamma_p(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return lower_series(a, x);
    return 1.0 - upper_continued_fraction(a, x);
}

double gamma_q(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - lower_series(a, x);
    return upper_continued_fraction(a, x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_ccdf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace fadingsched::special
