#include "driftmon/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "driftmon/core.hpp"

namespace driftmon::stats {

namespace {

void check_counts(std::uint64_t k, std::uint64_t n) {
    if (n == 0) throw Error("INVALID_COUNTS", "n must be >= 1");
    if (k > n) throw Error("INVALID_COUNTS", "k cannot exceed n");
}

void check_confidence(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw Error("INVALID_CONFIDENCE", "confidence must lie in (0, 1)");
    }
}

// Acklam's inverse normal CDF approximation (relative error < 1.15e-9).
double inverse_normal_cdf(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    const double p_high = 1.0 - p_low;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= p_high) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley refinement against the exact erfc-based CDF.
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double eps = 1e-15;
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double normal_quantile_two_sided(double confidence) {
    check_confidence(confidence);
    double alpha = 1.0 - confidence;
    return inverse_normal_cdf(1.0 - alpha / 2.0);
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(ln_front) * beta_cf(a, b, x) / a;
    }
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          b * std::log(1.0 - x) + a * std::log(x)) *
                     beta_cf(b, a, 1.0 - x) / b;
}

double incomplete_beta_inv(double a, double b, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (incomplete_beta(a, b, mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

Interval wilson_ci(std::uint64_t k, std::uint64_t n, double confidence) {
    check_counts(k, n);
    check_confidence(confidence);
    double z = normal_quantile_two_sided(confidence);
    double nn = static_cast<double>(n);
    double p_hat = static_cast<double>(k) / nn;
    double z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = (p_hat + z2 / (2.0 * nn)) / denom;
    double half = z * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn)) / denom;
    Interval iv;
    iv.lower = std::clamp(center - half, 0.0, 1.0);
    iv.upper = std::clamp(center + half, 0.0, 1.0);
    // The boundary cases are exact; don't let rounding residue leak through.
    if (k == 0) iv.lower = 0.0;
    if (k == n) iv.upper = 1.0;
    iv.method = IntervalMethod::WILSON;
    iv.confidence = confidence;
    return iv;
}

Interval clopper_pearson_ci(std::uint64_t k, std::uint64_t n, double confidence) {
    check_counts(k, n);
    check_confidence(confidence);
    double alpha = 1.0 - confidence;
    Interval iv;
    iv.method = IntervalMethod::CLOPPER_PEARSON;
    iv.confidence = confidence;
    double nn = static_cast<double>(n);
    double kk = static_cast<double>(k);
    if (k == 0) {
        iv.lower = 0.0;
        // Closed form for the zero-success upper bound.
        iv.upper = 1.0 - std::pow(alpha / 2.0, 1.0 / nn);
    } else if (k == n) {
        iv.lower = std::pow(alpha / 2.0, 1.0 / nn);
        iv.upper = 1.0;
    } else {
        iv.lower = incomplete_beta_inv(kk, nn - kk + 1.0, alpha / 2.0);
        iv.upper = incomplete_beta_inv(kk + 1.0, nn - kk, 1.0 - alpha / 2.0);
    }
    return iv;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 on seed xor a stream offset.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t bounded_draw(std::uint64_t raw, std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(raw) * n) >> 64);
}

Interval bootstrap_ci(const std::vector<double>& samples, const Statistic& statistic,
                      std::uint32_t resamples, double confidence, std::uint64_t seed) {
    if (samples.empty()) throw Error("EMPTY_SAMPLES", "bootstrap requires at least one sample");
    if (resamples == 0) throw Error("EMPTY_SAMPLES", "B must be >= 1");
    check_confidence(confidence);

    const std::size_t n = samples.size();
    std::vector<double> stats(resamples);
    std::vector<double> resample(n);
    for (std::uint32_t b = 0; b < resamples; ++b) {
        std::mt19937_64 rng(mix_seed(seed, b));
        for (std::size_t i = 0; i < n; ++i) {
            resample[i] = samples[bounded_draw(rng(), n)];
        }
        stats[b] = statistic(std::span<const double>(resample));
    }
    std::sort(stats.begin(), stats.end());

    auto quantile = [&stats](double q) {
        if (stats.size() == 1) return stats[0];
        double h = q * static_cast<double>(stats.size() - 1);
        std::size_t lo = static_cast<std::size_t>(std::floor(h));
        std::size_t hi = std::min(lo + 1, stats.size() - 1);
        double frac = h - static_cast<double>(lo);
        return stats[lo] + frac * (stats[hi] - stats[lo]);
    };

    double alpha = 1.0 - confidence;
    Interval iv;
    iv.lower = quantile(alpha / 2.0);
    iv.upper = quantile(1.0 - alpha / 2.0);
    iv.method = IntervalMethod::BOOTSTRAP;
    iv.confidence = confidence;
    return iv;
}

double fisher_exact(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    if (a + b == 0 || c + d == 0) {
        throw Error("DEGENERATE_TABLE", "both row sums must be >= 1");
    }
    const double r1 = static_cast<double>(a + b);
    const double r2 = static_cast<double>(c + d);
    const double c1 = static_cast<double>(a + c);
    const double total = r1 + r2;

    auto log_choose = [](double n, double k) {
        return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    };
    const double log_denom = log_choose(total, c1);
    auto log_prob = [&](double x) {
        return log_choose(r1, x) + log_choose(r2, c1 - x) - log_denom;
    };

    const double x_min = std::max(0.0, c1 - r2);
    const double x_max = std::min(r1, c1);
    const double lp_obs = log_prob(static_cast<double>(a));

    // Sum all tables at least as extreme as observed (probability-mass rule);
    // the epsilon absorbs round-off on ties.
    const double tie_eps = 1e-7;
    double p = 0.0;
    for (double x = x_min; x <= x_max + 0.5; x += 1.0) {
        double lp = log_prob(x);
        if (lp <= lp_obs + tie_eps) p += std::exp(lp);
    }
    return std::min(p, 1.0);
}

}  // namespace driftmon::stats
