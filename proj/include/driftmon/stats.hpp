// stats.hpp — exact and resampling statistics for the evaluation protocol:
// Wilson and Clopper-Pearson binomial intervals, seeded percentile bootstrap,
// and the two-sided Fisher exact test (probability-mass convention).
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace driftmon::stats {

enum class IntervalMethod { WILSON, CLOPPER_PEARSON, BOOTSTRAP };

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
    IntervalMethod method = IntervalMethod::WILSON;
    double confidence = 0.95;
};

// Two-sided standard normal quantile for the given confidence level.
// Acklam's rational approximation refined with one Halley step on erfc,
// accurate well past 1e-9.
double normal_quantile_two_sided(double confidence);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Inverse of I_x(a, b) by bisection to 1e-12.
double incomplete_beta_inv(double a, double b, double p);

// Wilson score interval, endpoints clamped to [0, 1].
// Errors: INVALID_COUNTS (k > n or n == 0), INVALID_CONFIDENCE.
Interval wilson_ci(std::uint64_t k, std::uint64_t n, double confidence = 0.95);

// Exact Clopper-Pearson interval via Beta quantiles; k=0 lower bound is 0 and
// k=n upper bound is 1 by convention.
Interval clopper_pearson_ci(std::uint64_t k, std::uint64_t n, double confidence = 0.95);

using Statistic = std::function<double(std::span<const double>)>;

// Percentile bootstrap with B resamples. Each resample draws its indices from
// a PRNG stream derived deterministically from (seed, resample index), so the
// result does not depend on evaluation order.
// Errors: EMPTY_SAMPLES, INVALID_CONFIDENCE.
Interval bootstrap_ci(const std::vector<double>& samples, const Statistic& statistic,
                      std::uint32_t resamples, double confidence, std::uint64_t seed);

// Two-sided Fisher exact p for the 2x2 table [[a, b], [c, d]]: the sum of
// hypergeometric probabilities of all tables with the same margins whose
// probability does not exceed that of the observed table. Log-space throughout.
// Errors: DEGENERATE_TABLE when a+b == 0 or c+d == 0.
double fisher_exact(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

// Deterministic cross-platform helpers shared by bootstrap and the negative
// generators. std::uniform_int_distribution is implementation-defined, so
// bounded draws use a 128-bit multiply on raw mt19937_64 output.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t bounded_draw(std::uint64_t raw, std::uint64_t n);

}  // namespace driftmon::stats
