// numeric.hpp
// Low-level numerics shared across the lab: counter hashing, exact-law
// transforms, special functions, quadrature, and deterministic summation.

#pragma once

#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace shf {

// ---------------------- counter hashing ----------------------

// splitmix64 finalizer; full-avalanche mix for counter-based streams.
inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Pack a signed lattice site into one 64-bit counter word.
inline uint64_t pack_site(int32_t x, int32_t y) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(x)) << 32) |
           static_cast<uint64_t>(static_cast<uint32_t>(y));
}

// Uniform in (0,1), 53-bit mantissa, never returns 0 or 1.
inline double u64_to_unit(uint64_t h) {
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// ---------------------- special functions ----------------------

// Inverse standard-normal CDF (Wichura's PPND16), |error| < 1e-15.
double normal_icdf(double p);

// log(x) for finite normal x > 0; branch-free, ~1 ulp, auto-vectorizable.
inline double fast_log(double x) {
    uint64_t bits;
    __builtin_memcpy(&bits, &x, 8);
    int64_t e = static_cast<int64_t>((bits >> 52) & 0x7ff) - 1023;
    bits = (bits & 0x000fffffffffffffULL) | 0x3ff0000000000000ULL;
    double m;
    __builtin_memcpy(&m, &bits, 8);
    // renormalise m into [1/sqrt2, sqrt2)
    const bool big = m > 1.4142135623730951;
    m = big ? 0.5 * m : m;
    e = big ? e + 1 : e;
    const double z = (m - 1.0) / (m + 1.0);
    const double z2 = z * z;
    double p = 1.0 / 21.0;
    p = p * z2 + 1.0 / 19.0;
    p = p * z2 + 1.0 / 17.0;
    p = p * z2 + 1.0 / 15.0;
    p = p * z2 + 1.0 / 13.0;
    p = p * z2 + 1.0 / 11.0;
    p = p * z2 + 1.0 / 9.0;
    p = p * z2 + 1.0 / 7.0;
    p = p * z2 + 1.0 / 5.0;
    p = p * z2 + 1.0 / 3.0;
    p = p * z2 + 1.0;
    constexpr double ln2_hi = 6.93147180369123816490e-01;
    constexpr double ln2_lo = 1.90821492927058770002e-10;
    const double ed = static_cast<double>(e);
    return (ed * ln2_lo + 2.0 * z * p) + ed * ln2_hi;
}

// cos(2 pi u) for u in [0,1); branch-free, |error| < 4e-15.
inline double fast_cos2pi(double u) {
    const double k = std::nearbyint(4.0 * u);       // quadrant 0..4
    const double x = 6.283185307179586477 * (u - 0.25 * k);
    const int q = static_cast<int>(k) & 3;
    const double x2 = x * x;
    double c = 1.0 / 20922789888000.0;              // 1/16!
    c = c * x2 - 1.0 / 87178291200.0;
    c = c * x2 + 1.0 / 479001600.0;
    c = c * x2 - 1.0 / 3628800.0;
    c = c * x2 + 1.0 / 40320.0;
    c = c * x2 - 1.0 / 720.0;
    c = c * x2 + 1.0 / 24.0;
    c = c * x2 - 0.5;
    c = c * x2 + 1.0;
    double s = -1.0 / 1307674368000.0;              // -1/15!
    s = s * x2 + 1.0 / 6227020800.0;
    s = s * x2 - 1.0 / 39916800.0;
    s = s * x2 + 1.0 / 362880.0;
    s = s * x2 - 1.0 / 5040.0;
    s = s * x2 + 1.0 / 120.0;
    s = s * x2 - 1.0 / 6.0;
    s = s * x2 + 1.0;
    s *= x;
    const double from_sin = (q == 1) ? -s : s;      // q==3: +s
    const double from_cos = (q == 2) ? -c : c;      // q==0: +c
    return (q & 1) ? from_sin : from_cos;
}

// Standard normal from one 64-bit counter via Box-Muller (radius from h,
// angle from a decorrelated second hash). Exact law up to the ~1e-15
// transform error; pure function of h.
inline double gaussian_from_counter(uint64_t h) {
    const double u1 = u64_to_unit(h);
    const double u2 = u64_to_unit(mix64(h ^ 0x6a09e667f3bcc909ULL));
    return std::sqrt(-2.0 * fast_log(u1)) * fast_cos2pi(u2);
}

// Standard normal CDF via erfc.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// exp(x) with < 4e-16 relative error for |x| < 700; branch-free in the
// common range, auto-vectorizable.
inline double fast_exp(double x) {
    if (x > 709.0) return std::numeric_limits<double>::infinity();
    if (x < -745.0) return 0.0;
    constexpr double log2e = 1.4426950408889634074;
    constexpr double ln2_hi = 6.93147180369123816490e-01;
    constexpr double ln2_lo = 1.90821492927058770002e-10;
    const double kd = std::nearbyint(x * log2e);
    const int64_t k = static_cast<int64_t>(kd);
    const double r = (x - kd * ln2_hi) - kd * ln2_lo;
    // Taylor to r^13/13!; max term ~1.7e-16 at |r| = ln2/2.
    double p = 1.0 / 6227020800.0;
    p = p * r + 1.0 / 479001600.0;
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    // 2^k split in two factors so the subnormal edge stays exact.
    const int64_t k1 = k / 2, k2 = k - k1;
    uint64_t u1 = static_cast<uint64_t>(1023 + k1) << 52;
    uint64_t u2 = static_cast<uint64_t>(1023 + k2) << 52;
    double s1, s2;
    __builtin_memcpy(&s1, &u1, 8);
    __builtin_memcpy(&s2, &u2, 8);
    return p * s1 * s2;
}

// Exponential integral E1(x), x > 0.
double expint_e1(double x);

// Kolmogorov distribution: P(sup|B| <= lambda); used for KS p-values.
double kolmogorov_cdf(double lambda);

inline constexpr double euler_gamma = 0.57721566490153286061;

// ---------------------- quadrature ----------------------

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

// Adaptive Gauss-Kronrod 7/15 on [a,b].
QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, double rel_tol = 1e-12,
                        int max_intervals = 4000);

// Tanh-sinh (double-exponential) rule on [a,b]; independent node family,
// robust to integrable endpoint behaviour.
QuadResult integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-12, int max_level = 12);

// ---------------------- deterministic accumulation ----------------------

// Neumaier compensated accumulator; result depends only on the add order.
struct NeumaierSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x)) c += (s - t) + x;
        else c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

double neumaier_total(const std::vector<double>& xs);

} // namespace shf
