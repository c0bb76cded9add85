// lattice.hpp
// Random-walk kernels on Z^2, disorder laws with exact cumulant functions,
// and seeded disorder fields evaluated as pure functions of (seed, n, x).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shf/numeric.hpp"

namespace shf {

struct Offset {
    int dx, dy;
    double prob;
};

// Nearest-neighbour walk kernel. `simple` is the 4-neighbour walk with
// probability 1/4 each; `lazy` stays put with probability p_stay and moves
// like the simple walk otherwise (the aperiodic option).
struct WalkKernel {
    enum class Kind { simple, lazy };
    Kind kind = Kind::simple;
    double p_stay = 0.0;
    std::vector<Offset> step_support;

    static WalkKernel make_simple();
    static WalkKernel make_lazy(double p_stay = 0.5);

    // Per-coordinate variance of one step.
    double coord_variance() const;
    // True if the walk is supported on the parity sublattice (simple walk).
    bool parity_constrained() const { return kind == Kind::simple; }
    std::string name() const { return kind == Kind::simple ? "simple" : "lazy"; }
};

// Disorder marginal, normalised to mean 0, variance 1. `zero` is a
// diagnostic law (identically 0, variance 0) used by tests and calibration
// runs; it is exempt from the variance-1 normalisation.
struct DisorderLaw {
    enum class Kind { gaussian, rademacher, shifted_exponential, zero };
    Kind kind = Kind::gaussian;
    double rate = 1.0; // shifted_exponential pre-normalisation rate; the
                       // standardised law itself is rate-free.

    static DisorderLaw gaussian() { return {Kind::gaussian, 1.0}; }
    static DisorderLaw rademacher() { return {Kind::rademacher, 1.0}; }
    static DisorderLaw shifted_exponential(double rate = 1.0) {
        return {Kind::shifted_exponential, rate};
    }
    static DisorderLaw zero() { return {Kind::zero, 1.0}; }

    // Largest beta with finite cumulant (exclusive bound).
    double beta_bound() const;
    // Sample from a 64-bit counter hash; exact law, bit-deterministic.
    double sample(uint64_t h) const;
    std::string name() const;
};

// Log moment generating function lambda(beta) = log E[e^{beta omega}].
double lambda(const DisorderLaw& law, double beta);

// Replica pair weight sigma^2 = e^{lambda(2 beta) - 2 lambda(beta)} - 1.
double sigma2_pair(const DisorderLaw& law, double beta);

// Seeded i.i.d. disorder over a time-space window. Values are pure
// functions of (seed, n, x, y); nothing is stored.
struct DisorderField {
    uint64_t seed = 0;
    int n_min = 0, n_max = 0;     // valid time range (inclusive)
    int box_radius = 0;           // |x|_inf, |y|_inf <= box_radius
    DisorderLaw law;
    bool zero_disorder = false;   // test hook: omega forced to 0, law's
                                  // lambda still applies in weights

    uint64_t counter(int n, int x, int y) const {
        uint64_t h = mix64(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(n + 1)));
        return mix64(h ^ pack_site(x, y));
    }
    double value(int n, int x, int y) const {
        if (zero_disorder) return 0.0;
        return law.sample(counter(n, x, y));
    }
    // Bounds-checked access per the module contract.
    double value_checked(int n, int x, int y) const;
};

// Exact probability that two independent kernel walks coincide at time n,
// computed by dynamic programming on the difference walk. Results are
// memoised per kernel together with the prefix sums R_N.
double return_probability(const WalkKernel& kernel, int n);

// R_N = sum_{n=1..N} return_probability(n), exact lattice sum.
double overlap_sum(const WalkKernel& kernel, int N);

} // namespace shf
