// oracles.hpp
// Exact, simulation-free ground truth: brute-force path enumeration,
// polynomial chaos expansion over small windows, and replica-pair second
// moments via the collision-time renewal recursion on the difference walk.

#pragma once

#include <optional>
#include <vector>

#include "shf/engine.hpp"
#include "shf/schedule.hpp"
#include "shf/testfunction.hpp"

namespace shf {

// Exact expectation over all kernel paths of the disorder weight product.
// Point-to-plane convention (weights M+1..N inclusive); refuses N-M > 8.
double enumerate_point_to_plane(const DisorderField& field, const WalkKernel& kernel,
                                double beta, int M, int N, int zx, int zy);

// Point-to-point convention (weights M+1..N-1, endpoint indicator).
double enumerate_point_to_point(const DisorderField& field, const WalkKernel& kernel,
                                double beta, int M, int N, int xx, int xy, int yx, int yy);

// ---------------------- polynomial chaos ----------------------

struct ChaosSite {
    int n, x, y;
};

// Multilinear expansion Z = sum_T psi_T prod_{s in T} eta_s over subsets of
// the window sites, eta_s = e^{beta omega_s - lambda} - 1. psi_T is the walk
// probability of visiting every site of T (zero when two sites share a
// time). Exact identity with the windowed path enumeration.
struct ChaosExpansion {
    std::vector<ChaosSite> sites;
    std::vector<double> coeff;  // indexed by subset bitmask, size 2^sites
    double beta = 0.0;
    int start_time = 0, start_x = 0, start_y = 0;
    int horizon = 0;
    std::optional<std::pair<int, int>> endpoint; // point-to-point variant
    int max_order = 0;
};

// Build the expansion for the window of all sites reachable from the start
// within `horizon` weighted times. Refuses windows above 20 sites.
ChaosExpansion chaos_expand(const WalkKernel& kernel, double beta, int M, int zx, int zy,
                            int horizon, std::optional<std::pair<int, int>> endpoint = {});

// Restrict to an explicit site list (weights applied only inside the
// window); pairs with enumerate_windowed below.
ChaosExpansion chaos_expand_window(const WalkKernel& kernel, double beta, int M, int zx, int zy,
                                   int horizon, std::vector<ChaosSite> window,
                                   std::optional<std::pair<int, int>> endpoint = {});

double chaos_evaluate(const ChaosExpansion& exp, const DisorderField& field);

// Path enumeration with weights restricted to the expansion's window.
double enumerate_windowed(const ChaosExpansion& exp, const DisorderField& field,
                          const WalkKernel& kernel);

// ---------------------- exact second moments ----------------------

// E[Z_N(x) Z_N(x+offset)] = E[(1+sigma^2)^{L}] by the renewal recursion over
// collision times of the difference walk; collisions counted at times
// 1..collision_horizon (default N, the point-to-plane convention).
double second_moment_exact(const WalkKernel& kernel, const DisorderLaw& law, double beta,
                           int N, int offset_x, int offset_y, int collision_horizon = -1);

// Exact second moment of the flat functional Z_{N;M/N,H/N}(phi x 1)
// (weights M+1..H-1). Uses the separable difference-coordinate DP; simple
// kernel only. Refuses when the cost estimate exceeds ~2e10 inner updates.
double second_moment_flat(const CouplingSchedule& schedule, int N, int M, int H,
                          const TestFunction& phi);

// Variance part of second_moment_flat (second moment minus squared mean),
// computed directly from the collision sum for conditioning.
double variance_flat_exact(const CouplingSchedule& schedule, int N, int M, int H,
                           const TestFunction& phi);

// Brute-force E[(1+sigma^2)^L] by enumerating all path pairs (16^N terms);
// N <= 3. Validates the renewal DP.
double second_moment_pair_enumeration(const WalkKernel& kernel, const DisorderLaw& law,
                                      double beta, int N, int offset_x, int offset_y,
                                      int collision_horizon = -1);

// sigma^2 (1 + M(k)) profile of the collision renewal: the lattice shadow of
// the Volterra primitive 4 pi int_0^tau G_theta. k runs 1..K.
std::vector<double> renewal_weight_profile(const WalkKernel& kernel, double sigma2, int K);

} // namespace shf
