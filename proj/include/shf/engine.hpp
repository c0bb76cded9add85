// engine.hpp
// Transfer-matrix evolution of polymer partition functions over truncated
// diffusive windows. Conventions (fixed, matched by the exact oracles):
//   point-to-point  Z_{M,N}(x,y): disorder weights at times M+1..N-1,
//                   no weight at the terminal time;
//   point-to-plane  Z_N(m,z): weights at times m+1..N inclusive.
// One step of the slice recursion is weight-then-spread: multiply the
// disorder weight at the slice's time, then convolve with the walk step.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shf/lattice.hpp"
#include "shf/schedule.hpp"

namespace shf {

// Raised when the evolution produces non-finite values or loses positivity.
struct numeric_error : std::runtime_error {
    int time;
    explicit numeric_error(const std::string& what, int t)
        : std::runtime_error(what), time(t) {}
};

struct SliceGeometry {
    int center_x = 0, center_y = 0;
    int radius = 0;
    int side() const { return 2 * radius + 1; }
    size_t cells() const { return static_cast<size_t>(side()) * side(); }
    bool contains(int x, int y) const {
        return std::abs(x - center_x) <= radius && std::abs(y - center_y) <= radius;
    }
    size_t index(int x, int y) const {
        return static_cast<size_t>(y - center_y + radius) * side() +
               static_cast<size_t>(x - center_x + radius);
    }
};

struct PartitionSlice {
    int time = 0;                // lattice time of the stored values
    int start_time = 0;
    int start_x = 0, start_y = 0;
    double beta = 0.0;
    SliceGeometry geom;
    std::vector<double> values;  // row-major over geom
    double lost_mass = 0.0;      // walk mass absorbed at the box boundary

    double at(int x, int y) const { return values[geom.index(x, y)]; }
    double total() const;
    double min_value() const;
    double max_value() const;
};

// Reusable evolution buffers (one per worker thread).
struct EngineWorkspace {
    std::vector<double> a, b;
};

// Point-to-plane partition function per the m+1..N convention. The returned
// slice holds the arrival-site masses at time N; its total is Z_N(m,z).
// box_radius_factor < 1 sets the severe-truncation flag on the slice via
// lost-mass accounting (callers inspect lost_mass).
PartitionSlice point_to_plane(const DisorderField& field, const CouplingSchedule& schedule,
                              int N, int m, int zx, int zy,
                              double box_radius_factor = 6.0,
                              EngineWorkspace* ws = nullptr);

// Forward slice of point-to-point values Z_{M,N}(x, .) over arrival sites
// (weights M+1..N-1).
PartitionSlice point_to_point_slice(const DisorderField& field, const CouplingSchedule& schedule,
                                    int scaling_N, int M, int N, int xx, int xy,
                                    double box_radius_factor = 6.0,
                                    EngineWorkspace* ws = nullptr);

// Single point-to-point value; parity-incompatible endpoints return exact 0
// and set *parity_flag.
double point_to_point(const DisorderField& field, const CouplingSchedule& schedule,
                      int scaling_N, int M, int N, int xx, int xy, int yx, int yy,
                      double box_radius_factor = 6.0, bool* parity_flag = nullptr,
                      EngineWorkspace* ws = nullptr);

// |Z_{M,N}(x,y) - sum_z Z_{M,K}(x,z) w(K,z) Z_{K,N}(z,y)| on untruncated
// windows, where w is the disorder weight at the gluing time. Exact identity;
// returns the relative residual.
double chapman_kolmogorov_check(const DisorderField& field, const CouplingSchedule& schedule,
                                int scaling_N, int M, int K, int N,
                                int xx, int xy, int yx, int yy);

// Backward value sweep: V(z) = sum_y Z_{M,H}(z,y) for every z in the target
// geometry, computed in one pass of duration H-M. This is the phi-average
// workhorse: Z_{N; M/N, H/N}(phi x 1) = N^{-1} sum_z phi(z/sqrt N) V(z).
// The geometry must already include the diffusive margin; values within
// margin of the boundary carry truncation deficit.
struct ValueField {
    int start_time = 0, horizon = 0;
    double beta = 0.0;
    SliceGeometry geom;
    std::vector<double> values;
    double at(int x, int y) const { return values[geom.index(x, y)]; }
};
ValueField value_field(const DisorderField& field, const CouplingSchedule& schedule,
                       int scaling_N, int M, int H, const SliceGeometry& geom,
                       EngineWorkspace* ws = nullptr);

// Pointwise natural log of a slice; zero or negative entries raise
// numeric_error (truncation-starved cell).
std::vector<double> log_field(const PartitionSlice& slice);
std::vector<double> log_field(const ValueField& field);

// ---------------------- rescaled pair measure ----------------------

// Process of rescaled random measures: mass(z,w) = Z_{[Ns],[Nt]}(z,w) / N per
// site pair, so that summing mass over a macroscopic region equals the measure
// of that region (the factor N of the measure density times the 1/N^2 cell
// area). Start sites z run over the macro box; arrival sites w over the box
// plus the diffusive margin.
struct RescaledMeasure {
    int N = 0;
    double s = 0.0, t = 0.0;
    SliceGeometry start_geom;  // z grid
    SliceGeometry end_geom;    // w grid
    std::vector<double> mass;  // [start_index][end_index], row-major
    double lost_mass = 0.0;

    double mass_at(size_t zi, size_t wi) const { return mass[zi * end_geom.cells() + wi]; }
};

RescaledMeasure rescaled_measure(const DisorderField& field, const CouplingSchedule& schedule,
                                 int N, double s, double t, double macro_box_radius,
                                 double box_radius_factor = 6.0);

// ---------------------- snapshot I/O ----------------------

// Binary grid file: magic "SHF1", u32 rows, u32 cols, f64 cell side,
// f64 time, then row-major little-endian f64.
struct GridSnapshot {
    uint32_t rows = 0, cols = 0;
    double cell_side = 0.0;
    double time = 0.0;
    std::vector<double> data;
};

void write_snapshot(const std::string& path, const GridSnapshot& snap);
GridSnapshot read_snapshot(const std::string& path);
void write_snapshot_metadata(const std::string& path, uint64_t seed,
                             const CouplingSchedule& schedule, int N, double lost_mass);

} // namespace shf
