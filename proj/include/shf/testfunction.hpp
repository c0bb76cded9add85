// testfunction.hpp
// Macroscopic test functions paired against partition fields and rescaled
// measures, plus the Riemann-sum pairings used throughout the experiments.

#pragma once

#include <string>
#include <vector>

#include "shf/engine.hpp"

namespace shf {

struct TestFunction {
    enum class Kind { indicator_box, gaussian_bump, indicator_ball, tabulated };
    Kind kind = Kind::gaussian_bump;
    double x0 = 0.0, y0 = 0.0;   // centre (macro units)
    double half_side = 0.5;      // indicator_box
    double radius = 0.5;         // indicator_ball
    double delta = 0.0625;       // gaussian bump width: phi = g_delta(. - x0)
    int grid_n = 0;              // tabulated: grid_n x grid_n over [-extent,extent]^2
    double extent = 0.0;
    std::vector<double> table;

    static TestFunction box(double half_side, double x0 = 0.0, double y0 = 0.0);
    static TestFunction bump(double delta, double x0 = 0.0, double y0 = 0.0);
    static TestFunction ball(double radius, double x0 = 0.0, double y0 = 0.0);
    static TestFunction tabulate(int grid_n, double extent, std::vector<double> values);

    double operator()(double x, double y) const;
    // Analytic integral (bump: 1; box: side^2; ball: pi r^2; tabulated: Riemann).
    double integral() const;
    // Radius beyond which the function is treated as zero.
    double support_radius() const;
    std::string describe() const;
};

// (1/N) sum_z phi(z/sqrt N) over the support: the exact finite-N mean of the
// phi x 1 measure functional (its continuum limit is the integral of phi).
double lattice_integral(const TestFunction& phi, int N);

// phi-average of a backward value field: Z_{N}(phi x 1) = (1/N) sum phi V.
// Domain error if the support is not covered by the field geometry.
double average_against(const ValueField& field, const TestFunction& phi, int N);

// phi-average of the log of a value field (the KPZ-side functional).
double average_log_against(const ValueField& field, const TestFunction& phi, int N);

// phi-average of a forward arrival slice (a probability-like measure).
double average_against(const PartitionSlice& slice, const TestFunction& phi, int N);

// (phi x psi)-average of a rescaled pair measure.
double average_against(const RescaledMeasure& measure, const TestFunction& phi,
                       const TestFunction& psi);

} // namespace shf
