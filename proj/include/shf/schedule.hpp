// schedule.hpp
// Disorder-strength schedules: fixed beta, subcritical beta_hat/sqrt(R_N),
// and the critical window beta_N^2 = (1/R_N)(1 + theta/log N). R_N is
// always the exact lattice overlap sum, never the log asymptotic.

#pragma once

#include <string>

#include "shf/lattice.hpp"

namespace shf {

struct CouplingSchedule {
    enum class Regime { fixed, subcritical, critical_window };
    Regime regime = Regime::critical_window;
    double fixed_beta = 0.0;     // regime == fixed
    double beta_hat = 0.0;       // regime == subcritical, requires > 0 (0 allowed: no disorder)
    double theta = 0.0;          // regime == critical_window
    WalkKernel kernel = WalkKernel::make_simple();
    DisorderLaw law = DisorderLaw::gaussian();

    static CouplingSchedule fixed(double beta, WalkKernel k = WalkKernel::make_simple(),
                                  DisorderLaw l = DisorderLaw::gaussian());
    static CouplingSchedule subcritical(double beta_hat, WalkKernel k = WalkKernel::make_simple(),
                                        DisorderLaw l = DisorderLaw::gaussian());
    static CouplingSchedule critical(double theta, WalkKernel k = WalkKernel::make_simple(),
                                     DisorderLaw l = DisorderLaw::gaussian());

    // Disorder strength at lattice size N for the configured regime.
    double beta_at(int N) const;
    std::string regime_name() const;
    std::string describe() const;
};

// beta_hat / sqrt(R_N); usage error unless regime is subcritical.
double beta_subcritical(const CouplingSchedule& s, int N);

// sqrt((1/R_N)(1 + theta/log N)), the o(1) term taken as zero; domain
// error when 1 + theta/log N <= 0 (instructs a larger N).
double beta_critical(const CouplingSchedule& s, int N);

} // namespace shf
