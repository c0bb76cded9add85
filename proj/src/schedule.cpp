#include "shf/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace shf {

CouplingSchedule CouplingSchedule::fixed(double beta, WalkKernel k, DisorderLaw l) {
    if (beta < 0.0) throw std::domain_error("fixed schedule: beta must be >= 0");
    CouplingSchedule s;
    s.regime = Regime::fixed;
    s.fixed_beta = beta;
    s.kernel = std::move(k);
    s.law = std::move(l);
    return s;
}

CouplingSchedule CouplingSchedule::subcritical(double beta_hat, WalkKernel k, DisorderLaw l) {
    if (beta_hat < 0.0) throw std::domain_error("subcritical schedule: beta_hat must be >= 0");
    CouplingSchedule s;
    s.regime = Regime::subcritical;
    s.beta_hat = beta_hat;
    s.kernel = std::move(k);
    s.law = std::move(l);
    return s;
}

CouplingSchedule CouplingSchedule::critical(double theta, WalkKernel k, DisorderLaw l) {
    CouplingSchedule s;
    s.regime = Regime::critical_window;
    s.theta = theta;
    s.kernel = std::move(k);
    s.law = std::move(l);
    return s;
}

double beta_subcritical(const CouplingSchedule& s, int N) {
    if (s.regime != CouplingSchedule::Regime::subcritical)
        throw std::logic_error("beta_subcritical: schedule regime is " + s.regime_name());
    if (N < 1) throw std::domain_error("beta_subcritical: N must be >= 1");
    if (s.beta_hat == 0.0) return 0.0;
    return s.beta_hat / std::sqrt(overlap_sum(s.kernel, N));
}

double beta_critical(const CouplingSchedule& s, int N) {
    if (s.regime != CouplingSchedule::Regime::critical_window)
        throw std::logic_error("beta_critical: schedule regime is " + s.regime_name());
    if (N < 2) throw std::domain_error("beta_critical: N must be >= 2 (log N > 0)");
    const double window = 1.0 + s.theta / std::log(static_cast<double>(N));
    if (!(window > 0.0))
        throw std::domain_error("beta_critical: 1 + theta/log N <= 0 at N=" + std::to_string(N) +
                                ", theta=" + std::to_string(s.theta) + "; increase N");
    return std::sqrt(window / overlap_sum(s.kernel, N));
}

double CouplingSchedule::beta_at(int N) const {
    switch (regime) {
        case Regime::fixed: return fixed_beta;
        case Regime::subcritical: return beta_subcritical(*this, N);
        case Regime::critical_window: return beta_critical(*this, N);
    }
    return 0.0;
}

std::string CouplingSchedule::regime_name() const {
    switch (regime) {
        case Regime::fixed: return "fixed";
        case Regime::subcritical: return "subcritical";
        case Regime::critical_window: return "critical_window";
    }
    return "?";
}

std::string CouplingSchedule::describe() const {
    std::ostringstream os;
    os << regime_name();
    switch (regime) {
        case Regime::fixed: os << "(beta=" << fixed_beta << ")"; break;
        case Regime::subcritical: os << "(beta_hat=" << beta_hat << ")"; break;
        case Regime::critical_window: os << "(theta=" << theta << ")"; break;
    }
    os << " kernel=" << kernel.name() << " law=" << law.name();
    return os.str();
}

} // namespace shf
