// analytics.hpp
// Continuum-side formulas: heat kernel (generator Delta/2), the Volterra
// function G_theta and its primitive, the one-time covariance kernels of the
// critical measure limit, Edwards-Wilkinson kernels, and the closed-form
// limit parameters. Every KernelEvaluation is produced by two independent
// quadrature schemes whose agreement is folded into the error estimate.

#pragma once

#include <string>

#include "shf/numeric.hpp"
#include "shf/testfunction.hpp"

namespace shf {

struct KernelEvaluation {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::string method;
    bool singular = false;   // on-diagonal request: value not finite
    bool flagged = false;    // wide error bar / unconverged quadrature
};

// Heat kernel on R^2 for generator Delta/2: g_t(x) = (2 pi t)^{-1} e^{-|x|^2/(2t)}.
double heat_kernel(double t, double x, double y);

// Volterra function G_theta(t) = int_0^inf e^{(theta-gamma)s} s t^{s-1}/Gamma(s+1) ds.
KernelEvaluation volterra_G(double theta, double t);

// Primitive H_theta(x) = int_0^x G_theta(u) du = int_0^inf e^{(theta-gamma)s} x^s/Gamma(s+1) ds.
// Smooth at x=0 (H -> 0); the natural object for time-integrated kernels.
KernelEvaluation volterra_H(double theta, double x);

// Fast single-scheme H_theta for use inside outer quadratures.
double volterra_H_value(double theta, double x);

// Covariance kernel of the one-time critical measure,
//   K_t(x,x';y,y') = 4 pi g_{t/2}(mid) iint_{0<a<b<t} g_{2a}(x'-x) G(b-a) g_{2(t-b)}(y'-y),
// by 2D adaptive quadrature in (a, u=b-a). Singular when x=x' or y=y'.
KernelEvaluation covariance_kernel(double theta, double t, double x1, double y1, double x2,
                                   double y2, double yx1, double yy1, double yx2, double yy2);

// (y,y')-marginalised one-time covariance density at separation r:
//   4 pi int_0^t g_{2a}(r) H_theta(t-a) da.  Singular at r=0.
KernelEvaluation variance_flat(double theta, double t, double r);

// Same value through the independent 2D (a,u) route with G_theta; used by the
// internal consistency checks.
KernelEvaluation variance_flat_2d(double theta, double t, double r);

// sigma^2 of the subcritical log-normal limit: log(1/(1-beta_hat^2)).
double subcritical_sigma2(double beta_hat);

// sigma^2 of the small-ball log-normal limit: log(1+rho).
double smallball_sigma2(double rho);

// Edwards-Wilkinson kernel K_t(r) = int_0^t e^{-r^2/(2u)}/(2u) du = E1(r^2/(2t))/2.
KernelEvaluation ew_kernel(double t, double r);

// Additive-SHE covariance C_t(r) = int_0^t g_{2s}(r) ds = E1(r^2/(4t))/(4 pi).
double additive_she_covariance(double t, double r);

enum class EWRegime { theta_limit, subcritical };

// Double quadrature of phi against the regime kernel:
//   theta_limit:  iint phi K_t phi   (the theta -> -inf Gaussian limit)
//   subcritical:  (1-beta_hat^2)^{-1} iint phi C_t phi
KernelEvaluation ew_variance(double t, const TestFunction& phi, EWRegime regime,
                             double beta_hat = 0.0);

// iint phi(x) variance_flat(theta,t,|x-x'|) phi(x') dx dx' — the continuum
// target for the exact lattice flat variance.
KernelEvaluation variance_flat_pairing(double theta, double t, const TestFunction& phi);

} // namespace shf
