#pragma once

#include <string>
#include <vector>

#include "sturmq/qfunc.hpp"

namespace sturmq {

// Named constants, all computed from closed forms.
namespace constants {
double pi();
double A();        // 12/pi^2
double zeta2();    // pi^2/6
double levy_L();   // pi^2 / (12 log 2)
double kappa();    // exp(levy_L): the interval [n, kappa n) holds one continuant on average

// kappa rounded to the 1e-9 rational grid, usable as an exact lattice
// threshold and by the sampling comparators alike.
BigRat kappa_rational();
} // namespace constants

// omega(x,y) = 1/(y(x+y)) and its normalized version psi = (12/pi^2) omega.
double omega(double x, double y);
double psi(double x, double y);

// Li_2(x) = sum x^k/k^2 on [0,1]; |error| <= 1e-12 (series plus reflection).
double dilog(double x);

enum class Law { S, rho, mu, nu };

std::string to_string(Law law);
Law parse_law(const std::string& name);
Law law_of(Gamma g);

struct DensityLaw {
    Law law;
    double support_lo;
    double support_hi;                   // +inf for S
    std::vector<double> singular_points; // formula changes / derivative blow-ups
};

DensityLaw density_law(Law law);

// Limit densities (12/pi^2) J_f(lambda); 0 outside the support.
// The removable point of the mu law at 1/2 evaluates through a series guard.
double density(Law law, double lambda);

// F_inf(lambda) = (12/pi^2) I_f(lambda): closed antiderivatives for S, rho,
// nu; quadrature with singularity splits for mu. Absolute error <= 1e-8.
double limit_cdf(Law law, double lambda);

// E_psi[f_S | f_Gamma >= eps] * P_psi[f_Gamma >= eps], the tabulated closed
// forms (A = 12/pi^2):
//   rho: A|log eps| + 1 - A eps |log eps|
//   mu : A|log eps| + (A/(1-eps)) eps |log eps|
//   nu : A|log eps| + 1
double cond_product_closed(Gamma gamma, double eps);

// A |log eps| + C(Gamma) with C(nu) = +1, C(mu) = 0, C(rho) = +1; the error
// term is O(1/(eps n) + eps log^2 eps) at eps = eps(n).
double cond_expectation_asymptotic(Gamma gamma, double eps);

// Fixed-depth model: lim_k E[S_k at barycentric position mu]
//   = 1 + |log mu| / ((1-mu) log 2), and 1 + 1/log 2 at mu = 1.
double fixed_k_limit_expectation(double mu_pos);

} // namespace sturmq
