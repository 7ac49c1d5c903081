#include "sturmq/limit_laws.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sturmq/errors.hpp"
#include "sturmq/quadrature.hpp"

namespace sturmq {

namespace constants {
double pi() { return std::numbers::pi; }
double A() { return 12.0 / (std::numbers::pi * std::numbers::pi); }
double zeta2() { return std::numbers::pi * std::numbers::pi / 6.0; }
double levy_L() { return std::numbers::pi * std::numbers::pi / (12.0 * std::numbers::ln2); }
double kappa() { return std::exp(levy_L()); }

BigRat kappa_rational() {
    auto scaled = static_cast<long>(std::llround(kappa() * 1e9));
    return make_rat(BigInt(scaled), BigInt(1000000000L));
}
} // namespace constants

double omega(double x, double y) {
    if (y <= 0 || x + y <= 0) throw DomainError("omega pole: need y > 0 and x + y > 0");
    return 1.0 / (y * (x + y));
}

double psi(double x, double y) { return constants::A() * omega(x, y); }

double dilog(double x) {
    if (x < 0 || x > 1) throw DomainError("dilog argument outside [0,1]");
    if (x == 0) return 0.0;
    if (x == 1) return constants::zeta2();
    if (x > 0.5)
        return constants::zeta2() - std::log(x) * std::log1p(-x) - dilog(1.0 - x);
    double term = x, sum = x;
    for (int k = 2; k < 200; ++k) {
        term *= x;
        double add = term / (static_cast<double>(k) * k);
        sum += add;
        if (add < 1e-18 * sum) break;
    }
    return sum;
}

std::string to_string(Law law) {
    switch (law) {
    case Law::S: return "S";
    case Law::rho: return "rho";
    case Law::mu: return "mu";
    case Law::nu: return "nu";
    }
    return "?";
}

Law parse_law(const std::string& name) {
    if (name == "S") return Law::S;
    if (name == "rho") return Law::rho;
    if (name == "mu") return Law::mu;
    if (name == "nu") return Law::nu;
    throw DomainError("unknown law: " + name);
}

Law law_of(Gamma g) {
    switch (g) {
    case Gamma::rho: return Law::rho;
    case Gamma::mu: return Law::mu;
    case Gamma::nu: return Law::nu;
    }
    return Law::nu;
}

DensityLaw density_law(Law law) {
    switch (law) {
    case Law::S:
        return {law, 2.0, std::numeric_limits<double>::infinity(), {3.0}};
    case Law::rho:
        return {law, 0.0, 1.0, {0.0, 1.0}};
    case Law::mu:
        return {law, 0.0, 1.0, {0.5}};
    case Law::nu:
        return {law, 0.0, 1.0, {0.0, 1.0}};
    }
    throw DomainError("unknown law");
}

double density(Law law, double lambda) {
    const double A = constants::A();
    switch (law) {
    case Law::S:
        if (lambda < 2.0) return 0.0;
        if (lambda <= 3.0) return A * std::log(lambda - 1.0) / (lambda - 1.0);
        return A * std::log1p(1.0 / (lambda - 2.0)) / (lambda - 1.0);
    case Law::rho:
        if (lambda < 0.0 || lambda > 1.0) return 0.0;
        if (lambda == 0.0) return std::numeric_limits<double>::infinity();
        return A * std::fabs(std::log(lambda)) / (1.0 + lambda);
    case Law::mu: {
        if (lambda < 0.0 || lambda > 1.0) return 0.0;
        if (lambda == 0.0) return std::numeric_limits<double>::infinity();
        double t = lambda - 0.5;
        if (std::fabs(2.0 * lambda - 1.0) < 1e-6)
            return 2.0 * A * (1.0 - std::numbers::ln2) + 2.0 * A * (1.0 - 2.0 * std::numbers::ln2) * t;
        double ratio = (std::fabs(lambda - 1.0) < 1e-9)
                           ? 1.0 + 0.5 * (lambda - 1.0)   // log(l)/(l-1) near 1
                           : std::log(lambda) / (lambda - 1.0);
        return A * (2.0 * std::numbers::ln2 - ratio) / (2.0 * lambda - 1.0);
    }
    case Law::nu:
        if (lambda < 0.0 || lambda > 1.0) return 0.0;
        if (lambda < 1e-12) return A;   // log(1+l)/l -> 1
        return A * std::log1p(lambda) / lambda;
    }
    throw DomainError("unknown law");
}

double limit_cdf(Law law, double lambda) {
    const double A = constants::A();
    switch (law) {
    case Law::S:
        if (lambda <= 2.0) return 0.0;
        if (lambda <= 3.0) {
            double l = std::log(lambda - 1.0);
            return 0.5 * A * l * l;
        }
        return 1.0 - A * dilog(1.0 / (lambda - 1.0));
    case Law::rho: {
        if (lambda <= 0.0) return 0.0;
        if (lambda >= 1.0) return 1.0;
        double lp = std::log1p(lambda);
        return A * (-std::log(lambda) * lp + dilog(lambda / (1.0 + lambda)) + 0.5 * lp * lp);
    }
    case Law::nu: {
        if (lambda <= 0.0) return 0.0;
        if (lambda >= 1.0) return 1.0;
        double lp = std::log1p(lambda);
        return A * (dilog(lambda / (1.0 + lambda)) + 0.5 * lp * lp);
    }
    case Law::mu:
        if (lambda <= 0.0) return 0.0;
        if (lambda >= 1.0) return 1.0;
        return integrate_split([](double t) { return density(Law::mu, t); }, 0.0, lambda,
                               {0.5}, 1e-10);
    }
    throw DomainError("unknown law");
}

double cond_product_closed(Gamma gamma, double eps) {
    if (eps <= 0.0 || eps >= 1.0) throw Refused("eps must lie in (0,1)");
    const double A = constants::A();
    double L = std::fabs(std::log(eps));
    switch (gamma) {
    case Gamma::rho: return A * L + 1.0 - A * eps * L;
    case Gamma::mu: return A * L + (A / (1.0 - eps)) * eps * L;
    case Gamma::nu: return A * L + 1.0;
    }
    throw DomainError("unknown gamma");
}

double cond_expectation_asymptotic(Gamma gamma, double eps) {
    if (eps <= 0.0 || eps >= 1.0) throw Refused("eps must lie in (0,1)");
    const double A = constants::A();
    double C = 0.0;
    switch (gamma) {
    case Gamma::rho: C = 1.0; break;
    case Gamma::mu: C = 0.0; break;
    case Gamma::nu: C = 1.0; break;
    }
    return A * std::fabs(std::log(eps)) + C;
}

double fixed_k_limit_expectation(double mu_pos) {
    if (mu_pos <= 0.0 || mu_pos > 1.0) throw Refused("mu must lie in (0,1]");
    const double inv_log2 = 1.0 / std::numbers::ln2;
    double delta = 1.0 - mu_pos;
    if (delta < 1e-8)
        return 1.0 + inv_log2 * (1.0 + 0.5 * delta + delta * delta / 3.0);
    return 1.0 + std::fabs(std::log(mu_pos)) / (delta * std::numbers::ln2);
}

} // namespace sturmq
