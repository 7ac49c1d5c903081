#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "sturmq/bigint.hpp"
#include "sturmq/continued_fraction.hpp"

namespace sturmq {

// The three position parameters usable as conditioning events.
enum class Gamma { rho, mu, nu };

std::string to_string(Gamma g);
Gamma parse_gamma(const std::string& name);

// f(x,y) = (a1 x + b1 y + c1) / (a2 x + b2 y + c2), nonnegative on the
// unbounded rectangle R = { 0 < x <= 1 < y }, with the denominator
// normalized to be positive on R.
//
// Coefficients are stored as integers (rational input is cleared of
// denominators, which leaves f unchanged).
struct QFunctionSpec {
    std::int64_t a1 = 0, b1 = 0, c1 = 0;
    std::int64_t a2 = 0, b2 = 0, c2 = 0;
    std::string name;

    // f_S = 1+x+y, f_rho = x/y, f_mu = (1-x)/(y-x), f_nu = 1/y
    static QFunctionSpec builtin(const std::string& name);
    static QFunctionSpec builtin(Gamma g);

    // Six rational literals "a1,b1,c1,a2,b2,c2"; validates the spec.
    static QFunctionSpec from_string(const std::string& text);
    static QFunctionSpec from_rationals(const std::array<BigRat, 6>& coeffs, std::string name);

    // Exact value at (x, y) = (qp/n, qc/n):
    //   (a1 qp + b1 qc + c1 n) / (a2 qp + b2 qc + c2 n).
    BigRat value_at(const BigInt& q_prev, const BigInt& q_cur, const BigInt& n) const;

    double value(double x, double y) const;

    bool depends_on_y() const { return b1 != 0 || b2 != 0; }
};

struct QValue {
    BigRat value;
    ContinuantWindow window;
    std::string spec_name;
};

QValue eval_q(const QFunctionSpec& spec, ContinuedFraction& cf, const BigInt& n);

// Exact identity and bound checks at one (alpha, n):
//   S = 1 + (1+rho)/nu,  2 + rho <= S <= 2 + 1/rho,  rho <= nu < 1,  mu in [0,1).
// Any violation indicates a locate_n or arithmetic bug and throws Error.
struct IdentityReport {
    BigRat S, rho, mu, nu;
    bool upper_bound_attained = false;   // n == q_{k-1}
};

IdentityReport check_identities(ContinuedFraction& cf, const BigInt& n);

} // namespace sturmq
