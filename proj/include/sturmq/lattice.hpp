#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sturmq/bigint.hpp"
#include "sturmq/qfunc.hpp"

namespace sturmq {

// mu(0) = 0, mu(1) = 1, ... via a linear sieve.
std::vector<std::int8_t> mobius_sieve(std::size_t N);

enum class Rel { le, ge, lt, gt };

// Half-plane over scaled lattice coordinates, A a + B b + C n + off <= 0.
// Strict constraints are pre-shifted into `off`, so membership tests are
// exact integer comparisons.
struct HalfPlane {
    __int128 A = 0, B = 0, C = 0, off = 0;
};

// Conjunction of half-planes over one of two base regions:
//   rectangle:  a in [1, n],  b >= n+1        (x in (0,1], y > 1)
//   strip T_c:  1 <= a <= b,  n <= b < c n    (x <= y, 1 <= y < c)
class LatticeDomain {
public:
    static LatticeDomain rectangle();
    static LatticeDomain strip(const BigRat& c);

    // Adds { f rel threshold }, cleared of denominators. The denominator of f
    // is positive on R by construction, so the comparison direction is fixed.
    LatticeDomain& add_constraint(const QFunctionSpec& f, Rel rel, const BigRat& threshold);

    bool is_strip() const { return strip_; }
    const BigRat& strip_c() const { return c_; }
    const std::vector<HalfPlane>& planes() const { return planes_; }

    struct BInterval {
        std::int64_t lo = 0;
        std::optional<std::int64_t> hi;   // nullopt = unbounded above
        bool empty = false;
    };
    BInterval column(std::int64_t a, std::int64_t n) const;

    std::int64_t a_hi(std::int64_t n) const;     // upper end of the a range
    std::int64_t max_gcd(std::int64_t n) const;  // bound on gcd(a,b) over the domain
    bool bounded(std::int64_t n) const;
    bool contains(std::int64_t a, std::int64_t b, std::int64_t n) const;

private:
    std::vector<HalfPlane> planes_;
    bool strip_ = false;
    BigRat c_;
    std::int64_t strip_b_hi(std::int64_t n) const;
};

// Integrand evaluated on lattice points, including the 1/n^2 Riemann scaling:
// term(a, b, n) = g(a/n, b/n) / n^2.
class LatticeIntegrand {
public:
    virtual ~LatticeIntegrand() = default;
    virtual std::string name() const = 0;
    virtual double term(std::int64_t a, std::int64_t b, std::int64_t n) const = 0;
    virtual BigRat term_exact(std::int64_t a, std::int64_t b, std::int64_t n) const = 0;

    // Closed-form column sum over b = d*b' for b' in [b0, b1] at fixed a = d*a'
    // (b1 < 0 means the infinite tail). Enables the fast Mobius path and
    // truncation-free unbounded sums.
    virtual bool has_column_form() const { return false; }
    // Whether infinite column tails converge for this integrand.
    virtual bool summable_unbounded() const { return false; }
    virtual double column_sum(std::int64_t a1, std::int64_t b0, std::int64_t b1,
                              std::int64_t d, std::int64_t n) const;

    // Certified bound on the sum of all omitted rows b > b_cut over a <= n;
    // negative when unavailable (then unbounded pointwise sums are refused).
    virtual double tail_row_bound(std::int64_t b_cut, std::int64_t n) const;
};

const LatticeIntegrand& two_omega();           // 2/(y(x+y)), homogeneous of degree -2
const LatticeIntegrand& two_omega_times_fs();  // 2(1+x+y)/(y(x+y))

enum class Method { direct_gcd, mobius };

std::string to_string(Method m);

struct SumResult {
    double value = 0;
    double tail_bound = 0;            // certified truncation error, 0 when exact
    std::uint64_t terms = 0;          // accumulated terms (columns on the fast path)
    Method method = Method::mobius;
};

struct SumOptions {
    Method method = Method::mobius;
    double tol = 1e-4;                // tail tolerance for truncated sums
    bool use_column_form = true;
};

SumResult plain_riemann(const LatticeIntegrand& g, const LatticeDomain& dom,
                        std::int64_t n, const SumOptions& opts = {});

SumResult coprime_riemann(const LatticeIntegrand& g, const LatticeDomain& dom,
                          std::int64_t n, const SumOptions& opts = {});

// Exact rational coprime sum (pointwise, bounded domains only).
BigRat coprime_riemann_exact(const LatticeIntegrand& g, const LatticeDomain& dom,
                             std::int64_t n, Method method);

// P[Lambda_n <= lambda] as a coprime Riemann sum of 2*omega over
// Delta_f(lambda). Uses the bounded side of the dichotomy: either the domain
// itself or its complement in the rectangle (total mass 1), so the result is
// truncation-free whenever one side is bounded.
SumResult cdf_exact(const QFunctionSpec& spec, const BigRat& lambda, std::int64_t n,
                    const SumOptions& opts = {});

// P[Lambda_n >= lambda, Gamma_n >= eps].
SumResult joint_tail(const QFunctionSpec& spec_f, const BigRat& lambda,
                     const QFunctionSpec& spec_g, const BigRat& eps,
                     std::int64_t n, const SumOptions& opts = {});

// E[S_n | Gamma_n >= eps] = R^(2 omega f_S, {g >= eps}) / R^(2 omega, {g >= eps}).
// eps <= 0 is refused: the unconditional expectation is infinite.
double cond_expectation_exact(Gamma gamma, const BigRat& eps, std::int64_t n,
                              const SumOptions& opts = {});

// E[T_n]: mean number of continuants in [n, c n), the coprime sum of 2*omega
// over the strip T_c.
SumResult continuant_count_mean(std::int64_t n, const BigRat& c,
                                const SumOptions& opts = {});

// Conservative strong-decrease bound M_{2 omega} over strips [k, k+1],
// k_hi < 0 meaning all strips: max( sum 2/k^2, sum 6/k^3 ).
double m_bound_two_omega(std::int64_t k_lo = 1, std::int64_t k_hi = -1);

} // namespace sturmq
