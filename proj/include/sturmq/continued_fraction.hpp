#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sturmq/bigint.hpp"

namespace sturmq {

// Description of a slope alpha in (0,1). The CLI grammar is shared:
//   rat:p/q            exact rational
//   dec:0.xxxxx        decimal, parsed to a dyadic a/2^B at B bits
//   cf:m1,m2,...       explicit quotients
//   cf:(m1,...)*       periodic quotient pattern, expanded on demand
struct AlphaDesc {
    enum class Kind { rational, dyadic, quotients };

    Kind kind = Kind::rational;
    BigInt num = 0;                         // rational / dyadic numerator
    BigInt den = 1;                         // rational denominator or 2^bits
    unsigned bits = 0;                      // dyadic precision (kind == dyadic)
    std::vector<std::uint64_t> quotients;   // kind == quotients
    bool periodic = false;                  // quotient list repeats forever
    std::string text;                       // original description, for stamps

    static AlphaDesc from_rational(BigInt num, BigInt den);
    static AlphaDesc from_dyadic(BigInt numerator, unsigned bits);
    static AlphaDesc from_quotients(std::vector<std::uint64_t> ms, bool periodic);
};

AlphaDesc parse_alpha(const std::string& text, unsigned dyadic_bits = 192);

// Dyadic value (sqrt(5)-1)/2 truncated to `bits` bits: quotients all 1.
AlphaDesc golden_alpha(unsigned bits);

// Continued fraction expansion with convergent tables.
//
// quotients holds m_1..m_K. Convergents use the (p_0,q_0) = (0,1) convention,
// so q_1 = m_1 and q_k = m_k q_{k-1} + q_{k-2}. `exhausted` is set when the
// exact expansion of the source terminated before the stop predicate fired.
class ContinuedFraction {
public:
    using StopFn = std::function<bool(int k, const BigInt& qk)>;

    std::vector<BigInt> quotients;
    std::vector<BigInt> p;   // p_0..p_K
    std::vector<BigInt> q;   // q_0..q_K
    bool exhausted = false;
    AlphaDesc source;

    int depth() const { return static_cast<int>(quotients.size()); }

    // Appends quotients until stop(k, q_k) or the source is exhausted.
    void expand(const StopFn& stop);

    // Expands (if needed) until q_k > n.
    void ensure_q_exceeds(const BigInt& n);

private:
    friend ContinuedFraction cf_expand(const AlphaDesc&, const ContinuedFraction::StopFn&);
    BigInt rem_num_ = 0;      // Euclid state: remaining tail num/den
    BigInt rem_den_ = 0;
    std::size_t src_pos_ = 0; // next index into source.quotients
    void push_quotient(const BigInt& m);
    bool next_quotient(BigInt& m);
};

ContinuedFraction cf_expand(const AlphaDesc& alpha, const ContinuedFraction::StopFn& stop);

// The interval [q_{k-1}, q_k) containing n.
struct ContinuantWindow {
    int k = 0;
    BigInt q_prev;
    BigInt q_cur;
    BigInt n;
};

// Smallest k with q_k > n; then q_{k-1} <= n holds automatically. Expands the
// fraction further when needed; throws InsufficientExpansion if the source is
// exhausted first.
ContinuantWindow locate_n(ContinuedFraction& cf, const BigInt& n);

struct FundamentalInterval {
    int depth = 0;
    std::vector<std::uint64_t> prefix;
    BigRat lo;       // ascending endpoints
    BigRat hi;
    BigRat length;   // 1 / (q_k (q_k + q_{k-1}))
};

FundamentalInterval fundamental_interval(const std::vector<std::uint64_t>& prefix);

} // namespace sturmq
