#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "sturmq/bigint.hpp"
#include "sturmq/continued_fraction.hpp"
#include "sturmq/lattice.hpp"
#include "sturmq/qfunc.hpp"

namespace sturmq {

// Counter-based PRNG (Philox 4x32-10). A block is pure in (key, counter), so
// streams jump ahead for free and parallel strata own disjoint counter
// ranges. No global state.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t counter_hi,
                                        std::uint64_t counter_lo);

// Seeded uniform sampler of B-bit dyadic slopes alpha = a/2^B in (0,1).
class AlphaSource {
public:
    explicit AlphaSource(std::uint64_t seed, unsigned bits = 128)
        : seed_(seed), bits_(bits) {
        if (bits < 64) throw DomainError("AlphaSource needs at least 64 bits");
    }

    std::uint64_t seed() const { return seed_; }
    unsigned bits() const { return bits_; }
    std::uint64_t position() const { return counter_; }

    // Disjoint substream (counter-partitioned by the stratum id).
    AlphaSource substream(std::uint32_t stratum) const {
        AlphaSource s(*this);
        s.stratum_ = stratum;
        s.counter_ = 0;
        return s;
    }

    // Next numerator a in (0, 2^B); deterministic per stream position.
    BigInt next_numerator();

    // Numerator at an absolute stream position (pure in (seed, stratum,
    // index)); the audit half holds the refinement bits for precision audits.
    BigInt numerator_at(std::uint64_t index, bool audit_half = false) const;

    // Auxiliary B bits extending the draw at `position` to 2B bits.
    BigInt audit_extension(std::uint64_t position) const;

    static constexpr unsigned kStrata = 64;   // fixed stratification

private:
    std::uint64_t seed_ = 0;
    unsigned bits_ = 128;
    std::uint32_t stratum_ = 0;
    std::uint64_t counter_ = 0;
};

AlphaDesc sample_alpha(AlphaSource& src);

// Equal-width histogram over [lo, hi]; scaled bins integrate to 1 over the
// binned range once scale() ran.
struct Histogram {
    double lo = 0, hi = 0, step = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t underflow = 0, overflow = 0;
    std::uint64_t total = 0;        // accepted samples
    std::uint64_t resampled = 0;    // degenerate draws replaced
    std::uint64_t audit_failures = 0;
    std::vector<double> scaled;

    void scale();
};

Histogram mc_histogram(const QFunctionSpec& spec, std::int64_t n, std::uint64_t M,
                       double step, AlphaSource src, double lo, double hi);

// Exact-lattice secant of F_n: (F_n(lambda+eps) - F_n(lambda)) / eps.
double secant_estimate(const QFunctionSpec& spec, std::int64_t n, const BigRat& lambda,
                       const BigRat& eps, const SumOptions& opts = {});

struct CondExpEstimate {
    double mean = 0;
    double stderr_mean = 0;
    double accepted_fraction = 0;
    std::uint64_t accepted = 0;
    std::uint64_t draws = 0;
    std::uint64_t resampled = 0;
};

CondExpEstimate mc_cond_expectation(Gamma gamma, const BigRat& eps, std::int64_t n,
                                    std::uint64_t M, AlphaSource src);

struct CountEstimate {
    double mean = 0;
    double stderr_mean = 0;
    std::uint64_t draws = 0;
    std::uint64_t resampled = 0;
};

CountEstimate mc_continuant_count(std::int64_t n, const BigRat& c, std::uint64_t M,
                                  AlphaSource src);

// Empirical CDF at fixed lambda values (exact rational comparisons on the
// located windows, no binning error).
std::vector<double> mc_empirical_cdf(const QFunctionSpec& spec, std::int64_t n,
                                     std::uint64_t M, const std::vector<BigRat>& lambdas,
                                     AlphaSource src);

// n -> S(alpha, n), exact, for n = 1..n_max: the sawtooth profile with peaks
// 2 + 1/rho at n = q_{k-1} and troughs near 2 + rho before q_k.
std::vector<std::pair<std::int64_t, BigRat>> quotient_series(const AlphaDesc& alpha,
                                                             std::int64_t n_max);

} // namespace sturmq
