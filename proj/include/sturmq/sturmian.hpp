#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sturmq/bigint.hpp"
#include "sturmq/continued_fraction.hpp"

namespace sturmq {

enum class Variant { floor_word, ceil_word };

// Finite prefix u_0..u_{L-1} of the Sturmian word of slope alpha and
// intercept beta, bit-packed.
class WordPrefix {
public:
    std::size_t length = 0;

    std::optional<AlphaDesc> alpha;   // absent for raw test words
    BigRat beta = 0;
    Variant variant = Variant::floor_word;

    static WordPrefix from_bits(const std::string& zero_one_text);

    int at(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    std::string to_string(std::size_t limit = 0) const;

    // factor scan support
    const std::vector<std::uint64_t>& packed() const { return words_; }

private:
    friend WordPrefix generate(const AlphaDesc&, const BigRat&, std::size_t, Variant);
    std::vector<std::uint64_t> words_;
    void push_bit(int b);
};

// u_n = floor(alpha (n+1) + beta) - floor(alpha n + beta)   (floor variant)
// with exact integer arithmetic; the ceil variant uses ceilings. For dyadic
// alpha, a symbol whose floor boundary is not decided by the stored bits
// raises PrecisionError.
WordPrefix generate(const AlphaDesc& alpha, const BigRat& beta, std::size_t length, Variant variant);

// Set of distinct factors of length n occurring in the prefix.
struct FactorSet {
    std::size_t n = 0;
    std::vector<std::array<std::uint64_t, 2>> packed_keys;   // n <= 128, sorted
    std::vector<std::string> byte_keys;                      // n  > 128, sorted

    std::size_t size() const {
        return packed_keys.empty() ? byte_keys.size() : packed_keys.size();
    }
    friend bool operator==(const FactorSet&, const FactorSet&) = default;
};

FactorSet factor_set(const WordPrefix& w, std::size_t n);

// |L_u(n)|. For prefixes generated from a located alpha the prefix must cover
// the saturation bound L >= R(alpha,n) + n, else PrefixTooShort; raw words are
// counted as-is.
std::size_t complexity(const WordPrefix& w, std::size_t n);

// Brute-force recurrence: max over q in [0, q_range] of the waiting time
// w(q, n), scanned on the prefix. q_range == 0 means the whole prefix. If an
// unclosed gap at the end of the prefix could exceed the maximum closed gap,
// the prefix cannot certify the value and PrefixTooShort is raised.
std::int64_t brute_recurrence(const WordPrefix& w, std::size_t n, std::int64_t q_range = 0);

// R(alpha, n) = n - 1 + q_k + q_{k-1}  for n in [q_{k-1}, q_k).
BigInt recurrence_formula(ContinuedFraction& cf, const BigInt& n);

// Formula-vs-oracle run for every n <= n_max on one alpha, on a prefix sized
// so the oracle can certify maximal gaps. Also reports complexity.
struct RecurrenceCheck {
    std::int64_t n = 0;
    BigInt formula;
    std::int64_t brute = 0;
    std::size_t factor_count = 0;
    bool match = false;
};

std::vector<RecurrenceCheck> recurrence_suite(const AlphaDesc& alpha, std::int64_t n_max,
                                              std::size_t max_prefix = std::size_t(1) << 28);

} // namespace sturmq
