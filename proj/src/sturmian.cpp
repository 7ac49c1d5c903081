#include "sturmq/sturmian.hpp"

#include <algorithm>
#include <unordered_map>

namespace sturmq {

void WordPrefix::push_bit(int b) {
    if ((length & 63) == 0) words_.push_back(0);
    if (b) words_.back() |= std::uint64_t(1) << (length & 63);
    ++length;
}

WordPrefix WordPrefix::from_bits(const std::string& text) {
    WordPrefix w;
    for (char c : text) {
        if (c != '0' && c != '1') throw DomainError("word literal must be 0/1");
        w.push_bit(c - '0');
    }
    return w;
}

std::string WordPrefix::to_string(std::size_t limit) const {
    std::size_t L = (limit == 0 || limit > length) ? length : limit;
    std::string s;
    s.reserve(L);
    for (std::size_t i = 0; i < L; ++i) s.push_back(char('0' + at(i)));
    return s;
}

WordPrefix generate(const AlphaDesc& alpha, const BigRat& beta, std::size_t length, Variant variant) {
    if (alpha.kind == AlphaDesc::Kind::quotients)
        throw DomainError("word generation needs a rational or dyadic alpha");
    if (beta < 0 || beta >= 1) throw DomainError("beta must lie in [0,1)");
    if (length == 0) throw DomainError("length must be >= 1");

    // common denominator D, slope step P < D, intercept offset E
    BigInt f = beta.get_den();
    BigInt D = alpha.den * f;
    BigInt P = alpha.num * f;
    BigInt E = beta.get_num() * alpha.den;
    if (variant == Variant::ceil_word) E += D - 1;   // ceil(t/D) = floor((t+D-1)/D)

    // dyadic alpha stands for a real in [a/2^B, (a+1)/2^B): the floor of
    // t_j = P j + E is undecided when the slack j*f crosses the next multiple
    // of D. Rational alpha is exact and never ambiguous. The exact per-symbol
    // test below decides every floor; B >= log2(L) + 64 guard bits keeps it
    // from ever firing in practice.
    const bool audit = (alpha.kind == AlphaDesc::Kind::dyadic);

    WordPrefix w;
    w.alpha = alpha;
    w.beta = beta;
    w.variant = variant;

    BigInt r = E % D;   // t_0 mod D (E >= 0)
    BigInt slack = 0;
    // s_{j+1} - s_j = 1 iff adding P wraps r past D
    for (std::size_t j = 0; j < length; ++j) {
        BigInt next = r + P;
        int bit;
        if (next >= D) {
            next -= D;
            bit = 1;
        } else {
            bit = 0;
        }
        if (audit) {
            // the real slope adds at most (j+1) f to t_{j+1}; the floor at
            // index j+1 is undecided if that slack reaches the next multiple
            slack += f;
            if (next + slack >= D)
                throw PrecisionError("floor boundary undecided at position " +
                                     std::to_string(j));
        }
        w.push_bit(bit);
        r = next;
    }
    return w;
}

namespace {

struct Key128Hash {
    std::size_t operator()(const std::array<std::uint64_t, 2>& k) const {
        std::uint64_t h = k[0] * 0x9e3779b97f4a7c15ULL;
        h ^= (k[1] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
        return static_cast<std::size_t>(h);
    }
};

// Rolling bit-packed window key, LSB = oldest symbol, for n <= 128.
struct Rolling128 {
    std::array<std::uint64_t, 2> key{0, 0};
    std::size_t n;
    explicit Rolling128(std::size_t n_) : n(n_) {}
    void push(int bit) {
        key[0] = (key[0] >> 1) | (key[1] << 63);
        key[1] >>= 1;
        std::size_t top = n - 1;
        if (bit) {
            if (top < 64) key[0] |= std::uint64_t(1) << top;
            else key[1] |= std::uint64_t(1) << (top - 64);
        }
    }
};

template <typename Visit>
void scan_windows_128(const WordPrefix& w, std::size_t n, Visit&& visit) {
    Rolling128 roll(n);
    for (std::size_t i = 0; i < w.length; ++i) {
        roll.push(w.at(i));
        if (i + 1 >= n) visit(i + 1 - n, roll.key);
    }
}

template <typename Visit>
void scan_windows_bytes(const WordPrefix& w, std::size_t n, Visit&& visit) {
    std::string win(n, '0');
    for (std::size_t i = 0; i + n <= w.length; ++i) {
        for (std::size_t j = 0; j < n; ++j) win[j] = char('0' + w.at(i + j));
        visit(i, win);
    }
}

void check_saturation(const WordPrefix& w, std::size_t n) {
    if (!w.alpha) return;   // raw word: caller owns sufficiency
    BigInt nz(static_cast<unsigned long>(n));
    ContinuedFraction cf = cf_expand(*w.alpha, [&](int, const BigInt& qk) { return qk > nz; });
    BigInt R;
    try {
        R = recurrence_formula(cf, nz);
    } catch (const InsufficientExpansion&) {
        return;   // rational slope: word eventually periodic, counting is still exact
    }
    if (BigInt(static_cast<unsigned long>(w.length)) < R + nz) {
        BigInt bound = R + nz;
        throw PrefixTooShort("prefix length " + std::to_string(w.length) +
                             " below saturation bound R+n = " + bound.get_str());
    }
}

} // namespace

FactorSet factor_set(const WordPrefix& w, std::size_t n) {
    if (n == 0 || n > w.length) throw DomainError("factor length out of range");
    FactorSet fs;
    fs.n = n;
    if (n <= 128) {
        std::vector<std::array<std::uint64_t, 2>> keys;
        scan_windows_128(w, n, [&](std::size_t, const std::array<std::uint64_t, 2>& k) {
            keys.push_back(k);
        });
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        fs.packed_keys = std::move(keys);
    } else {
        std::vector<std::string> keys;
        scan_windows_bytes(w, n, [&](std::size_t, const std::string& k) { keys.push_back(k); });
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        fs.byte_keys = std::move(keys);
    }
    return fs;
}

std::size_t complexity(const WordPrefix& w, std::size_t n) {
    check_saturation(w, n);
    return factor_set(w, n).size();
}

std::int64_t brute_recurrence(const WordPrefix& w, std::size_t n, std::int64_t q_range) {
    if (n == 0 || n > w.length) throw DomainError("factor length out of range");
    check_saturation(w, n);
    const std::int64_t positions = static_cast<std::int64_t>(w.length - n + 1);
    if (q_range <= 0 || q_range > positions - 1) q_range = positions - 1;

    // For each factor the waiting time from q is (next occurrence >= q) - q + n;
    // the supremum over q is first_occurrence resp. gap-1 between consecutive
    // occurrences. Track it in one scan.
    std::int64_t max_wait = 0;          // max over factors, gap starts q <= q_range
    std::int64_t max_open = 0;          // unclosed trailing gap (certification check)
    if (n <= 128) {
        std::unordered_map<std::array<std::uint64_t, 2>, std::int64_t, Key128Hash> last;
        last.reserve(2 * n + 8);
        scan_windows_128(w, n, [&](std::size_t pos, const std::array<std::uint64_t, 2>& k) {
            auto [it, fresh] = last.try_emplace(k, -1);
            std::int64_t q = it->second + 1;   // earliest q whose next occurrence is pos
            if (q <= q_range) {
                std::int64_t wait = static_cast<std::int64_t>(pos) - q;
                if (wait > max_wait) max_wait = wait;
            }
            it->second = static_cast<std::int64_t>(pos);
            (void)fresh;
        });
        for (const auto& [k, last_pos] : last) {
            std::int64_t open = positions - 1 - last_pos;
            if (open > max_open) max_open = open;
        }
    } else {
        std::unordered_map<std::string, std::int64_t> last;
        scan_windows_bytes(w, n, [&](std::size_t pos, const std::string& k) {
            auto [it, fresh] = last.try_emplace(k, -1);
            std::int64_t q = it->second + 1;
            if (q <= q_range) {
                std::int64_t wait = static_cast<std::int64_t>(pos) - q;
                if (wait > max_wait) max_wait = wait;
            }
            it->second = static_cast<std::int64_t>(pos);
            (void)fresh;
        });
        for (const auto& [k, last_pos] : last) {
            std::int64_t open = positions - 1 - last_pos;
            if (open > max_open) max_open = open;
        }
    }
    if (max_open > max_wait)
        throw PrefixTooShort("prefix cannot certify the maximal gap (open gap " +
                             std::to_string(max_open) + " > max closed gap " +
                             std::to_string(max_wait) + ")");
    return static_cast<std::int64_t>(n) + max_wait;
}

BigInt recurrence_formula(ContinuedFraction& cf, const BigInt& n) {
    ContinuantWindow w = locate_n(cf, n);
    return n - 1 + w.q_cur + w.q_prev;
}

std::vector<RecurrenceCheck> recurrence_suite(const AlphaDesc& alpha, std::int64_t n_max,
                                              std::size_t max_prefix) {
    if (n_max < 1) throw DomainError("n_max must be >= 1");
    ContinuedFraction cf = cf_expand(alpha, [&](int, const BigInt& qk) { return qk > n_max; });
    BigInt R = recurrence_formula(cf, n_max);
    // the maximal gap of a length-n factor is witnessed inside a prefix of
    // length R(alpha, R(alpha,n)+1); size once for n = n_max
    BigInt Rw = recurrence_formula(cf, R + 1);
    BigInt L = Rw + R + 1 + 64;
    if (L > BigInt(static_cast<unsigned long>(max_prefix)))
        throw Refused("witness prefix of " + L.get_str() + " bits exceeds the cap");
    WordPrefix w = generate(alpha, BigRat(0), L.get_ui(), Variant::floor_word);

    std::vector<RecurrenceCheck> out;
    out.reserve(n_max);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        RecurrenceCheck c;
        c.n = n;
        c.formula = recurrence_formula(cf, BigInt(n));
        c.brute = brute_recurrence(w, static_cast<std::size_t>(n));
        c.factor_count = factor_set(w, static_cast<std::size_t>(n)).size();
        c.match = (c.formula == BigInt(c.brute));
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace sturmq
