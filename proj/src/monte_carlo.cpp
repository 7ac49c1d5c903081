#include "sturmq/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sturmq/parallel.hpp"

namespace sturmq {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

using u128 = unsigned __int128;
using i128 = __int128;

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t counter_hi,
                                        std::uint64_t counter_lo) {
    std::uint32_t x0 = static_cast<std::uint32_t>(counter_lo);
    std::uint32_t x1 = static_cast<std::uint32_t>(counter_lo >> 32);
    std::uint32_t x2 = static_cast<std::uint32_t>(counter_hi);
    std::uint32_t x3 = static_cast<std::uint32_t>(counter_hi >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x0;
        std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x2;
        std::uint32_t y0 = static_cast<std::uint32_t>(p1 >> 32) ^ x1 ^ k0;
        std::uint32_t y1 = static_cast<std::uint32_t>(p1);
        std::uint32_t y2 = static_cast<std::uint32_t>(p0 >> 32) ^ x3 ^ k1;
        std::uint32_t y3 = static_cast<std::uint32_t>(p0);
        x0 = y0; x1 = y1; x2 = y2; x3 = y3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {x0, x1, x2, x3};
}

BigInt AlphaSource::numerator_at(std::uint64_t index, bool audit_half) const {
    unsigned blocks = (bits_ + 127) / 128;
    std::uint64_t hi = (static_cast<std::uint64_t>(stratum_) << 32) | (audit_half ? 1u : 0u);
    BigInt out = 0;
    for (unsigned j = 0; j < blocks; ++j) {
        auto blk = philox4x32(seed_, hi, index * blocks + j);
        for (auto w : blk) {
            out <<= 32;
            out += static_cast<unsigned long>(w);
        }
    }
    unsigned excess = blocks * 128 - bits_;
    if (excess) out >>= excess;
    return out;
}

BigInt AlphaSource::next_numerator() {
    while (true) {
        BigInt a = numerator_at(counter_++, false);
        if (a != 0) return a;
    }
}

BigInt AlphaSource::audit_extension(std::uint64_t position) const {
    return numerator_at(position, true);
}

AlphaDesc sample_alpha(AlphaSource& src) {
    return AlphaDesc::from_dyadic(src.next_numerator(), src.bits());
}

// --------------------------------------------------------- fast expansion

namespace {

constexpr int kHugeBits = 88;   // above 2^88 the window counts as y -> inf

struct FastWindow {
    std::uint64_t q_prev = 1;
    u128 q_cur = 0;
    bool huge = false;
};

u128 bits128_at(const AlphaSource& src, std::uint64_t seed, std::uint32_t stratum,
                std::uint64_t index) {
    auto blk = philox4x32(seed, static_cast<std::uint64_t>(stratum) << 32, index);
    u128 v = 0;
    for (auto w : blk) v = (v << 32) | w;
    if (src.bits() < 128) v >>= (128 - src.bits());
    return v;
}

// One Euclid quotient stream over a/2^bits (bits <= 128).
struct FastEuclid {
    u128 u;
    u128 v = 0;
    bool v_full;

    FastEuclid(u128 a, unsigned bits) : u(a), v_full(bits == 128) {
        if (!v_full) v = u128(1) << bits;
    }

    // next partial quotient; false when the expansion terminates
    bool next(u128& m) {
        if (u == 0) return false;
        u128 r;
        if (v_full) {
            u128 M = ~u128(0);   // represents 2^128 via M = 2^128 - 1
            m = M / u;
            r = M % u;
            if (r == u - 1) { ++m; r = 0; } else { ++r; }
            v_full = false;
        } else {
            m = v / u;
            r = v % u;
        }
        v = u;
        u = r;
        return true;
    }
};

// Continuant pair stream: q_0 = 1, q_k = m_k q_{k-1} + q_{k-2}, saturating.
struct ContinuantPair {
    u128 q_prev = 0;   // q_{k-1}; 0 only before the first step
    u128 q_cur = 1;    // q_k, starting at q_0
    bool huge = false;

    void step(u128 m) {
        if (huge) return;
        if (q_cur != 0 && m > (~u128(0) - q_prev) / q_cur) {
            huge = true;
            q_prev = q_cur;
            q_cur = ~u128(0);
            return;
        }
        u128 qn = m * q_cur + q_prev;
        q_prev = q_cur;
        q_cur = qn;
        if (q_cur > (u128(1) << kHugeBits)) huge = true;
    }
};

// Window of a/2^bits: smallest k with q_k > n. False when the expansion
// terminates first (degenerate draw to be resampled).
bool fast_locate(u128 a, unsigned bits, std::uint64_t n, FastWindow& w) {
    FastEuclid eu(a, bits);
    ContinuantPair q;
    u128 m;
    while (q.q_cur <= n) {
        if (!eu.next(m)) return false;
        q.step(m);
    }
    w.q_prev = static_cast<std::uint64_t>(q.q_prev);
    w.q_cur = q.q_cur;
    w.huge = q.huge;
    return true;
}

// mpz fallback for bits > 128
bool slow_locate(const BigInt& a, unsigned bits, std::uint64_t n, FastWindow& w) {
    AlphaDesc d = AlphaDesc::from_dyadic(a, bits);
    BigInt nz(static_cast<unsigned long>(n));
    ContinuedFraction cf = cf_expand(d, [&](int, const BigInt& qk) { return qk > nz; });
    try {
        ContinuantWindow cw = locate_n(cf, nz);
        w.q_prev = cw.q_prev.get_ui();
        if (mpz_sizeinbase(cw.q_cur.get_mpz_t(), 2) > kHugeBits) {
            w.q_cur = ~u128(0);
            w.huge = true;
        } else {
            BigInt hi = cw.q_cur >> 64;
            BigInt lo = cw.q_cur - (hi << 64);
            w.q_cur = (u128(hi.get_ui()) << 64) | u128(lo.get_ui());
            w.huge = false;
        }
        return true;
    } catch (const InsufficientExpansion&) {
        return false;
    }
}

struct SmallRat {
    std::int64_t p = 0;
    std::int64_t q = 1;
};

SmallRat to_small_rat(const BigRat& r) {
    BigRat c = r;
    c.canonicalize();
    if (mpz_sizeinbase(c.get_num().get_mpz_t(), 2) > 40 ||
        mpz_sizeinbase(c.get_den().get_mpz_t(), 2) > 40)
        throw DomainError("threshold too large for the sampling comparators");
    return {c.get_num().get_si(), c.get_den().get_si()};
}

// sign of Lambda - p/q on the window, exact; huge windows order by the
// y -> inf limit.
int cmp_lambda(const QFunctionSpec& s, const FastWindow& w, std::int64_t n,
               const SmallRat& t) {
    if (w.huge) {
        i128 lead = i128(t.q) * s.b1 - i128(t.p) * s.b2;
        if (lead != 0) return lead > 0 ? 1 : -1;
        i128 rest = i128(t.q) * (i128(s.a1) * static_cast<std::int64_t>(w.q_prev) + i128(s.c1) * n) -
                    i128(t.p) * (i128(s.a2) * static_cast<std::int64_t>(w.q_prev) + i128(s.c2) * n);
        return rest > 0 ? 1 : (rest < 0 ? -1 : 0);
    }
    i128 qc = static_cast<i128>(w.q_cur);
    i128 qp = static_cast<std::int64_t>(w.q_prev);
    i128 N = i128(s.a1) * qp + i128(s.b1) * qc + i128(s.c1) * n;
    i128 D = i128(s.a2) * qp + i128(s.b2) * qc + i128(s.c2) * n;
    i128 diff = i128(t.q) * N - i128(t.p) * D;   // D > 0 on R
    return diff > 0 ? 1 : (diff < 0 ? -1 : 0);
}

double value_double(const QFunctionSpec& s, const FastWindow& w, std::int64_t n) {
    if (w.huge) {
        if (s.b2 != 0) return static_cast<double>(s.b1) / static_cast<double>(s.b2);
        return s.b1 > 0 ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
    }
    double x = static_cast<double>(w.q_prev) / static_cast<double>(n);
    double y = static_cast<double>(w.q_cur) / static_cast<double>(n);
    return s.value(x, y);
}

// Extend the draw to 2B bits with fresh tail bits; the quotients up to the
// located depth must be unchanged.
bool audit_ok(const AlphaSource& src, std::uint64_t position, std::uint64_t n) {
    BigInt a = src.numerator_at(position, false);
    if (a == 0) return true;
    unsigned B = src.bits();
    BigInt a2 = (a << B) + src.audit_extension(position);
    BigInt nz(static_cast<unsigned long>(n));
    ContinuedFraction c1 = cf_expand(AlphaDesc::from_dyadic(a, B),
                                     [&](int, const BigInt& qk) { return qk > nz; });
    ContinuedFraction c2 = cf_expand(AlphaDesc::from_dyadic(a2, 2 * B),
                                     [&](int, const BigInt& qk) { return qk > nz; });
    int k;
    try {
        k = locate_n(c1, nz).k;
    } catch (const InsufficientExpansion&) {
        return true;   // degenerate draw, resampled anyway
    }
    if (c2.depth() < k) return false;
    for (int i = 0; i < k; ++i)
        if (c1.quotients[static_cast<std::size_t>(i)] != c2.quotients[static_cast<std::size_t>(i)])
            return false;
    return true;
}

// Per-stratum draw loop: deterministic in (seed, stratum); degenerate draws
// are replaced and counted; every 128th position runs the precision audit.
struct DrawLoop {
    const AlphaSource& stream;
    std::uint32_t stratum;
    std::uint64_t n;
    std::uint64_t pos = 0;
    std::uint64_t resampled = 0;
    std::uint64_t audit_failures = 0;
    bool fast;
    AlphaSource audit_view;

    DrawLoop(const AlphaSource& src, std::uint32_t s, std::uint64_t n_)
        : stream(src), stratum(s), n(n_), fast(src.bits() <= 128),
          audit_view(src.substream(s)) {}

    FastWindow next_window() {
        while (true) {
            std::uint64_t here = pos++;
            FastWindow w;
            bool ok;
            if (fast) {
                u128 a = bits128_at(stream, stream.seed(), stratum, here);
                if (a == 0) {
                    ++resampled;
                    continue;
                }
                ok = fast_locate(a, stream.bits(), n, w);
            } else {
                BigInt a = audit_view.numerator_at(here, false);
                if (a == 0) {
                    ++resampled;
                    continue;
                }
                ok = slow_locate(a, stream.bits(), n, w);
            }
            if (!ok) {
                ++resampled;
                continue;
            }
            if (here % 128 == 0 && !audit_ok(audit_view, here, n)) ++audit_failures;
            return w;
        }
    }
};

std::uint64_t stratum_quota(std::uint64_t M, std::uint32_t s) {
    std::uint64_t per = M / AlphaSource::kStrata;
    return per + (s < M % AlphaSource::kStrata ? 1 : 0);
}

// Continuant count in [n, c n) for k >= 1 (the k = 0 pair lies outside the
// lattice base region and is excluded on both sides); -1 when the expansion
// terminates before certifying the count.
long count_fast(u128 a, unsigned bits, std::uint64_t n, const SmallRat& c) {
    FastEuclid eu(a, bits);
    ContinuantPair q;
    const u128 pn = u128(static_cast<std::uint64_t>(c.p)) * n;
    const u128 cq = u128(static_cast<std::uint64_t>(c.q));
    const u128 safe = ~u128(0) / cq;
    long count = 0;
    u128 m;
    while (true) {
        if (!eu.next(m)) return -1;
        q.step(m);
        u128 qk = q.q_cur;
        if (q.huge || qk > safe || cq * qk >= pn) return count;   // q_k >= c n
        if (qk >= n) ++count;
    }
}

long count_slow(const BigInt& a, unsigned bits, std::uint64_t n, const BigRat& c) {
    AlphaDesc d = AlphaDesc::from_dyadic(a, bits);
    BigRat cn = c * BigInt(static_cast<unsigned long>(n));
    ContinuedFraction cf = cf_expand(d, [&](int, const BigInt& qk) { return BigRat(qk) >= cn; });
    if (cf.exhausted && BigRat(cf.q.back()) < cn) return -1;
    long count = 0;
    for (int k = 1; k <= cf.depth(); ++k)
        if (cf.q[static_cast<std::size_t>(k)] >= static_cast<long>(n) && BigRat(cf.q[static_cast<std::size_t>(k)]) < cn)
            ++count;
    return count;
}

} // namespace

void Histogram::scale() {
    std::uint64_t in_range = 0;
    for (auto c : counts) in_range += c;
    if (in_range == 0 || step <= 0)
        throw Refused("histogram has no in-range mass to scale");
    scaled.resize(counts.size());
    double denom = static_cast<double>(in_range) * step;
    for (std::size_t i = 0; i < counts.size(); ++i)
        scaled[i] = static_cast<double>(counts[i]) / denom;
}

Histogram mc_histogram(const QFunctionSpec& spec, std::int64_t n, std::uint64_t M,
                       double step, AlphaSource src, double lo, double hi) {
    if (n < 1) throw DomainError("n must be >= 1");
    if (step <= 0 || hi <= lo) throw DomainError("bad histogram geometry");
    std::size_t bins = static_cast<std::size_t>(std::ceil((hi - lo) / step));

    Histogram h;
    h.lo = lo;
    h.hi = lo + static_cast<double>(bins) * step;
    h.step = step;
    h.counts.assign(bins, 0);
    if (M == 0) return h;   // empty histogram; scaling it is refused

    struct Acc {
        std::vector<std::uint64_t> counts;
        std::uint64_t under = 0, over = 0, total = 0, resampled = 0, audit = 0;
    };
    std::vector<Acc> acc(AlphaSource::kStrata);
    parallel_slots(AlphaSource::kStrata, [&](std::size_t s) {
        Acc& a = acc[s];
        a.counts.assign(bins, 0);
        DrawLoop loop(src, static_cast<std::uint32_t>(s), static_cast<std::uint64_t>(n));
        std::uint64_t quota = stratum_quota(M, static_cast<std::uint32_t>(s));
        double top = lo + static_cast<double>(bins) * step;
        for (std::uint64_t i = 0; i < quota; ++i) {
            FastWindow w = loop.next_window();
            double v = value_double(spec, w, n);
            ++a.total;
            if (v < lo) {
                ++a.under;
            } else if (!(v < top)) {   // also catches +inf from saturated windows
                ++a.over;
            } else {
                std::size_t b = static_cast<std::size_t>((v - lo) / step);
                if (b >= bins) b = bins - 1;
                ++a.counts[b];
            }
        }
        a.resampled = loop.resampled;
        a.audit = loop.audit_failures;
    });

    for (const Acc& a : acc) {
        for (std::size_t b = 0; b < bins; ++b) h.counts[b] += a.counts[b];
        h.underflow += a.under;
        h.overflow += a.over;
        h.total += a.total;
        h.resampled += a.resampled;
        h.audit_failures += a.audit;
    }
    h.scale();
    return h;
}

double secant_estimate(const QFunctionSpec& spec, std::int64_t n, const BigRat& lambda,
                       const BigRat& eps, const SumOptions& opts) {
    if (eps <= 0) throw DomainError("secant step must be positive");
    BigRat hi = lambda + eps;
    double f1 = cdf_exact(spec, hi, n, opts).value;
    double f0 = cdf_exact(spec, lambda, n, opts).value;
    return (f1 - f0) / to_double(eps);
}

CondExpEstimate mc_cond_expectation(Gamma gamma, const BigRat& eps, std::int64_t n,
                                    std::uint64_t M, AlphaSource src) {
    if (eps <= 0 || eps >= 1) throw Refused("eps must lie in (0,1)");
    if (M == 0) throw Refused("M must be >= 1");
    QFunctionSpec g = QFunctionSpec::builtin(gamma);
    SmallRat t = to_small_rat(eps);

    struct Acc {
        double sum = 0, sum2 = 0;
        std::uint64_t accepted = 0, draws = 0, resampled = 0;
    };
    std::vector<Acc> acc(AlphaSource::kStrata);
    parallel_slots(AlphaSource::kStrata, [&](std::size_t s) {
        Acc& a = acc[s];
        DrawLoop loop(src, static_cast<std::uint32_t>(s), static_cast<std::uint64_t>(n));
        std::uint64_t quota = stratum_quota(M, static_cast<std::uint32_t>(s));
        Kahan sum, sum2;
        for (std::uint64_t i = 0; i < quota; ++i) {
            FastWindow w = loop.next_window();
            ++a.draws;
            if (cmp_lambda(g, w, n, t) < 0) continue;   // Gamma_n < eps
            ++a.accepted;
            double S = 1.0 + (static_cast<double>(w.q_prev) + static_cast<double>(w.q_cur)) /
                                 static_cast<double>(n);
            sum.add(S);
            sum2.add(S * S);
        }
        a.sum = sum.sum;
        a.sum2 = sum2.sum;
        a.resampled = loop.resampled;
    });

    CondExpEstimate e;
    double sum = 0, sum2 = 0;
    for (const Acc& a : acc) {
        sum += a.sum;
        sum2 += a.sum2;
        e.accepted += a.accepted;
        e.draws += a.draws;
        e.resampled += a.resampled;
    }
    if (e.accepted == 0)
        throw EmptyCondition("no draws satisfied the conditioning event");
    double m = sum / static_cast<double>(e.accepted);
    e.mean = m;
    if (e.accepted > 1) {
        double var = (sum2 - static_cast<double>(e.accepted) * m * m) /
                     static_cast<double>(e.accepted - 1);
        e.stderr_mean = std::sqrt(std::max(var, 0.0) / static_cast<double>(e.accepted));
    }
    e.accepted_fraction = static_cast<double>(e.accepted) / static_cast<double>(e.draws);
    return e;
}

CountEstimate mc_continuant_count(std::int64_t n, const BigRat& c, std::uint64_t M,
                                  AlphaSource src) {
    if (n < 1) throw DomainError("n must be >= 1");
    if (M == 0) throw Refused("M must be >= 1");
    CountEstimate e;
    e.draws = M;
    if (c <= 1) return e;
    SmallRat t = to_small_rat(c);

    struct Acc {
        double sum = 0, sum2 = 0;
        std::uint64_t draws = 0, resampled = 0;
    };
    std::vector<Acc> acc(AlphaSource::kStrata);
    bool fast = src.bits() <= 128;
    parallel_slots(AlphaSource::kStrata, [&](std::size_t s) {
        Acc& a = acc[s];
        AlphaSource sub = src.substream(static_cast<std::uint32_t>(s));
        std::uint64_t quota = stratum_quota(M, static_cast<std::uint32_t>(s));
        std::uint64_t pos = 0;
        for (std::uint64_t i = 0; i < quota; ++i) {
            long count = -1;
            while (count < 0) {
                std::uint64_t here = pos++;
                if (fast) {
                    u128 av = bits128_at(sub, sub.seed(), static_cast<std::uint32_t>(s), here);
                    if (av == 0) { ++a.resampled; continue; }
                    count = count_fast(av, sub.bits(), static_cast<std::uint64_t>(n), t);
                } else {
                    BigInt az = sub.numerator_at(here, false);
                    if (az == 0) { ++a.resampled; continue; }
                    count = count_slow(az, sub.bits(), static_cast<std::uint64_t>(n), c);
                }
                if (count < 0) ++a.resampled;
            }
            ++a.draws;
            double v = static_cast<double>(count);
            a.sum += v;
            a.sum2 += v * v;
        }
    });

    double sum = 0, sum2 = 0;
    std::uint64_t draws = 0;
    for (const Acc& a : acc) {
        sum += a.sum;
        sum2 += a.sum2;
        draws += a.draws;
        e.resampled += a.resampled;
    }
    e.draws = draws;
    double m = sum / static_cast<double>(draws);
    e.mean = m;
    if (draws > 1) {
        double var = (sum2 - static_cast<double>(draws) * m * m) / static_cast<double>(draws - 1);
        e.stderr_mean = std::sqrt(std::max(var, 0.0) / static_cast<double>(draws));
    }
    return e;
}

std::vector<double> mc_empirical_cdf(const QFunctionSpec& spec, std::int64_t n,
                                     std::uint64_t M, const std::vector<BigRat>& lambdas,
                                     AlphaSource src) {
    if (M == 0) throw Refused("M must be >= 1");
    std::vector<SmallRat> ts;
    ts.reserve(lambdas.size());
    for (const auto& l : lambdas) ts.push_back(to_small_rat(l));

    std::vector<std::vector<std::uint64_t>> acc(AlphaSource::kStrata);
    parallel_slots(AlphaSource::kStrata, [&](std::size_t s) {
        acc[s].assign(ts.size(), 0);
        DrawLoop loop(src, static_cast<std::uint32_t>(s), static_cast<std::uint64_t>(n));
        std::uint64_t quota = stratum_quota(M, static_cast<std::uint32_t>(s));
        for (std::uint64_t i = 0; i < quota; ++i) {
            FastWindow w = loop.next_window();
            for (std::size_t j = 0; j < ts.size(); ++j)
                if (cmp_lambda(spec, w, n, ts[j]) <= 0) ++acc[s][j];
        }
    });

    std::vector<double> out(ts.size(), 0.0);
    for (const auto& a : acc)
        for (std::size_t j = 0; j < ts.size(); ++j) out[j] += static_cast<double>(a[j]);
    for (auto& v : out) v /= static_cast<double>(M);
    return out;
}

std::vector<std::pair<std::int64_t, BigRat>> quotient_series(const AlphaDesc& alpha,
                                                             std::int64_t n_max) {
    if (n_max < 1) throw DomainError("n_max must be >= 1");
    ContinuedFraction cf = cf_expand(alpha, [&](int, const BigInt& qk) { return qk > n_max; });
    QFunctionSpec S = QFunctionSpec::builtin("S");
    std::vector<std::pair<std::int64_t, BigRat>> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (std::int64_t n = 1; n <= n_max; ++n)
        out.emplace_back(n, eval_q(S, cf, BigInt(n)).value);
    return out;
}

} // namespace sturmq
