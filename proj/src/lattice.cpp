#include "sturmq/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "sturmq/parallel.hpp"

namespace sturmq {

std::vector<std::int8_t> mobius_sieve(std::size_t N) {
    std::vector<std::int8_t> mu(N + 1, 1);
    std::vector<std::uint32_t> primes;
    std::vector<bool> composite(N + 1, false);
    mu[0] = 0;
    for (std::size_t i = 2; i <= N; ++i) {
        if (!composite[i]) {
            primes.push_back(static_cast<std::uint32_t>(i));
            mu[i] = -1;
        }
        for (std::uint32_t p : primes) {
            std::size_t ip = i * p;
            if (ip > N) break;
            composite[ip] = true;
            if (i % p == 0) {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    return mu;
}

// ---------------------------------------------------------------- threads

namespace {
std::atomic<unsigned> g_max_threads{0};
} // namespace

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned effective_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned cap = g_max_threads.load();
    return cap == 0 ? hw : std::min(cap, hw);
}

namespace {

// ------------------------------------------------------------- harmonics

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

double harmonic(std::int64_t m) {
    static const auto small = [] {
        std::array<double, 64> t{};
        double s = 0;
        for (int i = 1; i < 64; ++i) {
            s += 1.0 / i;
            t[static_cast<std::size_t>(i)] = s;
        }
        return t;
    }();
    if (m <= 0) return 0.0;
    if (m < 64) return small[static_cast<std::size_t>(m)];
    double x = static_cast<double>(m);
    double inv = 1.0 / x;
    double inv2 = inv * inv;
    return std::log(x) + kEulerGamma + 0.5 * inv -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

std::int64_t to_i64_checked(__int128 v, const char* what) {
    if (v > std::int64_t(1) << 62 || v < -(std::int64_t(1) << 62))
        throw DomainError(std::string("lattice bound overflow in ") + what);
    return static_cast<std::int64_t>(v);
}

} // namespace

// ---------------------------------------------------------------- domain

LatticeDomain LatticeDomain::rectangle() { return LatticeDomain{}; }

LatticeDomain LatticeDomain::strip(const BigRat& c) {
    LatticeDomain d;
    d.strip_ = true;
    d.c_ = c;
    return d;
}

LatticeDomain& LatticeDomain::add_constraint(const QFunctionSpec& f, Rel rel, const BigRat& thr) {
    // the sign normalization of f's denominator holds on R only, where x <= 1
    if (strip_) throw DomainError("constraints are supported on the rectangle base only");
    BigInt p = thr.get_num();
    BigInt q = thr.get_den();   // > 0 canonical
    // f rel p/q  <=>  qN rel pD on integer points (D > 0 on R)
    BigInt A = q * f.a1 - p * f.a2;
    BigInt B = q * f.b1 - p * f.b2;
    BigInt C = q * f.c1 - p * f.c2;
    HalfPlane h;
    bool strict = false;
    switch (rel) {
    case Rel::le: break;
    case Rel::lt: strict = true; break;
    case Rel::ge: A = -A; B = -B; C = -C; break;
    case Rel::gt: A = -A; B = -B; C = -C; strict = true; break;
    }
    auto fits = [](const BigInt& z) {
        return mpz_sizeinbase(z.get_mpz_t(), 2) <= 62;
    };
    if (!fits(A) || !fits(B) || !fits(C))
        throw DomainError("constraint coefficients too large for the lattice solver");
    h.A = A.get_si();
    h.B = B.get_si();
    h.C = C.get_si();
    h.off = strict ? 1 : 0;
    planes_.push_back(h);
    return *this;
}

std::int64_t LatticeDomain::strip_b_hi(std::int64_t n) const {
    // b < c n  <=>  q b <= p n - 1
    const BigInt& p = c_.get_num();
    const BigInt& q = c_.get_den();
    BigInt hi = (p * n - 1) / q;
    if (hi < 0) return -1;
    if (!hi.fits_slong_p()) throw DomainError("strip bound overflow");
    return hi.get_si();
}

std::int64_t LatticeDomain::a_hi(std::int64_t n) const {
    return strip_ ? std::max<std::int64_t>(strip_b_hi(n), 0) : n;
}

std::int64_t LatticeDomain::max_gcd(std::int64_t n) const {
    return strip_ ? std::max<std::int64_t>(strip_b_hi(n), 1) : n;
}

LatticeDomain::BInterval LatticeDomain::column(std::int64_t a, std::int64_t n) const {
    BInterval iv;
    if (strip_) {
        iv.lo = std::max<std::int64_t>(a, n);
        std::int64_t hi = strip_b_hi(n);
        if (hi < iv.lo) {
            iv.empty = true;
            return iv;
        }
        iv.hi = hi;
    } else {
        iv.lo = n + 1;
    }
    for (const HalfPlane& h : planes_) {
        __int128 rest = h.A * a + h.C * n + h.off;
        if (h.B == 0) {
            if (rest > 0) {
                iv.empty = true;
                return iv;
            }
            continue;
        }
        if (h.B > 0) {
            std::int64_t cap = to_i64_checked(floor_div(-rest, h.B), "column cap");
            if (!iv.hi || *iv.hi > cap) iv.hi = cap;
        } else {
            std::int64_t floor_lo = to_i64_checked(ceil_div(rest, -h.B), "column floor");
            if (floor_lo > iv.lo) iv.lo = floor_lo;
        }
    }
    if (iv.hi && *iv.hi < iv.lo) iv.empty = true;
    return iv;
}

bool LatticeDomain::bounded(std::int64_t n) const {
    (void)n;
    if (strip_) return true;
    for (const HalfPlane& h : planes_)
        if (h.B > 0) return true;
    return false;
}

bool LatticeDomain::contains(std::int64_t a, std::int64_t b, std::int64_t n) const {
    if (strip_) {
        if (a < 1 || a > b || b < n) return false;
        if (b > strip_b_hi(n)) return false;
    } else {
        if (a < 1 || a > n || b <= n) return false;
    }
    for (const HalfPlane& h : planes_)
        if (h.A * a + h.B * b + h.C * n + h.off > 0) return false;
    return true;
}

// ------------------------------------------------------------ integrands

double LatticeIntegrand::column_sum(std::int64_t, std::int64_t, std::int64_t,
                                    std::int64_t, std::int64_t) const {
    throw Refused("integrand " + name() + " has no closed-form column sum");
}

double LatticeIntegrand::tail_row_bound(std::int64_t, std::int64_t) const { return -1; }

namespace {

struct TwoOmega final : LatticeIntegrand {
    std::string name() const override { return "2*omega"; }
    double term(std::int64_t a, std::int64_t b, std::int64_t n) const override {
        (void)n;   // (1/n^2) 2 omega(a/n, b/n) = 2 / (b (a+b))
        return 2.0 / (static_cast<double>(b) * static_cast<double>(a + b));
    }
    BigRat term_exact(std::int64_t a, std::int64_t b, std::int64_t n) const override {
        (void)n;
        return make_rat(BigInt(2), BigInt(b) * BigInt(a + b));
    }
    bool has_column_form() const override { return true; }
    bool summable_unbounded() const override { return true; }
    double column_sum(std::int64_t a1, std::int64_t b0, std::int64_t b1,
                      std::int64_t d, std::int64_t n) const override {
        (void)n;
        double scale = 2.0 / (static_cast<double>(d) * static_cast<double>(d) *
                              static_cast<double>(a1));
        if (b1 < 0)
            return scale * (harmonic(b0 - 1 + a1) - harmonic(b0 - 1));
        return scale * ((harmonic(b1) - harmonic(b0 - 1)) -
                        (harmonic(b1 + a1) - harmonic(b0 - 1 + a1)));
    }
    double tail_row_bound(std::int64_t b_cut, std::int64_t n) const override {
        // sum_{b > cut} sum_{a <= n} 2/(b(a+b)) <= sum_{b > cut} 2n/b^2 <= 2n/cut
        return 2.0 * static_cast<double>(n) / static_cast<double>(b_cut);
    }
};

struct TwoOmegaFs final : LatticeIntegrand {
    std::string name() const override { return "2*omega*f_S"; }
    double term(std::int64_t a, std::int64_t b, std::int64_t n) const override {
        return 2.0 * static_cast<double>(n + a + b) /
               (static_cast<double>(n) * static_cast<double>(b) * static_cast<double>(a + b));
    }
    BigRat term_exact(std::int64_t a, std::int64_t b, std::int64_t n) const override {
        return make_rat(BigInt(2) * BigInt(n + a + b), BigInt(n) * BigInt(b) * BigInt(a + b));
    }
    bool has_column_form() const override { return true; }
    double column_sum(std::int64_t a1, std::int64_t b0, std::int64_t b1,
                      std::int64_t d, std::int64_t n) const override {
        if (b1 < 0)
            throw Refused("2*omega*f_S is not summable on unbounded columns");
        double s1 = harmonic(b1) - harmonic(b0 - 1);
        double s2 = harmonic(b1 + a1) - harmonic(b0 - 1 + a1);
        double dn = static_cast<double>(d);
        return 2.0 / (static_cast<double>(n) * dn * dn) *
               ((static_cast<double>(n) / static_cast<double>(a1)) * (s1 - s2) + dn * s1);
    }
};

const TwoOmega g_two_omega;
const TwoOmegaFs g_two_omega_fs;

} // namespace

const LatticeIntegrand& two_omega() { return g_two_omega; }
const LatticeIntegrand& two_omega_times_fs() { return g_two_omega_fs; }

std::string to_string(Method m) {
    return m == Method::direct_gcd ? "direct_gcd" : "mobius";
}

// ------------------------------------------------------------- summation

namespace {

struct SliceResult {
    double value = 0;
    std::uint64_t terms = 0;
};

// Pointwise sum over the domain columns in original coordinates, optionally
// gcd-filtered, optionally capped at b <= cap (cap < 0: uncapped).
SliceResult pointwise_slices(const LatticeIntegrand& g, const LatticeDomain& dom,
                             std::int64_t n, bool coprime_only, std::int64_t cap) {
    std::int64_t ahi = dom.a_hi(n);
    if (ahi < 1) return {};
    std::vector<double> partial(static_cast<std::size_t>(ahi), 0.0);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(ahi), 0);
    parallel_slots(static_cast<std::size_t>(ahi), [&](std::size_t slot) {
        std::int64_t a = static_cast<std::int64_t>(slot) + 1;
        auto iv = dom.column(a, n);
        if (iv.empty) return;
        if (!iv.hi && cap < 0)
            throw Refused("pointwise sum over unbounded column");
        std::int64_t hi = iv.hi ? *iv.hi : cap;
        if (cap >= 0) hi = std::min(hi, cap);
        Kahan k;
        std::uint64_t cnt = 0;
        for (std::int64_t b = iv.lo; b <= hi; ++b) {
            if (coprime_only && std::gcd(a, b) != 1) continue;
            k.add(g.term(a, b, n));
            ++cnt;
        }
        partial[slot] = k.sum;
        counts[slot] = cnt;
    });
    SliceResult r;
    Kahan total;
    for (std::size_t i = 0; i < partial.size(); ++i) {
        total.add(partial[i]);
        r.terms += counts[i];
    }
    r.value = total.sum;
    return r;
}

// Plain (not coprimality-filtered) sum of g over the domain points scaled by
// d: points (d a', d b') with (d a', d b') in the domain. Columns use the
// closed form when available.
SliceResult scaled_plain_sum(const LatticeIntegrand& g, const LatticeDomain& dom,
                             std::int64_t n, std::int64_t d, std::int64_t cap,
                             bool use_columns) {
    std::int64_t ahi = dom.a_hi(n) / d;
    SliceResult r;
    if (ahi < 1) return r;
    Kahan k;
    for (std::int64_t a1 = 1; a1 <= ahi; ++a1) {
        auto iv = dom.column(a1 * d, n);
        if (iv.empty) continue;
        std::int64_t b0 = to_i64_checked(ceil_div(iv.lo, d), "scaled column");
        std::int64_t b1 = -1;
        if (iv.hi) b1 = floor_div(*iv.hi, d);
        if (cap >= 0) {
            std::int64_t capped = cap / d;
            b1 = (b1 < 0) ? capped : std::min(b1, capped);
        }
        if (b1 >= 0 && b1 < b0) continue;
        if (use_columns && g.has_column_form()) {
            k.add(g.column_sum(a1, b0, b1, d, n));
            ++r.terms;
        } else {
            if (b1 < 0) throw Refused("pointwise sum over unbounded column");
            for (std::int64_t b = b0; b <= b1; ++b) {
                k.add(g.term(a1 * d, b * d, n));
                ++r.terms;
            }
        }
    }
    r.value = k.sum;
    return r;
}

struct TailPlan {
    std::int64_t cap = -1;     // -1: no truncation needed
    double bound = 0;
};

TailPlan plan_tail(const LatticeIntegrand& g, const LatticeDomain& dom, std::int64_t n,
                   const SumOptions& opts, bool column_path) {
    TailPlan t;
    if (dom.bounded(n)) return t;
    if (column_path && g.has_column_form() && g.summable_unbounded())
        return t;   // analytic infinite tails
    double rb = g.tail_row_bound(1, n);
    if (rb < 0)
        throw Refused("unbounded domain and integrand " + g.name() + " has no tail bound");
    std::int64_t cap = static_cast<std::int64_t>(std::ceil(2.0 * static_cast<double>(n) / opts.tol)) + 1;
    cap = std::max<std::int64_t>(cap, n + 2);
    t.cap = cap;
    t.bound = g.tail_row_bound(cap, n);
    return t;
}

} // namespace

SumResult plain_riemann(const LatticeIntegrand& g, const LatticeDomain& dom,
                        std::int64_t n, const SumOptions& opts) {
    if (n < 1) throw DomainError("n must be >= 1");
    TailPlan tail = plan_tail(g, dom, n, opts, opts.use_column_form);
    SliceResult s = scaled_plain_sum(g, dom, n, 1, tail.cap, opts.use_column_form);
    SumResult r;
    r.value = s.value;
    r.terms = s.terms;
    r.tail_bound = tail.bound;
    r.method = Method::direct_gcd;
    return r;
}

SumResult coprime_riemann(const LatticeIntegrand& g, const LatticeDomain& dom,
                          std::int64_t n, const SumOptions& opts) {
    if (n < 1) throw DomainError("n must be >= 1");
    SumResult r;
    r.method = opts.method;
    if (opts.method == Method::direct_gcd) {
        TailPlan tail = plan_tail(g, dom, n, opts, false);
        SliceResult s = pointwise_slices(g, dom, n, true, tail.cap);
        r.value = s.value;
        r.terms = s.terms;
        r.tail_bound = tail.bound;
        return r;
    }
    // Mobius inclusion-exclusion: R^(g, Omega) = sum_d mu(d) R(g_d, Omega_d),
    // realized by summing g over the d-divisible sublattice inside Omega.
    TailPlan tail = plan_tail(g, dom, n, opts, opts.use_column_form);
    std::int64_t dmax = std::min(dom.max_gcd(n), dom.a_hi(n));
    if (dmax < 1) return r;
    auto mu = mobius_sieve(static_cast<std::size_t>(dmax));
    std::vector<double> partial(static_cast<std::size_t>(dmax), 0.0);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(dmax), 0);
    parallel_slots(static_cast<std::size_t>(dmax), [&](std::size_t slot) {
        std::int64_t d = static_cast<std::int64_t>(slot) + 1;
        if (mu[static_cast<std::size_t>(d)] == 0) return;
        SliceResult s = scaled_plain_sum(g, dom, n, d, tail.cap, opts.use_column_form);
        partial[slot] = mu[static_cast<std::size_t>(d)] * s.value;
        counts[slot] = s.terms;
    });
    Kahan total;
    for (std::size_t i = 0; i < partial.size(); ++i) {
        total.add(partial[i]);
        r.terms += counts[i];
    }
    r.value = total.sum;
    r.tail_bound = tail.bound;
    return r;
}

namespace {

// Balanced pairwise reduction keeps exact rational denominators small.
struct BalancedRatSum {
    std::vector<std::pair<BigRat, std::uint64_t>> stack;
    void push(BigRat v) {
        std::uint64_t count = 1;
        while (!stack.empty() && stack.back().second == count) {
            v += stack.back().first;
            count *= 2;
            stack.pop_back();
        }
        stack.emplace_back(std::move(v), count);
    }
    BigRat total() {
        BigRat t = 0;
        for (auto& [v, c] : stack) t += v;
        return t;
    }
};

} // namespace

BigRat coprime_riemann_exact(const LatticeIntegrand& g, const LatticeDomain& dom,
                             std::int64_t n, Method method) {
    if (!dom.bounded(n)) throw Refused("exact sums need a bounded domain");
    BalancedRatSum acc;
    if (method == Method::direct_gcd) {
        std::int64_t ahi = dom.a_hi(n);
        for (std::int64_t a = 1; a <= ahi; ++a) {
            auto iv = dom.column(a, n);
            if (iv.empty) continue;
            for (std::int64_t b = iv.lo; b <= *iv.hi; ++b)
                if (std::gcd(a, b) == 1) acc.push(g.term_exact(a, b, n));
        }
        return acc.total();
    }
    std::int64_t dmax = std::min(dom.max_gcd(n), dom.a_hi(n));
    if (dmax < 1) return BigRat(0);
    auto mu = mobius_sieve(static_cast<std::size_t>(dmax));
    for (std::int64_t d = 1; d <= dmax; ++d) {
        if (mu[static_cast<std::size_t>(d)] == 0) continue;
        std::int64_t ahi = dom.a_hi(n) / d;
        for (std::int64_t a1 = 1; a1 <= ahi; ++a1) {
            auto iv = dom.column(a1 * d, n);
            if (iv.empty) continue;
            std::int64_t b0 = to_i64_checked(ceil_div(iv.lo, d), "scaled column");
            std::int64_t b1 = floor_div(*iv.hi, d);
            for (std::int64_t b = b0; b <= b1; ++b) {
                BigRat t = g.term_exact(a1 * d, b * d, n);
                if (mu[static_cast<std::size_t>(d)] < 0) t = -t;
                acc.push(std::move(t));
            }
        }
    }
    return acc.total();
}

SumResult cdf_exact(const QFunctionSpec& spec, const BigRat& lambda, std::int64_t n,
                    const SumOptions& opts) {
    LatticeDomain dom = LatticeDomain::rectangle();
    dom.add_constraint(spec, Rel::le, lambda);
    if (dom.bounded(n)) return coprime_riemann(two_omega(), dom, n, opts);
    LatticeDomain comp = LatticeDomain::rectangle();
    comp.add_constraint(spec, Rel::gt, lambda);
    if (comp.bounded(n)) {
        SumResult r = coprime_riemann(two_omega(), comp, n, opts);
        r.value = 1.0 - r.value;   // total coprime mass of 2*omega on R is 1
        return r;
    }
    return coprime_riemann(two_omega(), dom, n, opts);
}

SumResult joint_tail(const QFunctionSpec& spec_f, const BigRat& lambda,
                     const QFunctionSpec& spec_g, const BigRat& eps,
                     std::int64_t n, const SumOptions& opts) {
    LatticeDomain dom = LatticeDomain::rectangle();
    dom.add_constraint(spec_f, Rel::ge, lambda);
    dom.add_constraint(spec_g, Rel::ge, eps);
    return coprime_riemann(two_omega(), dom, n, opts);
}

double cond_expectation_exact(Gamma gamma, const BigRat& eps, std::int64_t n,
                              const SumOptions& opts) {
    if (eps <= 0)
        throw Refused("unconditional E[S_n] is infinite; eps must be positive");
    QFunctionSpec g = QFunctionSpec::builtin(gamma);
    LatticeDomain dom = LatticeDomain::rectangle();
    dom.add_constraint(g, Rel::ge, eps);
    if (!dom.bounded(n))
        throw Refused("conditioning domain is unbounded");
    SumResult den = coprime_riemann(two_omega(), dom, n, opts);
    if (den.terms == 0 || den.value <= 0)
        throw EmptyCondition("event {" + to_string(gamma) + " >= " +
                             std::string(eps.get_str()) + "} is empty at n = " +
                             std::to_string(n));
    SumResult num = coprime_riemann(two_omega_times_fs(), dom, n, opts);
    return num.value / den.value;
}

SumResult continuant_count_mean(std::int64_t n, const BigRat& c, const SumOptions& opts) {
    SumResult r;
    r.method = opts.method;
    if (n < 1) throw DomainError("n must be >= 1");
    if (c <= 1) return r;   // empty strip
    LatticeDomain dom = LatticeDomain::strip(c);
    r = coprime_riemann(two_omega(), dom, n, opts);
    // the coprime pair (1,1) is the one pair counted once, not twice
    if (n == 1) r.value -= 0.5 * two_omega().term(1, 1, n);
    return r;
}

double m_bound_two_omega(std::int64_t k_lo, std::int64_t k_hi) {
    // strip sups taken at the corner nearest the origin: C <= 2/k^2, D <= 6/k^3
    if (k_lo < 1) k_lo = 1;
    if (k_hi < 0) {
        // zeta tails: sum_{k >= k0} 2/k^2 and 6/k^3
        double c = 0, d = 0;
        for (std::int64_t k = k_lo; k < k_lo + 100000; ++k) {
            c += 2.0 / (static_cast<double>(k) * k);
            d += 6.0 / (static_cast<double>(k) * k * k);
        }
        double x = static_cast<double>(k_lo) + 100000.0;
        c += 2.0 / x;                 // integral tail bounds
        d += 3.0 / (x * x);
        return std::max(c, d);
    }
    double c = 0, d = 0;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        c += 2.0 / (static_cast<double>(k) * k);
        d += 6.0 / (static_cast<double>(k) * k * k);
    }
    return std::max(c, d);
}

} // namespace sturmq
