#include "sturmq/qfunc.hpp"

#include <sstream>

namespace sturmq {

std::string to_string(Gamma g) {
    switch (g) {
    case Gamma::rho: return "rho";
    case Gamma::mu: return "mu";
    case Gamma::nu: return "nu";
    }
    return "?";
}

Gamma parse_gamma(const std::string& name) {
    if (name == "rho") return Gamma::rho;
    if (name == "mu") return Gamma::mu;
    if (name == "nu") return Gamma::nu;
    throw DomainError("unknown position parameter: " + name);
}

namespace {

struct Linear {
    std::int64_t a, b, c;   // a x + b y + c
};

// Sign analysis of a linear form on R = {0 < x <= 1 < y}: the infimum over
// the closure is attained at the corners (0,1), (1,1) or in the recession
// direction (0,+inf), whose coefficient is b.
bool nonnegative_on_R(const Linear& f) {
    return f.b + f.c >= 0 && f.a + f.b + f.c >= 0 && f.b >= 0;
}

bool positive_on_open_R(const Linear& f) {
    if (!nonnegative_on_R(f)) return false;
    return f.a != 0 || f.b != 0 || f.c != 0;
}

void validate(QFunctionSpec& s) {
    if (s.b1 == 0 && s.b2 == 0)
        throw DomainError("Q-function must depend on y: (b1,b2) != (0,0)");
    // non-proportional triples: cross products must not all vanish
    __int128 x1 = (__int128)s.a1 * s.b2 - (__int128)s.a2 * s.b1;
    __int128 x2 = (__int128)s.a1 * s.c2 - (__int128)s.a2 * s.c1;
    __int128 x3 = (__int128)s.b1 * s.c2 - (__int128)s.b2 * s.c1;
    if (x1 == 0 && x2 == 0 && x3 == 0)
        throw DomainError("Q-function is constant (proportional coefficient triples)");
    Linear den{s.a2, s.b2, s.c2};
    if (!positive_on_open_R(den)) {
        // try the sign-normalized form
        QFunctionSpec t = s;
        t.a1 = -t.a1; t.b1 = -t.b1; t.c1 = -t.c1;
        t.a2 = -t.a2; t.b2 = -t.b2; t.c2 = -t.c2;
        Linear den2{t.a2, t.b2, t.c2};
        if (!positive_on_open_R(den2))
            throw DomainError("denominator changes sign on R");
        s = t;
    }
    Linear num{s.a1, s.b1, s.c1};
    if (!nonnegative_on_R(num))
        throw DomainError("Q-function must be nonnegative on R");
}

std::int64_t to_i64(const BigInt& z) {
    if (!z.fits_slong_p()) throw DomainError("Q-function coefficient too large");
    return z.get_si();
}

} // namespace

QFunctionSpec QFunctionSpec::builtin(const std::string& name) {
    QFunctionSpec s;
    s.name = name;
    if (name == "S") {
        s.a1 = 1; s.b1 = 1; s.c1 = 1; s.a2 = 0; s.b2 = 0; s.c2 = 1;
    } else if (name == "rho") {
        s.a1 = 1; s.b1 = 0; s.c1 = 0; s.a2 = 0; s.b2 = 1; s.c2 = 0;
    } else if (name == "mu") {
        s.a1 = -1; s.b1 = 0; s.c1 = 1; s.a2 = -1; s.b2 = 1; s.c2 = 0;
    } else if (name == "nu") {
        s.a1 = 0; s.b1 = 0; s.c1 = 1; s.a2 = 0; s.b2 = 1; s.c2 = 0;
    } else {
        throw DomainError("unknown builtin Q-function: " + name);
    }
    return s;
}

QFunctionSpec QFunctionSpec::builtin(Gamma g) { return builtin(to_string(g)); }

QFunctionSpec QFunctionSpec::from_rationals(const std::array<BigRat, 6>& coeffs, std::string name) {
    BigInt lcm = 1;
    for (const auto& c : coeffs)
        mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den().get_mpz_t());
    std::array<BigInt, 6> ints;
    BigInt g = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        ints[i] = coeffs[i].get_num() * (lcm / coeffs[i].get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), ints[i].get_mpz_t());
    }
    if (g > 1)
        for (auto& z : ints) z /= g;
    QFunctionSpec s;
    s.a1 = to_i64(ints[0]); s.b1 = to_i64(ints[1]); s.c1 = to_i64(ints[2]);
    s.a2 = to_i64(ints[3]); s.b2 = to_i64(ints[4]); s.c2 = to_i64(ints[5]);
    s.name = std::move(name);
    validate(s);
    return s;
}

QFunctionSpec QFunctionSpec::from_string(const std::string& text) {
    std::array<BigRat, 6> cs;
    std::stringstream ss(text);
    std::string tok;
    std::size_t i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i >= 6) throw DomainError("expected six coefficients: " + text);
        cs[i++] = parse_rational(tok);
    }
    if (i != 6) throw DomainError("expected six coefficients: " + text);
    return from_rationals(cs, "custom(" + text + ")");
}

BigRat QFunctionSpec::value_at(const BigInt& qp, const BigInt& qc, const BigInt& n) const {
    BigInt num = a1 * qp + b1 * qc + c1 * n;
    BigInt den = a2 * qp + b2 * qc + c2 * n;
    if (den == 0)
        throw SingularEvaluation("Q-function denominator vanished at (" + qp.get_str() +
                                 "/" + n.get_str() + ", " + qc.get_str() + "/" + n.get_str() + ")");
    return make_rat(num, den);
}

double QFunctionSpec::value(double x, double y) const {
    return (a1 * x + b1 * y + c1) / (a2 * x + b2 * y + c2);
}

QValue eval_q(const QFunctionSpec& spec, ContinuedFraction& cf, const BigInt& n) {
    ContinuantWindow w = locate_n(cf, n);
    QValue v;
    v.value = spec.value_at(w.q_prev, w.q_cur, n);
    v.window = w;
    v.spec_name = spec.name;
    return v;
}

IdentityReport check_identities(ContinuedFraction& cf, const BigInt& n) {
    ContinuantWindow w = locate_n(cf, n);
    const BigInt& qp = w.q_prev;
    const BigInt& qc = w.q_cur;
    IdentityReport r;
    r.S = QFunctionSpec::builtin("S").value_at(qp, qc, n);
    r.rho = QFunctionSpec::builtin("rho").value_at(qp, qc, n);
    r.mu = QFunctionSpec::builtin("mu").value_at(qp, qc, n);
    r.nu = QFunctionSpec::builtin("nu").value_at(qp, qc, n);

    auto fail = [&](const std::string& what) {
        throw Error("identity violation at n=" + n.get_str() + " window (" + qp.get_str() +
                    "," + qc.get_str() + "): " + what);
    };
    if (r.S != 1 + (1 + r.rho) / r.nu) fail("S != 1 + (1+rho)/nu");
    if (r.S < 2 + r.rho) fail("S < 2 + rho");
    if (r.S > 2 + 1 / r.rho) fail("S > 2 + 1/rho");
    if (r.nu < r.rho || r.nu >= 1) fail("nu outside [rho, 1)");
    if (r.mu < 0 || r.mu >= 1) fail("mu outside [0, 1)");
    r.upper_bound_attained = (n == qp);
    if (r.upper_bound_attained && r.S != 2 + 1 / r.rho) fail("upper bound not attained at n=q_{k-1}");
    return r;
}

} // namespace sturmq
