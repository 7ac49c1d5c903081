#include "sturmq/continued_fraction.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace sturmq {

BigRat parse_rational(const std::string& text) {
    if (text.empty()) throw DomainError("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num = parse_int(text.substr(0, slash));
        BigInt den = parse_int(text.substr(slash + 1));
        if (den == 0) throw DomainError("zero denominator in rational literal: " + text);
        return make_rat(num, den);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        std::size_t frac_len = text.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+")
            throw DomainError("malformed decimal literal: " + text);
        BigInt num = parse_int(digits);
        BigInt den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        return make_rat(num, den);
    }
    return make_rat(parse_int(text), BigInt(1));
}

AlphaDesc AlphaDesc::from_rational(BigInt num, BigInt den) {
    if (den <= 0) throw DomainError("alpha denominator must be positive");
    if (num <= 0 || num >= den) throw DomainError("alpha must lie in (0,1)");
    BigInt g;
    mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    AlphaDesc d;
    d.kind = Kind::rational;
    d.num = num / g;
    d.den = den / g;
    d.text = "rat:" + d.num.get_str() + "/" + d.den.get_str();
    return d;
}

AlphaDesc AlphaDesc::from_dyadic(BigInt numerator, unsigned bits) {
    if (bits < 64) throw DomainError("dyadic alpha needs at least 64 bits");
    BigInt den = 1;
    den <<= bits;
    if (numerator <= 0 || numerator >= den) throw DomainError("alpha must lie in (0,1)");
    AlphaDesc d;
    d.kind = Kind::dyadic;
    d.num = std::move(numerator);
    d.den = den;
    d.bits = bits;
    d.text = "dyadic:" + d.num.get_str() + "/2^" + std::to_string(bits);
    return d;
}

AlphaDesc AlphaDesc::from_quotients(std::vector<std::uint64_t> ms, bool periodic) {
    if (ms.empty()) throw DomainError("empty quotient list");
    for (auto m : ms)
        if (m == 0) throw DomainError("partial quotients must be positive");
    AlphaDesc d;
    d.kind = Kind::quotients;
    d.quotients = std::move(ms);
    d.periodic = periodic;
    std::ostringstream os;
    os << "cf:";
    if (periodic) os << '(';
    for (std::size_t i = 0; i < d.quotients.size(); ++i)
        os << (i ? "," : "") << d.quotients[i];
    if (periodic) os << ")*";
    d.text = os.str();
    return d;
}

namespace {

std::vector<std::uint64_t> parse_quotient_list(const std::string& body) {
    std::vector<std::uint64_t> ms;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw DomainError("malformed quotient list");
        ms.push_back(std::stoull(tok));
    }
    if (ms.empty()) throw DomainError("empty quotient list");
    return ms;
}

} // namespace

AlphaDesc parse_alpha(const std::string& text, unsigned dyadic_bits) {
    if (text.rfind("rat:", 0) == 0) {
        std::string body = text.substr(4);
        auto slash = body.find('/');
        if (slash == std::string::npos) throw DomainError("rat: expects p/q");
        return AlphaDesc::from_rational(parse_int(body.substr(0, slash)),
                                        parse_int(body.substr(slash + 1)));
    }
    if (text.rfind("dec:", 0) == 0) {
        std::string body = text.substr(4);
        BigRat r = parse_rational(body);
        if (r <= 0 || r >= 1) throw DomainError("alpha must lie in (0,1)");
        // truncate the decimal to the dyadic grid
        BigInt num = (r.get_num() << dyadic_bits) / r.get_den();
        if (num == 0) num = 1;
        return AlphaDesc::from_dyadic(num, dyadic_bits);
    }
    if (text.rfind("cf:", 0) == 0) {
        std::string body = text.substr(3);
        bool periodic = false;
        if (!body.empty() && body.front() == '(') {
            if (body.size() < 3 || body.substr(body.size() - 2) != ")*")
                throw DomainError("periodic pattern must look like cf:(m1,...)*");
            periodic = true;
            body = body.substr(1, body.size() - 3);
        }
        return AlphaDesc::from_quotients(parse_quotient_list(body), periodic);
    }
    if (text == "golden") return golden_alpha(dyadic_bits);
    throw DomainError("unrecognized alpha description: " + text);
}

AlphaDesc golden_alpha(unsigned bits) {
    // floor(((sqrt 5) - 1)/2 * 2^bits) = floor((sqrt(5 * 4^bits) - 2^bits) / 2)
    BigInt five = 5;
    five <<= 2 * bits;
    BigInt root;
    mpz_sqrt(root.get_mpz_t(), five.get_mpz_t());
    BigInt one = 1;
    one <<= bits;
    AlphaDesc d = AlphaDesc::from_dyadic((root - one) >> 1, bits);
    d.text = "golden@" + std::to_string(bits);
    return d;
}

void ContinuedFraction::push_quotient(const BigInt& m) {
    int k = depth() + 1;
    quotients.push_back(m);
    if (k == 1) {
        p.push_back(0);          // p_0
        q.push_back(1);          // q_0
        p.push_back(1);          // p_1
        q.push_back(m);          // q_1 = m_1
    } else {
        p.push_back(m * p[k - 1] + p[k - 2]);
        q.push_back(m * q[k - 1] + q[k - 2]);
    }
}

bool ContinuedFraction::next_quotient(BigInt& m) {
    switch (source.kind) {
    case AlphaDesc::Kind::rational:
    case AlphaDesc::Kind::dyadic: {
        if (rem_num_ == 0) return false;
        // Euclid step on the tail num/den: m = floor(den/num), tail -> (den mod num)/num.
        // Floor division always ends with a final quotient >= 2, so the
        // expansion produced here is the canonical (proper) one.
        BigInt r;
        mpz_fdiv_qr(m.get_mpz_t(), r.get_mpz_t(), rem_den_.get_mpz_t(), rem_num_.get_mpz_t());
        rem_den_ = rem_num_;
        rem_num_ = r;
        return true;
    }
    case AlphaDesc::Kind::quotients: {
        if (src_pos_ >= source.quotients.size()) {
            if (!source.periodic) return false;
            src_pos_ = 0;
        }
        m = source.quotients[src_pos_++];
        return true;
    }
    }
    return false;
}

void ContinuedFraction::expand(const StopFn& stop) {
    if (exhausted) return;
    while (true) {
        int k = depth();
        if (k > 0 && stop(k, q[k])) return;
        BigInt m;
        if (!next_quotient(m)) {
            exhausted = true;
            return;
        }
        push_quotient(m);
    }
}

void ContinuedFraction::ensure_q_exceeds(const BigInt& n) {
    expand([&](int, const BigInt& qk) { return qk > n; });
}

ContinuedFraction cf_expand(const AlphaDesc& alpha, const ContinuedFraction::StopFn& stop) {
    ContinuedFraction cf;
    cf.source = alpha;
    switch (alpha.kind) {
    case AlphaDesc::Kind::rational:
    case AlphaDesc::Kind::dyadic:
        cf.rem_num_ = alpha.num;
        cf.rem_den_ = alpha.den;
        break;
    case AlphaDesc::Kind::quotients:
        break;
    }
    cf.expand(stop);
    return cf;
}

ContinuantWindow locate_n(ContinuedFraction& cf, const BigInt& n) {
    if (n < 1) throw DomainError("locate_n requires n >= 1");
    cf.ensure_q_exceeds(n);
    int K = cf.depth();
    for (int k = 1; k <= K; ++k) {
        if (cf.q[k] > n) {
            ContinuantWindow w;
            w.k = k;
            w.q_prev = cf.q[k - 1];
            w.q_cur = cf.q[k];
            w.n = n;
            return w;
        }
    }
    throw InsufficientExpansion("expansion of " + cf.source.text +
                                " exhausted before q_k > " + n.get_str());
}

FundamentalInterval fundamental_interval(const std::vector<std::uint64_t>& prefix) {
    if (prefix.empty()) throw DomainError("fundamental_interval needs a nonempty prefix");
    for (auto m : prefix)
        if (m == 0) throw DomainError("partial quotients must be positive");
    BigInt pk1 = 1, qk1 = 0;   // p_{-1}, q_{-1}
    BigInt pk = 0, qk = 1;     // p_0, q_0
    for (auto m : prefix) {
        BigInt np = BigInt(m) * pk + pk1;
        BigInt nq = BigInt(m) * qk + qk1;
        pk1 = pk;
        qk1 = qk;
        pk = np;
        qk = nq;
    }
    FundamentalInterval iv;
    iv.depth = static_cast<int>(prefix.size());
    iv.prefix = prefix;
    BigRat a = make_rat(pk, qk);
    BigRat b = make_rat(pk + pk1, qk + qk1);
    iv.lo = std::min(a, b);
    iv.hi = std::max(a, b);
    iv.length = make_rat(BigInt(1), qk * (qk + qk1));
    return iv;
}

} // namespace sturmq
