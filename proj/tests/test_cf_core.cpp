#include <doctest.h>

#include <random>

#include "sturmq/continued_fraction.hpp"

using namespace sturmq;

namespace {

ContinuedFraction expand_until(const AlphaDesc& a, long bound) {
    return cf_expand(a, [&](int, const BigInt& qk) { return qk > bound; });
}

} // namespace

TEST_CASE("euclid expansion of 5/7") {
    auto cf = expand_until(AlphaDesc::from_rational(5, 7), 1000);
    REQUIRE(cf.exhausted);
    REQUIRE(cf.quotients.size() == 3);
    CHECK(cf.quotients[0] == 1);
    CHECK(cf.quotients[1] == 2);
    CHECK(cf.quotients[2] == 2);
    CHECK(cf.q[0] == 1);
    CHECK(cf.q[1] == 1);
    CHECK(cf.q[2] == 3);
    CHECK(cf.q[3] == 7);
    CHECK(cf.p[3] == 5);
}

TEST_CASE("golden slope has all-ones quotients and Fibonacci continuants") {
    auto cf = expand_until(golden_alpha(128), 100000);
    REQUIRE(cf.depth() >= 20);
    for (int k = 0; k < 20; ++k) CHECK(cf.quotients[static_cast<std::size_t>(k)] == 1);
    long fib[10] = {1, 1, 2, 3, 5, 8, 13, 21, 34, 55};
    for (int k = 0; k < 10; ++k) CHECK(cf.q[static_cast<std::size_t>(k)] == fib[k]);
}

TEST_CASE("rational 1/2 exhausts after one quotient") {
    auto cf = expand_until(AlphaDesc::from_rational(1, 2), 1000);
    REQUIRE(cf.exhausted);
    REQUIRE(cf.quotients.size() == 1);
    CHECK(cf.quotients[0] == 2);
}

TEST_CASE("locate_n on Fibonacci continuants: half-open windows") {
    auto cf = expand_until(golden_alpha(128), 1000);
    auto w4 = locate_n(cf, 4);
    CHECK(w4.q_prev == 3);
    CHECK(w4.q_cur == 5);
    auto w5 = locate_n(cf, 5);   // left end included
    CHECK(w5.q_prev == 5);
    CHECK(w5.q_cur == 8);
    auto w1 = locate_n(cf, 1);   // degenerate q0 = q1 = 1 skipped
    CHECK(w1.q_prev == 1);
    CHECK(w1.q_cur == 2);
}

TEST_CASE("locate_n past an exhausted expansion raises InsufficientExpansion") {
    auto cf = expand_until(AlphaDesc::from_rational(5, 7), 1000);
    CHECK_THROWS_AS(locate_n(cf, 10), InsufficientExpansion);
}

TEST_CASE("locate_n re-expands on demand") {
    auto cf = cf_expand(golden_alpha(128), [](int k, const BigInt&) { return k >= 3; });
    REQUIRE(cf.depth() == 3);
    auto w = locate_n(cf, 100);
    CHECK(w.q_prev == 89);
    CHECK(w.q_cur == 144);
}

TEST_CASE("fundamental intervals at depth one") {
    auto i1 = fundamental_interval({1});
    CHECK(i1.lo == make_rat(1, 2));
    CHECK(i1.hi == make_rat(1, 1));
    CHECK(i1.length == make_rat(1, 2));
    auto i2 = fundamental_interval({2});
    CHECK(i2.lo == make_rat(1, 3));
    CHECK(i2.hi == make_rat(1, 2));
    CHECK(i2.length == make_rat(1, 6));
}

TEST_CASE("depth-one interval lengths telescope to 1 - 1/(M+1)") {
    for (unsigned long M : {5ul, 20ul, 100ul}) {
        BigRat sum = 0;
        for (std::uint64_t m = 1; m <= M; ++m) sum += fundamental_interval({m}).length;
        BigRat expect = 1 - make_rat(BigInt(1), BigInt(M + 1));
        CHECK(sum == expect);
    }
}

TEST_CASE("pseudo-partition at depth 2 grows monotonically toward 1") {
    auto mass = [](std::uint64_t M) {
        BigRat sum = 0;
        for (std::uint64_t m1 = 1; m1 <= M; ++m1)
            for (std::uint64_t m2 = 1; m2 <= M; ++m2)
                sum += fundamental_interval({m1, m2}).length;
        return sum;
    };
    BigRat s10 = mass(10), s30 = mass(30);
    CHECK(s10 < s30);
    CHECK(s30 < 1);
    CHECK(to_double(s30) > 0.9);
}

TEST_CASE("determinant and coprimality invariants over random rationals") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        std::uint64_t den = rng() % 999983 + 17;
        std::uint64_t num = rng() % (den - 1) + 1;
        auto cf = expand_until(AlphaDesc::from_rational(BigInt(num), BigInt(den)), 1L << 30);
        for (int k = 1; k <= cf.depth(); ++k) {
            auto ku = static_cast<std::size_t>(k);
            BigInt det = cf.p[ku] * cf.q[ku - 1] - cf.p[ku - 1] * cf.q[ku];
            CHECK(abs(det) == 1);
            BigInt g;
            mpz_gcd(g.get_mpz_t(), cf.p[ku].get_mpz_t(), cf.q[ku].get_mpz_t());
            CHECK(g == 1);
            CHECK(cf.q[ku] >= cf.q[ku - 1]);
            if (k >= 2) CHECK(cf.q[ku] > cf.q[ku - 1]);
        }
    }
}

TEST_CASE("located windows always satisfy q_prev <= n < q_cur") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
        std::uint64_t den = (std::uint64_t(1) << 40) + rng() % 1000000;
        std::uint64_t num = rng() % (den / 2) + den / 4;
        auto cf = expand_until(AlphaDesc::from_rational(BigInt(num), BigInt(den)), 1L << 20);
        for (long n : {1L, 2L, 17L, 100L, 5000L}) {
            auto w = locate_n(cf, n);
            CHECK(w.q_prev <= n);
            CHECK(w.q_cur > n);
        }
    }
}

TEST_CASE("alpha grammar round-trips") {
    auto r = parse_alpha("rat:5/7");
    CHECK(r.kind == AlphaDesc::Kind::rational);
    CHECK(r.num == 5);
    CHECK(r.den == 7);

    auto d = parse_alpha("dec:0.625", 64);
    CHECK(d.kind == AlphaDesc::Kind::dyadic);
    BigInt expect = BigInt(5) << 61;   // 0.625 = 5/8 exactly on the dyadic grid
    CHECK(d.num == expect);

    auto e = parse_alpha("cf:1,2,2");
    auto cf = expand_until(e, 1000);
    CHECK(cf.exhausted);
    CHECK(cf.q[3] == 7);

    auto p = parse_alpha("cf:(1)*");
    auto cfp = expand_until(p, 100);
    CHECK(!cfp.exhausted);
    CHECK(cfp.q.back() > 100);

    CHECK_THROWS_AS(parse_alpha("rat:9/7"), DomainError);
    CHECK_THROWS_AS(parse_alpha("nonsense:1"), DomainError);
    CHECK_THROWS_AS(parse_alpha("cf:0,1"), DomainError);
}

TEST_CASE("dyadic refinement keeps quotients up to the located depth") {
    // refining golden from 128 to 192 bits must not change the expansion
    // down to moderate windows
    auto c1 = expand_until(golden_alpha(128), 1L << 20);
    auto c2 = expand_until(golden_alpha(192), 1L << 20);
    int k = locate_n(c1, 100000).k;
    for (int i = 0; i < k; ++i)
        CHECK(c1.quotients[static_cast<std::size_t>(i)] == c2.quotients[static_cast<std::size_t>(i)]);
}
