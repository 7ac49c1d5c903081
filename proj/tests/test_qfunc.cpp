#include <doctest.h>

#include <random>

#include "sturmq/monte_carlo.hpp"
#include "sturmq/qfunc.hpp"
#include "sturmq/sturmian.hpp"

using namespace sturmq;

TEST_CASE("builtin coefficient tuples") {
    auto S = QFunctionSpec::builtin("S");
    CHECK(S.a1 == 1); CHECK(S.b1 == 1); CHECK(S.c1 == 1);
    CHECK(S.a2 == 0); CHECK(S.b2 == 0); CHECK(S.c2 == 1);
    auto nu = QFunctionSpec::builtin("nu");
    CHECK(nu.a1 == 0); CHECK(nu.b1 == 0); CHECK(nu.c1 == 1);
    CHECK(nu.a2 == 0); CHECK(nu.b2 == 1); CHECK(nu.c2 == 0);
    auto mu = QFunctionSpec::builtin("mu");
    CHECK(mu.a1 == -1); CHECK(mu.b1 == 0); CHECK(mu.c1 == 1);
    CHECK(mu.a2 == -1); CHECK(mu.b2 == 1); CHECK(mu.c2 == 0);
    auto rho = QFunctionSpec::builtin("rho");
    CHECK(rho.a1 == 1); CHECK(rho.b1 == 0); CHECK(rho.c1 == 0);
    CHECK(rho.a2 == 0); CHECK(rho.b2 == 1); CHECK(rho.c2 == 0);
    CHECK_THROWS_AS(QFunctionSpec::builtin("sigma"), DomainError);
}

TEST_CASE("exact Q-values on the golden window (3,5) at n = 4") {
    auto cf = cf_expand(golden_alpha(128), [](int, const BigInt& q) { return q > 100; });
    CHECK(eval_q(QFunctionSpec::builtin("S"), cf, 4).value == 3);
    CHECK(eval_q(QFunctionSpec::builtin("rho"), cf, 4).value == make_rat(3, 5));
    CHECK(eval_q(QFunctionSpec::builtin("nu"), cf, 4).value == make_rat(4, 5));
    CHECK(eval_q(QFunctionSpec::builtin("mu"), cf, 4).value == make_rat(1, 2));
}

TEST_CASE("nu stays below 1 at the right edge of a window") {
    auto cf = cf_expand(golden_alpha(128), [](int, const BigInt& q) { return q > 100; });
    auto v = eval_q(QFunctionSpec::builtin("nu"), cf, 7);   // window (5,8)
    CHECK(v.value == make_rat(7, 8));
    CHECK(v.value < 1);
    CHECK(v.value > eval_q(QFunctionSpec::builtin("rho"), cf, 7).value);
}

TEST_CASE("identities hold exactly on the golden window") {
    auto cf = cf_expand(golden_alpha(128), [](int, const BigInt& q) { return q > 100; });
    auto r = check_identities(cf, 4);
    CHECK(r.S == 3);
    CHECK(r.rho == make_rat(3, 5));
    CHECK(r.nu == make_rat(4, 5));
    CHECK(r.S == 1 + (1 + r.rho) / r.nu);
    CHECK_FALSE(r.upper_bound_attained);
}

TEST_CASE("upper bound 2 + 1/rho is attained exactly at n = q_{k-1}") {
    auto cf = cf_expand(golden_alpha(128), [](int, const BigInt& q) { return q > 100; });
    auto r = check_identities(cf, 5);   // n = q_{k-1} of the window (5,8)
    CHECK(r.upper_bound_attained);
    CHECK(r.S == 2 + 1 / r.rho);
    CHECK(r.nu == r.rho);
}

TEST_CASE("S approaches 2 + rho at the right edge of a large window") {
    // big second quotient: alpha = [1, 50, 1, 1, ...]
    auto cf = cf_expand(AlphaDesc::from_quotients({1, 50, 1, 1, 1, 1, 1, 1}, false),
                        [](int, const BigInt& q) { return q > 10000; });
    // q = 1, 1, 51, 52, ...: n = 50 sits at the right edge of [1, 51)
    auto r = check_identities(cf, 50);
    CHECK(r.rho == make_rat(1, 51));
    BigRat gap = r.S - (2 + r.rho);
    CHECK(gap > 0);
    CHECK(to_double(gap) < 0.1);
}

TEST_CASE("identities and bounds over a random corpus") {
    AlphaSource src(99, 128);
    for (int t = 0; t < 50; ++t) {
        AlphaDesc a = sample_alpha(src);
        auto cf = cf_expand(a, [](int, const BigInt& q) { return q > 2000; });
        for (long n : {1L, 2L, 3L, 10L, 63L, 500L}) {
            auto r = check_identities(cf, n);   // throws on any violation
            CHECK(r.S >= 2 + r.rho);
            CHECK(r.S <= 2 + 1 / r.rho);
            CHECK(r.mu >= 0);
            CHECK(r.mu < 1);
        }
    }
}

TEST_CASE("eval_q(S) agrees with the recurrence formula") {
    AlphaSource src(123, 128);
    auto S = QFunctionSpec::builtin("S");
    for (int t = 0; t < 20; ++t) {
        AlphaDesc a = sample_alpha(src);
        auto cf = cf_expand(a, [](int, const BigInt& q) { return q > 200; });
        for (long n : {1L, 7L, 40L, 111L}) {
            BigInt R = recurrence_formula(cf, n);
            CHECK(eval_q(S, cf, n).value == make_rat(R + 1, BigInt(n)));
        }
    }
}

TEST_CASE("custom specs parse, normalize, and validate") {
    auto s = QFunctionSpec::from_string("1,1,1,0,0,1");
    CHECK(s.a1 == 1);
    CHECK(s.c2 == 1);
    // rational coefficients are cleared of denominators
    auto h = QFunctionSpec::from_string("1/2,1/2,1/2,0,0,1/2");
    CHECK(h.a1 == 1);
    CHECK(h.c2 == 1);
    // proportional triples define a constant: rejected
    CHECK_THROWS_AS(QFunctionSpec::from_string("1,1,1,2,2,2"), DomainError);
    // must depend on y
    CHECK_THROWS_AS(QFunctionSpec::from_string("1,0,1,1,0,2"), DomainError);
    // f = 1/(x-y) is negative on R
    CHECK_THROWS_AS(QFunctionSpec::from_string("0,0,1,1,-1,0"), DomainError);
    // malformed literals
    CHECK_THROWS_AS(QFunctionSpec::from_string("1,2,3"), DomainError);
}

TEST_CASE("denominator sign is normalized to positive on R") {
    // (x - 1)/(x - y) equals (1 - x)/(y - x) after normalization
    auto s = QFunctionSpec::from_string("1,0,-1,1,-1,0");
    CHECK(s.b2 == 1);
    CHECK(s.a1 == -1);
    auto cf = cf_expand(golden_alpha(128), [](int, const BigInt& q) { return q > 100; });
    CHECK(eval_q(s, cf, 4).value == make_rat(1, 2));
}

TEST_CASE("singular evaluation is guarded") {
    auto cf = cf_expand(golden_alpha(128), [](int, const BigInt& q) { return q > 100; });
    QFunctionSpec s = QFunctionSpec::builtin("S");
    // denominator x + y - 2 vanishes at (x,y) = (3/4, 5/4)
    s.a2 = 1; s.b2 = 1; s.c2 = -2;
    s.name = "singular";
    CHECK_THROWS_AS(eval_q(s, cf, 4), SingularEvaluation);
}
