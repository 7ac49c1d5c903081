#include <doctest.h>

#include <cmath>
#include <set>

#include "sturmq/lattice.hpp"
#include "sturmq/parallel.hpp"
#include "sturmq/limit_laws.hpp"
#include "sturmq/monte_carlo.hpp"

using namespace sturmq;

TEST_CASE("philox blocks are pure in (key, counter)") {
    auto a = philox4x32(42, 0, 0);
    auto b = philox4x32(42, 0, 0);
    CHECK(a == b);
    CHECK(philox4x32(42, 0, 1) != a);
    CHECK(philox4x32(43, 0, 0) != a);
}

TEST_CASE("same seed gives the same stream; substreams are disjoint") {
    AlphaSource s1(7), s2(7);
    for (int i = 0; i < 16; ++i) CHECK(s1.next_numerator() == s2.next_numerator());
    AlphaSource a = AlphaSource(7).substream(1);
    AlphaSource b = AlphaSource(7).substream(2);
    std::set<std::string> seen;
    for (int i = 0; i < 64; ++i) {
        seen.insert(a.next_numerator().get_str());
        seen.insert(b.next_numerator().get_str());
    }
    CHECK(seen.size() == 128);
}

TEST_CASE("sampled slopes are uniform in (0,1)") {
    AlphaSource src(2024);
    const int M = 200000;
    long double acc = 0;
    for (int i = 0; i < M; ++i) {
        BigInt a = src.next_numerator();
        acc += BigRat(a, BigInt(1) << 128).get_d();
    }
    double mean = static_cast<double>(acc / M);
    double sigma = 1.0 / std::sqrt(12.0 * M);
    CHECK(std::fabs(mean - 0.5) < 4 * sigma);
}

TEST_CASE("histograms conserve counts and integrate to 1") {
    Histogram h = mc_histogram(QFunctionSpec::builtin("S"), 500, 200000, 1.0 / 22, AlphaSource(5),
                               2.0, 8.0);
    std::uint64_t binned = 0;
    for (auto c : h.counts) binned += c;
    CHECK(binned + h.underflow + h.overflow == h.total);
    CHECK(h.total == 200000);
    CHECK(h.underflow == 0);   // S >= 2 always
    double mass = 0;
    for (double s : h.scaled) mass += s * h.step;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.resampled == 0);
    CHECK(h.audit_failures == 0);
}

TEST_CASE("scaling an empty histogram is refused") {
    Histogram h = mc_histogram(QFunctionSpec::builtin("S"), 500, 0, 0.5, AlphaSource(5), 2.0, 8.0);
    CHECK(h.total == 0);
    CHECK_THROWS_AS(h.scale(), Refused);
}

TEST_CASE("histogram bins track the exact finite-n distribution") {
    const std::int64_t n = 500;
    const std::uint64_t M = 200000;
    const double step = 0.25;
    Histogram h = mc_histogram(QFunctionSpec::builtin("S"), n, M, step, AlphaSource(11), 2.0, 6.0);
    auto S = QFunctionSpec::builtin("S");
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        BigRat lo = make_rat(8 + static_cast<long>(b), 4);       // 2 + b/4
        BigRat hi = make_rat(8 + static_cast<long>(b) + 1, 4);
        double p = cdf_exact(S, hi, n).value - cdf_exact(S, lo, n).value;
        double phat = static_cast<double>(h.counts[b]) / static_cast<double>(h.total);
        double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(M));
        CHECK(std::fabs(phat - p) <= 5 * sigma + 1e-6);
    }
}

TEST_CASE("empirical cdf sits in the binomial envelope of the exact cdf") {
    const std::int64_t n = 500;
    const std::uint64_t M = 200000;
    auto S = QFunctionSpec::builtin("S");
    std::vector<BigRat> grid;
    for (int i = 0; i < 8; ++i) grid.push_back(make_rat(21 + 2 * i, 10));
    auto emp = mc_empirical_cdf(S, n, M, grid, AlphaSource(23));
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double f = cdf_exact(S, grid[j], n).value;
        double sigma = std::sqrt(std::max(f * (1 - f), 1e-12) / static_cast<double>(M));
        CHECK(std::fabs(emp[j] - f) <= 4 * sigma);
    }
}

TEST_CASE("mc conditional expectation agrees with the exact lattice value") {
    const std::int64_t n = 500;
    BigRat eps = make_rat(1, n);
    auto mc = mc_cond_expectation(Gamma::nu, eps, n, 400000, AlphaSource(31));
    double exact = cond_expectation_exact(Gamma::nu, eps, n);
    CHECK(std::fabs(mc.mean - exact) <= 4 * mc.stderr_mean);
    CHECK(mc.accepted_fraction > 0.99);   // acceptance is 1 - O(eps)
    CHECK(mc.resampled == 0);
}

TEST_CASE("mc regression of the conditional mean against log n") {
    // slope of E[S | gamma >= 1/n] in log n matches the exact lattice slope;
    // for nu the drift is small enough that the A = 12/pi^2 window applies
    const std::vector<std::int64_t> ns = {100, 1000, 10000};
    const std::uint64_t M = 200000;
    std::vector<double> lx;
    for (auto n : ns) lx.push_back(std::log(static_cast<double>(n)));
    double xbar = (lx[0] + lx[1] + lx[2]) / 3;
    double sxx = 0;
    for (double x : lx) sxx += (x - xbar) * (x - xbar);

    for (auto gamma : {Gamma::nu, Gamma::mu, Gamma::rho}) {
        std::uint64_t draws = (gamma == Gamma::nu) ? 1000000 : M;
        double num_mc = 0, num_ex = 0, var_slope = 0;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            BigRat eps = make_rat(1, ns[i]);
            auto mc = mc_cond_expectation(gamma, eps, ns[i], draws, AlphaSource(37));
            double ex = cond_expectation_exact(gamma, eps, ns[i]);
            double w = (lx[i] - xbar) / sxx;
            num_mc += w * mc.mean;
            num_ex += w * ex;
            var_slope += w * w * mc.stderr_mean * mc.stderr_mean;
        }
        CHECK(std::fabs(num_mc - num_ex) <= 4 * std::sqrt(var_slope));
        if (gamma == Gamma::nu)
            CHECK(std::fabs(num_mc - constants::A()) < 0.05);
    }
}

TEST_CASE("mc continuant counting approaches 1 at kappa") {
    const std::int64_t n = 500;
    BigRat c = make_rat(3275823, 1000000);   // kappa to 1e-6
    auto mc = mc_continuant_count(n, c, 200000, AlphaSource(41));
    double exact = continuant_count_mean(n, c).value;
    CHECK(std::fabs(mc.mean - exact) <= 4 * mc.stderr_mean);
    CHECK(mc.mean == doctest::Approx(1.0).epsilon(0.02));
    auto empty = mc_continuant_count(n, BigRat(1), 1000, AlphaSource(41));
    CHECK(empty.mean == 0.0);
}

TEST_CASE("quotient series sawtooth on the golden slope") {
    auto series = quotient_series(golden_alpha(192), 200);
    auto cf = cf_expand(golden_alpha(192), [](int, const BigInt& q) { return q > 200; });
    // peaks 2 + 1/rho at n = q_{k-1}
    for (int k = 3; k <= 8; ++k) {
        long qk1 = cf.q[static_cast<std::size_t>(k - 1)].get_si();
        long qk = cf.q[static_cast<std::size_t>(k)].get_si();
        if (qk1 > 200) break;
        BigRat peak = series[static_cast<std::size_t>(qk1 - 1)].second;
        CHECK(peak == 2 + make_rat(qk, qk1));
    }
    // troughs just before q_k are local minima
    for (long qk : {8L, 13L, 21L, 34L}) {
        BigRat trough = series[static_cast<std::size_t>(qk - 2)].second;   // n = q_k - 1
        CHECK(trough < series[static_cast<std::size_t>(qk - 3)].second);
        CHECK(trough < series[static_cast<std::size_t>(qk - 1)].second);
    }
    // golden quotients are bounded, so the sawtooth is bounded
    for (const auto& [n, s] : series) CHECK(s <= 4);
}

TEST_CASE("a huge quotient spikes the series to about 2 + m") {
    auto series = quotient_series(
        AlphaDesc::from_quotients({1, 1000, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, false),
        10);
    // q = 1, 1, 1001, ...: n = 1 lies in [1, 1001)
    CHECK(series[0].second == make_rat(1003, 1));
}

TEST_CASE("series propagates InsufficientExpansion for rational slopes") {
    CHECK_THROWS_AS(quotient_series(AlphaDesc::from_rational(5, 7), 10), InsufficientExpansion);
}

TEST_CASE("secant of the exact cdf approximates the limit density") {
    double s = secant_estimate(QFunctionSpec::builtin("S"), 2000, make_rat(5, 2), make_rat(1, 45));
    CHECK(std::fabs(s - density(Law::S, 2.5)) < 0.05);
}

TEST_CASE("monte carlo runs are bit-identical for any worker count") {
    auto run = [] {
        return mc_histogram(QFunctionSpec::builtin("S"), 300, 50000, 0.25, AlphaSource(13), 2.0,
                            6.0);
    };
    set_max_threads(1);
    Histogram h1 = run();
    set_max_threads(2);
    Histogram h2 = run();
    set_max_threads(0);
    CHECK(h1.counts == h2.counts);
    CHECK(h1.total == h2.total);
    auto c1 = mc_cond_expectation(Gamma::nu, make_rat(1, 300), 300, 50000, AlphaSource(17));
    set_max_threads(1);
    auto c2 = mc_cond_expectation(Gamma::nu, make_rat(1, 300), 300, 50000, AlphaSource(17));
    set_max_threads(0);
    CHECK(c1.mean == c2.mean);
    CHECK(c1.accepted == c2.accepted);
}

TEST_CASE("mc continuant counting doubles at kappa squared") {
    BigRat c2 = make_rat(10731016, 1000000);   // kappa^2 to 1e-6
    auto mc = mc_continuant_count(500, c2, 200000, AlphaSource(43));
    double exact = continuant_count_mean(500, c2).value;
    CHECK(std::fabs(mc.mean - exact) <= 4 * mc.stderr_mean);
    CHECK(mc.mean == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("high-precision sampling falls back to the exact big-integer path") {
    // bits > 128 leaves the 128-bit fast lane; results must stay sane
    AlphaSource wide(77, 192);
    Histogram h = mc_histogram(QFunctionSpec::builtin("S"), 200, 2000, 0.5, wide, 2.0, 8.0);
    CHECK(h.total == 2000);
    CHECK(h.audit_failures == 0);
    auto ce = mc_cond_expectation(Gamma::nu, make_rat(1, 200), 200, 2000, AlphaSource(77, 192));
    double exact = cond_expectation_exact(Gamma::nu, make_rat(1, 200), 200);
    CHECK(std::fabs(ce.mean - exact) <= 5 * ce.stderr_mean);
    auto ct = mc_continuant_count(200, make_rat(5, 2), 2000, AlphaSource(77, 192));
    double lattice = continuant_count_mean(200, make_rat(5, 2)).value;
    CHECK(std::fabs(ct.mean - lattice) <= 5 * ct.stderr_mean);
}
