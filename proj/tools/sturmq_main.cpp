#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "sturmq/continued_fraction.hpp"
#include "sturmq/lattice.hpp"
#include "sturmq/limit_laws.hpp"
#include "sturmq/monte_carlo.hpp"
#include "sturmq/parallel.hpp"
#include "sturmq/qfunc.hpp"
#include "sturmq/sturmian.hpp"

using namespace sturmq;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_rat(const BigRat& r) {
    return std::string(r.get_str());
}

struct Table {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> notes;

    void cfg(const std::string& k, const std::string& v) { config.emplace_back(k, v); }

    void write_csv(std::ostream& os) const {
        os << "# sturmq " << subcommand << "\n";
        os << "# config:";
        for (const auto& [k, v] : config) os << ' ' << k << '=' << v;
        os << "\n";
        for (const auto& n : notes) os << "# note: " << n << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << (i ? "," : "") << columns[i];
        os << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << "\n";
        }
    }

    void write_json(std::ostream& os) const {
        nlohmann::json j;
        j["tool"] = "sturmq";
        j["subcommand"] = subcommand;
        nlohmann::json c = nlohmann::json::object();
        for (const auto& [k, v] : config) c[k] = v;
        j["config"] = c;
        j["columns"] = columns;
        j["rows"] = rows;
        j["notes"] = notes;
        os << j.dump(2) << "\n";
    }

    void emit(const std::string& path, bool json) const {
        if (path.empty() || path == "-") {
            json ? write_json(std::cout) : write_csv(std::cout);
            return;
        }
        std::ofstream os(path);
        if (!os) throw DomainError("cannot open output file: " + path);
        json ? write_json(os) : write_csv(os);
    }
};

std::vector<BigRat> parse_grid(const std::string& text) {
    // lo:hi:step (endpoints inclusive within half a step) or a single value
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    std::vector<BigRat> out;
    if (parts.size() == 1) {
        out.push_back(parse_rational(parts[0]));
        return out;
    }
    if (parts.size() != 3) throw DomainError("grid must be lo:hi:step or a single value");
    BigRat lo = parse_rational(parts[0]);
    BigRat hi = parse_rational(parts[1]);
    BigRat step = parse_rational(parts[2]);
    if (step <= 0) throw DomainError("grid step must be positive");
    for (BigRat v = lo; v <= hi + step / 2; v += step) out.push_back(v);
    return out;
}

QFunctionSpec parse_spec_arg(const std::string& text) {
    if (text == "S" || text == "rho" || text == "mu" || text == "nu")
        return QFunctionSpec::builtin(text);
    return QFunctionSpec::from_string(text);
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("STURMQ_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw DomainError("STURMQ_SEED must be an integer");
        }
    }
    return 20260808ULL;
}

BigRat parse_c_arg(const std::string& text) {
    if (text == "kappa") return constants::kappa_rational();
    if (text == "kappa2") {
        double k = constants::kappa();
        auto scaled = static_cast<long>(std::llround(k * k * 1e9));
        return make_rat(BigInt(scaled), BigInt(1000000000L));
    }
    return parse_rational(text);
}

BigRat eps_for(const std::string& rule, std::int64_t n) {
    if (rule == "inv_n") return make_rat(BigInt(1), BigInt(n));
    if (rule == "inv_sqrt_n") {
        auto r = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n))));
        return make_rat(BigInt(1), BigInt(r));
    }
    return parse_rational(rule);   // literal rational
}

struct CommonOpts {
    std::string out = "-";
    std::string format = "csv";
    std::uint64_t seed = default_seed();
    unsigned bits = 128;
    double tol = 1e-4;
    unsigned threads = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", out, "output path, - for stdout");
        cmd->add_option("--format", format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--seed", seed, "PRNG seed (default env STURMQ_SEED)");
        cmd->add_option("--bits", bits, "dyadic precision for sampled slopes");
        cmd->add_option("--tol", tol, "tail tolerance for truncated sums");
        cmd->add_option("--threads", threads, "max worker threads (0 = all cores)");
    }

    void apply(Table& t, const std::string& sub) const {
        set_max_threads(threads);
        t.subcommand = sub;
        t.cfg("seed", std::to_string(seed));
        t.cfg("bits", std::to_string(bits));
        t.cfg("tol", fmt(tol));
        t.cfg("threads", std::to_string(threads));
    }
};

int run_cdf(const CommonOpts& c, const std::string& spec_text, std::int64_t n,
            const std::string& grid_text, const std::string& method) {
    QFunctionSpec spec = parse_spec_arg(spec_text);
    SumOptions opts;
    opts.tol = c.tol;
    opts.method = (method == "direct") ? Method::direct_gcd : Method::mobius;
    bool builtin = spec_text == "S" || spec_text == "rho" || spec_text == "mu" || spec_text == "nu";
    Table t;
    c.apply(t, "cdf");
    t.cfg("spec", spec_text);
    t.cfg("n", std::to_string(n));
    t.cfg("lambda", grid_text);
    t.cfg("method", method);
    t.columns = {"lambda", "F_n_exact", "F_inf", "diff", "certified_bound"};
    for (const BigRat& lam : parse_grid(grid_text)) {
        SumResult r = cdf_exact(spec, lam, n, opts);
        double fn = r.value;
        double fi = builtin ? limit_cdf(parse_law(spec_text), to_double(lam))
                            : std::numeric_limits<double>::quiet_NaN();
        t.rows.push_back({fmt_rat(lam), fmt(fn), fmt(fi), fmt(fn - fi), fmt(r.tail_bound)});
    }
    t.emit(c.out, c.format == "json");
    return 0;
}

int run_density(const CommonOpts& c, const std::string& law_text, const std::string& grid_text) {
    Law law = parse_law(law_text);
    Table t;
    c.apply(t, "density");
    t.cfg("law", law_text);
    t.cfg("lambda", grid_text);
    t.columns = {"lambda", "density"};
    for (const BigRat& lam : parse_grid(grid_text))
        t.rows.push_back({fmt_rat(lam), fmt(density(law, to_double(lam)))});
    t.emit(c.out, c.format == "json");
    return 0;
}

int run_histogram(const CommonOpts& c, const std::string& spec_text, std::int64_t n,
                  std::uint64_t M, const std::string& step_rule, double lo, double hi) {
    QFunctionSpec spec = parse_spec_arg(spec_text);
    double step;
    if (step_rule == "inv_n") step = 1.0 / static_cast<double>(n);
    else if (step_rule == "inv_sqrt_n") step = 1.0 / std::ceil(std::sqrt(static_cast<double>(n)));
    else step = to_double(parse_rational(step_rule));
    if (hi <= lo) {
        // default support windows per law
        lo = (spec_text == "S") ? 2.0 : 0.0;
        hi = (spec_text == "S") ? 8.0 : 1.0;
    }
    AlphaSource src(c.seed, c.bits);
    Histogram h = mc_histogram(spec, n, M, step, src, lo, hi);
    Table t;
    c.apply(t, "histogram");
    t.cfg("spec", spec_text);
    t.cfg("n", std::to_string(n));
    t.cfg("M", std::to_string(M));
    t.cfg("step", fmt(step));
    t.cfg("lo", fmt(lo));
    t.cfg("hi", fmt(hi));
    t.cfg("resampled", std::to_string(h.resampled));
    t.cfg("audit_failures", std::to_string(h.audit_failures));
    t.cfg("underflow", std::to_string(h.underflow));
    t.cfg("overflow", std::to_string(h.overflow));
    t.columns = {"bin_lo", "bin_hi", "count", "scaled"};
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        double blo = h.lo + static_cast<double>(b) * h.step;
        t.rows.push_back({fmt(blo), fmt(blo + h.step), std::to_string(h.counts[b]),
                          fmt(h.scaled.empty() ? 0.0 : h.scaled[b])});
    }
    t.emit(c.out, c.format == "json");
    return 0;
}

int run_secant(const CommonOpts& c, const std::string& spec_text, std::int64_t n,
               const std::string& grid_text, const std::string& eps_rule) {
    QFunctionSpec spec = parse_spec_arg(spec_text);
    bool builtin = spec_text == "S" || spec_text == "rho" || spec_text == "mu" || spec_text == "nu";
    BigRat eps = eps_for(eps_rule, n);
    SumOptions opts;
    opts.tol = c.tol;
    Table t;
    c.apply(t, "secant");
    t.cfg("spec", spec_text);
    t.cfg("n", std::to_string(n));
    t.cfg("lambda", grid_text);
    t.cfg("eps", fmt_rat(eps));
    t.columns = {"lambda", "secant", "limit_density", "diff"};
    for (const BigRat& lam : parse_grid(grid_text)) {
        double s = secant_estimate(spec, n, lam, eps, opts);
        double d = builtin ? density(parse_law(spec_text), to_double(lam))
                           : std::numeric_limits<double>::quiet_NaN();
        t.rows.push_back({fmt_rat(lam), fmt(s), fmt(d), fmt(s - d)});
    }
    t.emit(c.out, c.format == "json");
    return 0;
}

int run_condexp(const CommonOpts& c, const std::string& gamma_text, const std::string& eps_rule,
                const std::string& n_list, std::uint64_t M, bool exact) {
    Gamma gamma = parse_gamma(gamma_text);
    Table t;
    c.apply(t, "condexp");
    t.cfg("gamma", gamma_text);
    t.cfg("eps_rule", eps_rule);
    t.cfg("n", n_list);
    t.cfg("mode", exact ? "exact" : "mc:M=" + std::to_string(M));
    if (exact)
        t.columns = {"n", "eps", "E_S_cond", "asymptotic", "closed_product"};
    else
        t.columns = {"n", "eps", "E_S_cond", "stderr", "accepted_fraction", "asymptotic"};
    std::stringstream ss(n_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::int64_t n = std::stoll(tok);
        BigRat eps = eps_for(eps_rule, n);
        double eps_d = to_double(eps);
        if (eps_d > 0.1)
            t.notes.push_back("eps=" + fmt(eps_d) + " at n=" + tok +
                              ": asymptotic regime not reached");
        double asym = cond_expectation_asymptotic(gamma, eps_d);
        if (exact) {
            SumOptions opts;
            opts.tol = c.tol;
            double v = cond_expectation_exact(gamma, eps, n, opts);
            t.rows.push_back({tok, fmt_rat(eps), fmt(v), fmt(asym),
                              fmt(cond_product_closed(gamma, eps_d))});
        } else {
            AlphaSource src(c.seed, c.bits);
            CondExpEstimate e = mc_cond_expectation(gamma, eps, n, M, src);
            t.rows.push_back({tok, fmt_rat(eps), fmt(e.mean), fmt(e.stderr_mean),
                              fmt(e.accepted_fraction), fmt(asym)});
        }
    }
    t.emit(c.out, c.format == "json");
    return 0;
}

int run_count(const CommonOpts& c, std::int64_t n, const std::string& c_text, std::uint64_t M,
              bool exact) {
    BigRat cr = parse_c_arg(c_text);
    double cd = to_double(cr);
    // limit of E[T_n]: (12/pi^2) log(c) log(2)  (equals 1 at c = kappa)
    double limit = constants::A() * std::log(cd) * std::numbers::ln2;
    Table t;
    c.apply(t, "count");
    t.cfg("n", std::to_string(n));
    t.cfg("c", c_text);
    t.cfg("mode", exact ? "exact" : "mc:M=" + std::to_string(M));
    if (exact) {
        SumOptions opts;
        opts.tol = c.tol;
        SumResult r = continuant_count_mean(n, cr, opts);
        t.columns = {"n", "c", "mean", "limit", "diff"};
        t.rows.push_back({std::to_string(n), fmt(cd), fmt(r.value), fmt(limit),
                          fmt(r.value - limit)});
    } else {
        AlphaSource src(c.seed, c.bits);
        CountEstimate e = mc_continuant_count(n, cr, M, src);
        t.columns = {"n", "c", "mean", "stderr", "limit", "diff"};
        t.rows.push_back({std::to_string(n), fmt(cd), fmt(e.mean), fmt(e.stderr_mean),
                          fmt(limit), fmt(e.mean - limit)});
    }
    t.emit(c.out, c.format == "json");
    return 0;
}

int run_series(const CommonOpts& c, const std::string& alpha_text, std::int64_t n_max) {
    AlphaDesc alpha = parse_alpha(alpha_text, c.bits > 192 ? c.bits : 192);
    auto rows = quotient_series(alpha, n_max);
    Table t;
    c.apply(t, "series");
    t.cfg("alpha", alpha_text);
    t.cfg("n_max", std::to_string(n_max));
    t.columns = {"n", "S_exact", "S"};
    for (const auto& [n, s] : rows)
        t.rows.push_back({std::to_string(n), fmt_rat(s), fmt(to_double(s))});
    t.emit(c.out, c.format == "json");
    return 0;
}

int run_word(const CommonOpts& c, const std::string& alpha_text, const std::string& beta_text,
             std::int64_t length, const std::string& variant_text, std::int64_t factors_n) {
    AlphaDesc alpha = parse_alpha(alpha_text, c.bits > 192 ? c.bits : 192);
    BigRat beta = parse_rational(beta_text);
    Variant v = (variant_text == "ceil") ? Variant::ceil_word : Variant::floor_word;
    WordPrefix w = generate(alpha, beta, static_cast<std::size_t>(length), v);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!c.out.empty() && c.out != "-") {
        file.open(c.out);
        if (!file) throw DomainError("cannot open output file: " + c.out);
        os = &file;
    }
    *os << w.to_string() << "\n";
    if (factors_n > 0) {
        FactorSet fs = factor_set(w, static_cast<std::size_t>(factors_n));
        std::vector<std::string> lines = fs.byte_keys;
        for (const auto& k : fs.packed_keys) {
            std::string f(static_cast<std::size_t>(factors_n), '0');
            for (std::int64_t i = 0; i < factors_n; ++i) {
                bool bit = (i < 64) ? (k[0] >> i) & 1u : (k[1] >> (i - 64)) & 1u;
                if (bit) f[static_cast<std::size_t>(i)] = '1';
            }
            lines.push_back(f);
        }
        std::sort(lines.begin(), lines.end());
        for (const auto& f : lines) *os << f << "\n";
    }
    return 0;
}

int run_verify(const CommonOpts& c, std::int64_t n_max, std::uint64_t samples) {
    AlphaSource src(c.seed, c.bits);
    std::uint64_t formula_fail = 0, complexity_fail = 0, identity_fail = 0, resampled = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        AlphaDesc alpha = sample_alpha(src);
        std::vector<RecurrenceCheck> suite;
        try {
            suite = recurrence_suite(alpha, n_max);
        } catch (const Error&) {
            ++resampled;
            --i;
            continue;
        }
        for (const auto& chk : suite) {
            if (!chk.match) ++formula_fail;
            if (chk.factor_count != static_cast<std::size_t>(chk.n) + 1) ++complexity_fail;
        }
        ContinuedFraction cf = cf_expand(alpha, [&](int, const BigInt& qk) { return qk > n_max; });
        for (std::int64_t n = 1; n <= n_max; ++n) {
            try {
                check_identities(cf, BigInt(n));
            } catch (const Error&) {
                ++identity_fail;
            }
        }
    }
    std::uint64_t failures = formula_fail + complexity_fail + identity_fail;
    std::cout << "recurrence formula vs oracle: " << (formula_fail ? "FAIL" : "ok")
              << " (" << formula_fail << " mismatches)\n"
              << "complexity p(n) = n+1:        " << (complexity_fail ? "FAIL" : "ok")
              << " (" << complexity_fail << " mismatches)\n"
              << "position identities:          " << (identity_fail ? "FAIL" : "ok")
              << " (" << identity_fail << " violations)\n"
              << "degenerate draws resampled:   " << resampled << "\n";
    if (failures == 0) {
        std::cout << "all checks passed (" << samples << " slopes, n <= " << n_max << ")\n";
        return 0;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact, asymptotic and Monte Carlo statistics of the recurrence quotient "
                 "of random Sturmian words"};
    app.require_subcommand(1);

    CommonOpts copt;

    // cdf
    auto* cdf = app.add_subcommand("cdf", "exact distribution F_n vs its limit");
    std::string cdf_spec = "S", cdf_grid = "2:6:1/10", cdf_method = "mobius";
    std::int64_t cdf_n = 1000;
    cdf->add_option("--spec", cdf_spec, "S|rho|mu|nu or a1,b1,c1,a2,b2,c2");
    cdf->add_option("--n", cdf_n, "lattice size")->required();
    cdf->add_option("--lambda", cdf_grid, "grid lo:hi:step or single value");
    cdf->add_option("--method", cdf_method, "mobius or direct")
        ->check(CLI::IsMember({"mobius", "direct"}));
    copt.attach(cdf);

    // density
    auto* den = app.add_subcommand("density", "closed-form limit densities");
    std::string den_law = "S", den_grid = "2:6:1/10";
    den->add_option("--law", den_law, "S|rho|mu|nu");
    den->add_option("--lambda", den_grid, "grid");
    copt.attach(den);

    // histogram
    auto* hist = app.add_subcommand("histogram", "Monte Carlo histogram of a Q-function");
    std::string h_spec = "S", h_step = "inv_sqrt_n";
    std::int64_t h_n = 1000;
    std::uint64_t h_M = 1000000;
    double h_lo = 0, h_hi = 0;
    hist->add_option("--spec", h_spec);
    hist->add_option("--n", h_n);
    hist->add_option("--M", h_M, "number of sampled slopes");
    hist->add_option("--step", h_step, "inv_n | inv_sqrt_n | rational");
    hist->add_option("--lo", h_lo);
    hist->add_option("--hi", h_hi);
    copt.attach(hist);

    // secant
    auto* sec = app.add_subcommand("secant", "secants of F_n against the limit density");
    std::string s_spec = "S", s_grid = "2.1:2.9:1/10", s_rule = "inv_sqrt_n";
    std::int64_t s_n = 1000;
    sec->add_option("--spec", s_spec);
    sec->add_option("--n", s_n);
    sec->add_option("--lambda", s_grid);
    sec->add_option("--eps-rule", s_rule, "inv_n | inv_sqrt_n | rational");
    copt.attach(sec);

    // condexp
    auto* ce = app.add_subcommand("condexp", "conditional expectation of S_n");
    std::string ce_gamma = "nu", ce_rule = "inv_n", ce_ns = "1000";
    std::uint64_t ce_M = 1000000;
    bool ce_exact = false;
    ce->add_option("--gamma", ce_gamma, "rho|mu|nu");
    ce->add_option("--eps-rule", ce_rule, "inv_n | inv_sqrt_n | rational");
    ce->add_option("--n", ce_ns, "comma-separated n list");
    ce->add_option("--M", ce_M);
    ce->add_flag("--exact", ce_exact, "exact lattice sums instead of Monte Carlo");
    copt.attach(ce);

    // count
    auto* cnt = app.add_subcommand("count", "continuants in [n, c n)");
    std::string cnt_c = "kappa";
    std::int64_t cnt_n = 1000;
    std::uint64_t cnt_M = 1000000;
    bool cnt_exact = false;
    cnt->add_option("--n", cnt_n);
    cnt->add_option("--c", cnt_c, "rational, kappa, or kappa2");
    cnt->add_option("--M", cnt_M);
    cnt->add_flag("--exact", cnt_exact);
    copt.attach(cnt);

    // series
    auto* ser = app.add_subcommand("series", "n -> S(alpha, n) for one slope");
    std::string ser_alpha = "golden";
    std::int64_t ser_nmax = 1000;
    ser->add_option("--alpha", ser_alpha, "rat:p/q | dec:0.x | cf:... | golden");
    ser->add_option("--n-max", ser_nmax);
    copt.attach(ser);

    // word (debug dump)
    auto* wrd = app.add_subcommand("word", "dump a word prefix as 0/1 text");
    std::string w_alpha = "golden", w_beta = "0", w_variant = "floor";
    std::int64_t w_len = 100, w_factors = 0;
    wrd->add_option("--alpha", w_alpha);
    wrd->add_option("--beta", w_beta);
    wrd->add_option("--length", w_len);
    wrd->add_option("--variant", w_variant)->check(CLI::IsMember({"floor", "ceil"}));
    wrd->add_option("--factors", w_factors, "also list the distinct factors of this length");
    copt.attach(wrd);

    // verify
    auto* ver = app.add_subcommand("verify", "recurrence-oracle and identity suites");
    std::int64_t ver_nmax = 50;
    std::uint64_t ver_samples = 100;
    ver->add_option("--n-max", ver_nmax);
    ver->add_option("--samples", ver_samples);
    copt.attach(ver);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cdf) return run_cdf(copt, cdf_spec, cdf_n, cdf_grid, cdf_method);
        if (*den) return run_density(copt, den_law, den_grid);
        if (*hist) return run_histogram(copt, h_spec, h_n, h_M, h_step, h_lo, h_hi);
        if (*sec) return run_secant(copt, s_spec, s_n, s_grid, s_rule);
        if (*ce) return run_condexp(copt, ce_gamma, ce_rule, ce_ns, ce_M, ce_exact);
        if (*cnt) return run_count(copt, cnt_n, cnt_c, cnt_M, cnt_exact);
        if (*ser) return run_series(copt, ser_alpha, ser_nmax);
        if (*wrd) return run_word(copt, w_alpha, w_beta, w_len, w_variant, w_factors);
        if (*ver) return run_verify(copt, ver_nmax, ver_samples);
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "computation refused: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
