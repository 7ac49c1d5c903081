#include "sturmq/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace sturmq {

namespace {

// Kronrod 15 abscissae/weights on [-1,1] with embedded Gauss 7.
constexpr double kx[8] = {
    0.0,
    0.2077849550078984676006894037732449,
    0.4058451513773971669066064120769615,
    0.5860872354676911302941448382587296,
    0.7415311855993944398638647732807884,
    0.8648644233597690727897127886409262,
    0.9491079123427585245261896840478513,
    0.9914553711208126392068546975263285,
};
constexpr double kw[8] = {
    0.2094821410847278280129991748917143,
    0.2044329400752988924141619992346491,
    0.1903505780647854099132564024210137,
    0.1690047266392679028265834265985503,
    0.1406532597155259187451895905102379,
    0.1047900103222501838398763225415180,
    0.0630920926299785532907006631892042,
    0.0229353220105292249637320080589695,
};
constexpr double gw[4] = {
    0.4179591836734693877551020408163265,   // node 0
    0.3818300505051189449503697754889751,   // nodes +-0.405845...
    0.2797053914892766679014677714237796,   // nodes +-0.741531...
    0.1294849661688696932706114326790820,   // nodes +-0.949107...
};

struct Panel {
    double a, b;
    int depth;
};

void gk15(const std::function<double(double)>& f, double a, double b,
          double& value, double& err) {
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    double f0 = f(mid);
    double k = kw[0] * f0;
    double g = gw[0] * f0;
    for (int i = 1; i < 8; ++i) {
        double dx = half * kx[i];
        double fi = f(mid + dx) + f(mid - dx);
        k += kw[i] * fi;
        if (i == 2) g += gw[1] * fi;
        if (i == 4) g += gw[2] * fi;
        if (i == 6) g += gw[3] * fi;
    }
    value = k * half;
    double diff = std::fabs((k - g) * half);
    err = std::pow(200.0 * diff, 1.5);
    if (!std::isfinite(err) || err < diff) err = diff;
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    std::vector<Panel> stack{{a, b, 0}};
    double total = 0.0;
    double span = std::fabs(b - a);
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        double v, e;
        gk15(f, p.a, p.b, v, e);
        double local_tol = abs_tol * std::max(std::fabs(p.b - p.a) / span, 1e-300) * 0.5;
        if ((std::isfinite(v) && e <= std::max(local_tol, 1e-300)) || p.depth >= max_depth) {
            if (std::isfinite(v)) total += v;
            continue;
        }
        double mid = 0.5 * (p.a + p.b);
        stack.push_back({p.a, mid, p.depth + 1});
        stack.push_back({mid, p.b, p.depth + 1});
    }
    return total;
}

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>& splits, double abs_tol, int max_depth) {
    std::vector<double> pts{a};
    for (double s : splits)
        if (s > a && s < b) pts.push_back(s);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += integrate(f, pts[i], pts[i + 1], abs_tol / static_cast<double>(pts.size()),
                           max_depth);
    return total;
}

} // namespace sturmq
