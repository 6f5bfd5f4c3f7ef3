#include "hslab/quadrature.hpp"

#include "hslab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hslab {

namespace {

// Gauss-Legendre nodes by Newton iteration on P_n; machine-accurate and
// deterministic, so nothing has to be hardcoded to 30+ digits.
void legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

struct Rule {
    std::vector<double> x, w;
};

const Rule& rule16() {
    static Rule r = [] {
        Rule t;
        legendre_rule(16, t.x, t.w);
        return t;
    }();
    return r;
}

const Rule& rule8() {
    static Rule r = [] {
        Rule t;
        legendre_rule(8, t.x, t.w);
        return t;
    }();
    return r;
}

double sum_panels(const std::function<double(double)>& g, double a, double b, int npanels,
                  const Rule& rule, double* peak = nullptr) {
    const double h = (b - a) / npanels;
    double tot = 0.0;
    double pk = 0.0;
    for (int i = 0; i < npanels; ++i) {
        const double lo = a + i * h;
        const double mid = lo + 0.5 * h;
        double acc = 0.0;
        for (std::size_t j = 0; j < rule.x.size(); ++j) {
            const double val = g(mid + 0.5 * h * rule.x[j]);
            acc += rule.w[j] * val;
            pk = std::max(pk, std::abs(val));
        }
        tot += 0.5 * h * acc;
    }
    if (peak) *peak = pk;
    return tot;
}

// Local log-slope of |g| near t, measured over a step d; used for tail
// corrections when no analytic exponent is supplied.
std::optional<double> measured_slope(const std::function<double(double)>& g, double t, double d) {
    const double g0 = g(t), g1 = g(t + d);
    if (g0 == 0.0 || g1 == 0.0) return std::nullopt;
    if ((g0 > 0) != (g1 > 0)) return std::nullopt;
    return (std::log(std::abs(g1)) - std::log(std::abs(g0))) / d;
}

} // namespace

QuadratureDefaults& quadrature_defaults() {
    static QuadratureDefaults d;
    return d;
}

QuadratureSpec::QuadratureSpec()
    : rel_tol(quadrature_defaults().rel_tol),
      t_min(-34.0 - quadrature_defaults().extra_half_width),
      t_max(34.0 + quadrature_defaults().extra_half_width) {
    const double density = 2048.0 / 68.0;
    n = ((static_cast<int>(std::ceil((t_max - t_min) * density)) + 15) / 16) * 16;
}

QuadratureSpec QuadratureSpec::for_decay_rates(double rate_at_zero, double rate_at_inf,
                                               double extra_shift) {
    QuadratureSpec spec;
    const double rate = std::max(1e-3, std::min(rate_at_zero, rate_at_inf));
    double half = std::max(34.0, 24.0 / rate) + std::abs(extra_shift) +
                  quadrature_defaults().extra_half_width;
    half = std::min(half, 600.0);
    spec.t_min = -half;
    spec.t_max = half;
    // keep the default node density (2048 nodes over [-34, 34])
    const double density = 2048.0 / 68.0;
    int n = static_cast<int>(std::ceil(2.0 * half * density));
    spec.n = ((n + 15) / 16) * 16;
    return spec;
}

QuadratureResult integrate_log_checked(const std::function<double(double)>& g,
                                       const QuadratureSpec& spec, IntegrandHints hints) {
    const int npanels = std::max(4, spec.n / 16);
    const double a = spec.t_min, b = spec.t_max;
    double peak = 0.0;
    double value = sum_panels(g, a, b, npanels, rule16(), &peak);
    // refinement estimate against a coarser rule on the same panels
    const double coarse = sum_panels(g, a, b, npanels, rule8());
    double err = std::abs(value - coarse);

    QuadratureResult res;
    // tails: g ~ A e^{q t}; contribution from (-inf, a] is g(a)/q for q > 0,
    // from [b, inf) is -g(b)/q for q < 0. Edge values far below the peak are
    // treated as spent.
    const double step = std::min(0.5, 0.01 * (b - a));
    const double negligible = 1e-13 * peak;
    const double ga = g(a), gb = g(b);
    const std::optional<double> qa_meas = measured_slope(g, a, step);
    const std::optional<double> qb_meas = measured_slope(g, b - step, step);
    std::optional<double> qa = hints.q_at_zero ? hints.q_at_zero : qa_meas;
    std::optional<double> qb = hints.q_at_inf ? hints.q_at_inf : qb_meas;
    if (std::abs(ga) > negligible) {
        if (!qa || *qa <= 1e-12)
            throw accuracy_error("integrate_radial: non-decaying tail at r -> 0", std::abs(ga));
        res.tail_low = ga / *qa;
        if (qa_meas && *qa_meas > 1e-12)
            err += std::abs(res.tail_low - ga / *qa_meas);
        else
            err += 0.05 * std::abs(res.tail_low);
    }
    if (std::abs(gb) > negligible) {
        if (!qb || *qb >= -1e-12)
            throw accuracy_error("integrate_radial: non-decaying tail at r -> infinity",
                                 std::abs(gb));
        res.tail_high = -gb / *qb;
        if (qb_meas && *qb_meas < -1e-12)
            err += std::abs(res.tail_high + gb / *qb_meas);
        else
            err += 0.05 * std::abs(res.tail_high);
    }
    if (spec.tail_policy == TailPolicy::analytic_powerlaw)
        value += res.tail_low + res.tail_high;
    else
        err += std::abs(res.tail_low) + std::abs(res.tail_high);
    res.value = value;
    res.error_estimate = err;
    return res;
}

QuadratureResult integrate_radial_checked(const std::function<double(double)>& f,
                                          double weight_exponent, const QuadratureSpec& spec,
                                          IntegrandHints hints) {
    const double a1 = weight_exponent + 1.0;
    auto g = [&](double t) { return f(std::exp(t)) * std::exp(a1 * t); };
    return integrate_log_checked(g, spec, hints);
}

double integrate_radial(const std::function<double(double)>& f, double weight_exponent,
                        const QuadratureSpec& spec, IntegrandHints hints) {
    QuadratureResult r = integrate_radial_checked(f, weight_exponent, spec, hints);
    const double scale = std::max(std::abs(r.value), 1e-300);
    if (r.error_estimate > spec.rel_tol * scale + 1e-300)
        throw accuracy_error("integrate_radial: estimated error " + std::to_string(r.error_estimate) +
                                 " exceeds tolerance",
                             r.error_estimate);
    return r.value;
}

namespace detail {

const std::vector<double>& gl16_nodes() { return rule16().x; }
const std::vector<double>& gl16_weights() { return rule16().w; }

double panel16(const std::function<double(double)>& g, double a, double b) {
    return sum_panels(g, a, b, 1, rule16());
}

double panel8(const std::function<double(double)>& g, double a, double b) {
    return sum_panels(g, a, b, 1, rule8());
}

} // namespace detail

} // namespace hslab
