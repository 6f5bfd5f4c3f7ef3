#include "hslab/interaction.hpp"

#include "hslab/bubble.hpp"
#include "hslab/errors.hpp"
#include "hslab/parallel.hpp"
#include "hslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hslab {

namespace {

struct LogShape {
    double a, b, m, logC, c;
};

LogShape log_shape(const ProblemParams& p) {
    const DerivedConstants d = derive(p);
    LogShape s;
    s.a = d.beta_minus * (2.0 - p.s) / (p.N - 2.0);
    s.b = d.beta_plus * (2.0 - p.s) / (p.N - 2.0);
    s.m = (p.N - 2.0) / (2.0 - p.s);
    s.logC = std::log(el_normalization_constant(p));
    s.c = 0.5 * (p.N - 2.0);
    return s;
}

double log_bubble(const LogShape& s, double t) {
    const double hi = std::max(s.a * t, s.b * t), lo = std::min(s.a * t, s.b * t);
    return s.logC - s.m * (hi + std::log1p(std::exp(lo - hi)));
}

void check_exponents(const ProblemParams& p, double theta, double eta) {
    const DerivedConstants d = derive(p);
    if (theta < 0.0 || eta < 0.0)
        throw std::domain_error("interaction: theta and eta must be nonnegative");
    if (std::abs(theta + eta - d.two_star_s) > 1e-9)
        throw std::domain_error("interaction: theta + eta must equal 2*(s)");
}

} // namespace

double interaction_integral_pair(const ProblemParams& p, double theta, double eta, double lambda1,
                                 double lambda2) {
    p.validate();
    check_exponents(p, theta, eta);
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
        throw std::domain_error("interaction: scales must be positive");
    const DerivedConstants d = derive(p);
    const LogShape sh = log_shape(p);
    const double l1 = std::log(lambda1), l2 = std::log(lambda2);
    const double rate = d.epsilon * d.two_star_s;
    QuadratureSpec spec =
        QuadratureSpec::for_decay_rates(rate, rate, std::abs(l1) + std::abs(l2));
    auto g = [&](double t) {
        const double e = theta * (sh.c * l1 + log_bubble(sh, t + l1)) +
                         eta * (sh.c * l2 + log_bubble(sh, t + l2)) + (p.N - p.s) * t;
        return std::exp(e);
    };
    IntegrandHints ih;
    ih.q_at_zero = rate;
    ih.q_at_inf = -rate;
    QuadratureResult r = integrate_log_checked(g, spec, ih);
    const double scale = std::max(std::abs(r.value), 1e-300);
    if (r.error_estimate > 1e-7 * scale)
        throw accuracy_error("interaction_integral: quadrature window insufficient; widen t-window",
                             r.error_estimate);
    return d.sphere_area * r.value;
}

double interaction_integral(const ProblemParams& p, double theta, double eta, double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::domain_error("interaction_integral: lambda must lie in (0, 1]");
    return interaction_integral_pair(p, theta, eta, 1.0, lambda);
}

InteractionScan scan_and_fit(const ProblemParams& p, double theta, double eta, double lambda_min,
                             double lambda_max, int n_points) {
    p.validate();
    check_exponents(p, theta, eta);
    if (!(lambda_min > 0.0) || !(lambda_min < lambda_max) || lambda_max > 1.0)
        throw std::domain_error("scan_and_fit: need 0 < lambda_min < lambda_max <= 1");
    if (n_points < 8) throw std::domain_error("scan_and_fit: need n_points >= 8");

    const DerivedConstants d = derive(p);
    InteractionScan scan;
    scan.params = p;
    scan.theta = theta;
    scan.eta = eta;
    scan.predicted_exponent = d.epsilon * std::min(theta, eta);
    scan.near_degenerate = theta != eta && std::abs(theta - eta) < 0.1;

    std::vector<double> lams(n_points);
    const double la = std::log(lambda_min), lb = std::log(lambda_max);
    for (int i = 0; i < n_points; ++i)
        lams[i] = std::exp(la + (lb - la) * i / (n_points - 1.0));

    std::vector<double> vals(n_points, 0.0);
    std::vector<char> ok(n_points, 0);
    parallel::for_index(static_cast<std::size_t>(n_points), [&](std::size_t i) {
        try {
            vals[i] = interaction_integral(p, theta, eta, lams[i]);
            ok[i] = 1;
        } catch (const accuracy_error&) {
            ok[i] = 0;
        }
    });
    for (int i = 0; i < n_points; ++i) {
        if (ok[i]) {
            scan.lambdas.push_back(lams[i]);
            scan.values.push_back(vals[i]);
        } else {
            ++scan.dropped_points;
        }
    }
    const std::size_t n = scan.lambdas.size();
    if (n < 6) throw accuracy_error("scan_and_fit: fewer than 6 surviving grid points", n);

    // least-squares line log I = slope log lambda + intercept
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(scan.lambdas[i]);
        y[i] = std::log(scan.values[i]);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double inter = (sy - slope * sx) / n;
    scan.fitted_exponent = slope;
    scan.intercept = inter;
    scan.rss_pure = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - slope * x[i] - inter;
        scan.rss_pure += r * r;
    }

    // envelope of I over the predicted asymptotic model
    const bool equal_split = std::abs(theta - eta) <= 1e-12;
    double env_lo = std::numeric_limits<double>::infinity(), env_hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double model = std::pow(scan.lambdas[i], scan.predicted_exponent);
        if (equal_split) model *= std::log(1.0 / scan.lambdas[i]);
        const double ratio = scan.values[i] / model;
        env_lo = std::min(env_lo, ratio);
        env_hi = std::max(env_hi, ratio);
    }
    scan.max_ratio_envelope = env_hi / env_lo;

    if (equal_split) {
        // pinned-slope model: q log(lambda) + log(log(1/lambda) + c1) + const.
        // The additive c1 absorbs the O(1) part of the integral next to the
        // divergent log; without it the pure power line wins the comparison.
        const double q = d.epsilon * (p.N - p.s) / (p.N - 2.0);
        auto rss_for = [&](double c1) {
            double mean = 0.0;
            std::vector<double> m(n);
            for (std::size_t i = 0; i < n; ++i) {
                m[i] = y[i] - q * x[i] - std::log(std::log(1.0 / scan.lambdas[i]) + c1);
                mean += m[i];
            }
            mean /= n;
            double rss = 0.0;
            for (std::size_t i = 0; i < n; ++i) rss += (m[i] - mean) * (m[i] - mean);
            return rss;
        };
        // c1 keeps the log argument positive on the whole grid
        const double c1_lo = -std::log(1.0 / lambda_max) + 0.05;
        const double c1_hi = 50.0;
        // coarse scan then golden refinement
        double best_c1 = c1_lo, best_rss = rss_for(c1_lo);
        for (int i = 1; i <= 100; ++i) {
            const double c1 = c1_lo + (c1_hi - c1_lo) * i / 100.0;
            const double r = rss_for(c1);
            if (r < best_rss) {
                best_rss = r;
                best_c1 = c1;
            }
        }
        double a = std::max(c1_lo, best_c1 - (c1_hi - c1_lo) / 100.0);
        double b = std::min(c1_hi, best_c1 + (c1_hi - c1_lo) / 100.0);
        const double R = 0.6180339887498949;
        double x1 = b - R * (b - a), x2 = a + R * (b - a);
        double f1 = rss_for(x1), f2 = rss_for(x2);
        for (int it = 0; it < 80 && b - a > 1e-10; ++it) {
            if (f1 > f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + R * (b - a);
                f2 = rss_for(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - R * (b - a);
                f1 = rss_for(x1);
            }
        }
        scan.log_c1 = f1 < f2 ? x1 : x2;
        scan.rss_log = std::min(f1, f2);
        scan.log_correction_detected = scan.rss_log <= 0.5 * scan.rss_pure;
    }
    return scan;
}

std::string scan_csv(const InteractionScan& scan, const std::string& config_comment) {
    std::ostringstream os;
    os.precision(17);
    if (!config_comment.empty()) os << "# " << config_comment << "\n";
    os << "lambda,integral,log_lambda,log_integral\n";
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
        os << scan.lambdas[i] << "," << scan.values[i] << "," << std::log(scan.lambdas[i]) << ","
           << std::log(scan.values[i]) << "\n";
    return os.str();
}

} // namespace hslab
