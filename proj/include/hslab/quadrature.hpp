#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace hslab {

enum class TailPolicy { analytic_powerlaw, truncate };

/// Process-wide tuning knobs (wired to --tol / --t-window on the CLI):
/// extra_half_width widens every automatically sized window.
struct QuadratureDefaults {
    double rel_tol = 1e-10;
    double extra_half_width = 0.0;
};
QuadratureDefaults& quadrature_defaults();

/// Controls the r = e^t substitution quadrature on (0, infinity).
/// The window [t_min, t_max] must cover the integrand's transition region;
/// bubble-type integrands become exponentially small outside it and the
/// remaining tails are handled analytically from power-law exponents.
struct QuadratureSpec {
    QuadratureSpec();
    double rel_tol;
    double t_min;
    double t_max;
    int n; // total node count target; panels of 16 Gauss-Legendre nodes
    TailPolicy tail_policy = TailPolicy::analytic_powerlaw;

    /// Widens the window so integrands decaying like e^{-rate |t|} are
    /// resolved to full precision. Node density is kept fixed.
    static QuadratureSpec for_decay_rates(double rate_at_zero, double rate_at_inf,
                                          double extra_shift = 0.0);
};

/// Known power-law exponents of the *transformed* integrand
/// g(t) = f(e^t) e^{(a+1)t}: g ~ e^{q0 t} as t -> -inf, g ~ e^{qinf t} as
/// t -> +inf (q0 > 0 and qinf < 0 for convergence). When absent the
/// exponents are measured from the samples near the window ends.
struct IntegrandHints {
    std::optional<double> q_at_zero;
    std::optional<double> q_at_inf;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    double tail_low = 0.0;
    double tail_high = 0.0;
};

/// integral of f(r) r^{weight_exponent} dr over (0, infinity).
/// Throws accuracy_error when the estimated error exceeds rel_tol * |value|.
double integrate_radial(const std::function<double(double)>& f, double weight_exponent,
                        const QuadratureSpec& spec, IntegrandHints hints = {});

/// Same, but never throws; inspect the result's error_estimate.
QuadratureResult integrate_radial_checked(const std::function<double(double)>& f,
                                          double weight_exponent, const QuadratureSpec& spec,
                                          IntegrandHints hints = {});

/// Integral of g(t) dt over the spec window with the same panel rule and the
/// same tail handling, for integrands already expressed in t = log r.
QuadratureResult integrate_log_checked(const std::function<double(double)>& g,
                                       const QuadratureSpec& spec, IntegrandHints hints = {});

namespace detail {
/// 16-point Gauss-Legendre nodes/weights on [-1, 1].
const std::vector<double>& gl16_nodes();
const std::vector<double>& gl16_weights();
/// Integral of g over [a, b] with one 16-point panel.
double panel16(const std::function<double(double)>& g, double a, double b);
/// Integral of g over [a, b] with one 8-point panel (nested use).
double panel8(const std::function<double(double)>& g, double a, double b);
} // namespace detail

} // namespace hslab
