#pragma once

#include "hslab/params.hpp"

#include <string>
#include <vector>

namespace hslab {

/// Two-bubble interaction scan I(lambda) = int U^theta (U^lambda)^eta / |x|^s
/// over a geometric lambda grid, with power-law / log-corrected fits.
struct InteractionScan {
    ProblemParams params;
    double theta = 0.0, eta = 0.0;
    std::vector<double> lambdas;
    std::vector<double> values;
    double fitted_exponent = 0.0;    // least-squares slope of log I vs log lambda
    double predicted_exponent = 0.0; // epsilon * min(theta, eta)
    double intercept = 0.0;
    bool log_correction_detected = false;
    double rss_pure = 0.0; // residual sum, free power-law fit
    double rss_log = 0.0;  // residual sum, pinned-slope log-corrected fit
    double log_c1 = 0.0;   // fitted additive constant inside the log factor
    double max_ratio_envelope = 0.0; // max/min of I over the asymptotic model
    bool near_degenerate = false;    // |theta - eta| < 0.1 and theta != eta
    int dropped_points = 0;
};

/// sphere_area * int_0^inf U^theta (U^lambda)^eta r^{N-1-s} dr with the
/// EL-normalized bubble and U^lambda(x) = lambda^{(N-2)/2} U(lambda x).
/// Requires theta, eta >= 0, theta + eta = 2*(s), lambda in (0, 1].
double interaction_integral(const ProblemParams& p, double theta, double eta, double lambda);

/// General two-scale version; depends on (lambda1, lambda2) only through
/// Q = lambda2 / lambda1.
double interaction_integral_pair(const ProblemParams& p, double theta, double eta, double lambda1,
                                 double lambda2);

InteractionScan scan_and_fit(const ProblemParams& p, double theta, double eta, double lambda_min,
                             double lambda_max, int n_points);

/// CSV columns lambda,integral,log_lambda,log_integral.
std::string scan_csv(const InteractionScan& scan, const std::string& config_comment);

} // namespace hslab
