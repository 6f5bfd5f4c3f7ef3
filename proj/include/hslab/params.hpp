#pragma once

#include <string>

namespace hslab {

/// Problem parameters (N, gamma, s) for the Hardy-Sobolev inequality on R^N.
/// Strict admissible range is 0 < gamma < gamma_H = (N-2)^2/4 and 0 < s < 2.
/// With reference_mode set, the classical boundary cases gamma = 0 (weighted
/// Sobolev) and gamma = s = 0 (Sobolev) are accepted as cross-checks.
struct ProblemParams {
    int N = 3;
    double gamma = 0.1;
    double s = 0.5;
    bool reference_mode = false;

    double gamma_hardy() const { return 0.25 * (N - 2.0) * (N - 2.0); }

    /// Throws std::domain_error if the parameters are outside the admitted range.
    void validate() const;

    std::string describe() const;
};

/// All closed-form constants derived from (N, gamma, s).
struct DerivedConstants {
    double epsilon;      // sqrt((N-2)^2/4 - gamma)
    double beta_minus;   // (N-2)/2 - epsilon
    double beta_plus;    // (N-2)/2 + epsilon
    double two_star_s;   // 2(N-s)/(N-2)
    double sphere_area;  // |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)
    double omega_N;      // volume of the standard N-sphere in R^{N+1}
};

DerivedConstants derive(const ProblemParams& p);

/// Euler Gamma function, Lanczos approximation (g = 7, 9 terms).
/// Relative error below 1e-13 on (0, 50]. Throws std::domain_error for x <= 0.
double gamma_fn(double x);

/// Best constant mu_{gamma,s}(R^N) of the Hardy-Sobolev inequality.
/// For 0 < gamma < gamma_H this is [(N-2)^2 - 4 gamma]^{1/2*(s)+1/2} D_s.
/// Reference cases: gamma = s = 0 gives N(N-2) omega_N^{2/N} / 4; gamma = 0,
/// 0 < s < 2 gives (N-2)(N-s) [omega_{N-1}/(2-s) * B(q,q)]^{(2-s)/(N-s)} with
/// q = (N-s)/(2-s), the value attained by the explicit extremal.
double best_constant(const ProblemParams& p);

/// The constant C_{N,gamma,s} = [4 ((N-s)/(N-2)) epsilon^2]^{1/(2*(s)-2)}
/// that makes the bubble solve the Euler-Lagrange equation with no extra factor.
double el_normalization_constant(const ProblemParams& p);

/// Angular eigenvalue lambda_k = k^2 + (N-2) k of the Laplace-Beltrami
/// operator on S^{N-1} for spherical-harmonic order k.
double angular_eigenvalue(int N, int k);

/// Dimension of the order-k spherical-harmonic eigenspace on S^{N-1}.
long long harmonic_multiplicity(int N, int k);

} // namespace hslab
