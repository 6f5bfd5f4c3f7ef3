#pragma once

#include "hslab/bubble.hpp"
#include "hslab/params.hpp"
#include "hslab/radial.hpp"

namespace hslab {

struct DeficitReport {
    double gamma_norm_sq = 0.0;
    double hs_norm = 0.0;
    double deficit = 0.0;
    double mu = 0.0;
    ProblemParams params;
};

/// ||u||_gamma^2 = sphere_area * int (R'^2 + (lambda_k - gamma) R^2/r^2) r^{N-1} dr
/// for u = R(r) Y_k with the mean-square-normalized zonal harmonic Y_k.
double gamma_norm_sq(const RadialFunction& u, const ProblemParams& p);

/// Same quadratic form with gamma = 0 (plain Dirichlet energy + angular term).
double dirichlet_norm_sq(const RadialFunction& u, const ProblemParams& p);

/// <u, v>_gamma. Cross-sector pairs return exact 0.
double inner_gamma(const RadialFunction& u, const RadialFunction& v, const ProblemParams& p);

/// int |u|^{2*(s)} / |x|^s over R^N, including the angular |Y_k|^{2*} factor
/// for k >= 1.
double hs_weighted_integral(const RadialFunction& u, const ProblemParams& p);

/// Weighted Lebesgue norm (hs_weighted_integral)^{1/2*(s)}.
double hs_norm(const RadialFunction& u, const ProblemParams& p);

/// Deficit ||u||_gamma^2 - mu ||u||^2_{L^{2*(s)}}; sector-0 inputs only.
DeficitReport deficit(const RadialFunction& u, const ProblemParams& p);

/// Energy I(u) = 1/2 ||u||_gamma^2 - (1/2*(s)) int |u|^{2*(s)}/|x|^s.
double energy(const RadialFunction& u, const ProblemParams& p);

/// Radial Euler-Lagrange residual
///   f = u'' + (N-1) u'/r + (gamma - lambda_k) u / r^2 + coefficient |u|^{2*-2} u / r^s,
/// the radial part of Delta u + gamma u/|x|^2 + coefficient |u|^{2*-2}u/|x|^s.
/// coefficient 1 is the equation the EL-normalized bubble solves;
/// mu^{2*(s)/2} is the unit-norm variant.
RadialFunction el_residual(const RadialFunction& u, const ProblemParams& p,
                           double coefficient = 1.0);

/// Dual norm of f in sector k with respect to ||.||_gamma: sqrt(<f, w>_{L^2})
/// where -Delta w - (gamma - lambda_k) w /|x|^2 = f, solved through the exact
/// kernel G(r,t) = min(r,t)^{-beta_-^k} max(r,t)^{-beta_+^k} / (2 eps_k).
double dual_norm(const RadialFunction& f, const ProblemParams& p);

/// The Riesz representative w itself, sampled on a uniform log grid.
RadialFunction green_solve(const RadialFunction& f, const ProblemParams& p, int n_grid = 2048);

/// int_{S^{N-1}} |Y_k|^p dsigma / |S^{N-1}| for the mean-square-normalized
/// zonal harmonic of order k (1 for k = 0 or p = 2).
double angular_lp_factor(int N, int k, double p);

/// int |u0 + uk Y_k|^{2*(s)} / |x|^s over R^N for a sector-0 profile u0 plus
/// a single higher-sector profile uk (zonal harmonic convention).
double hs_integral_two_sector(const RadialFunction& u0, const RadialFunction& uk, int k,
                              const ProblemParams& p);

/// Quadrature window sized for profiles with the given power-law hints under
/// the weight r^{weight_exponent} dr; falls back to the default window.
QuadratureSpec quad_spec_for_profile(const ProblemParams& p, const std::optional<DecayHints>& hints,
                                     int copies, double weight_exponent, double extra_shift = 0.0);

} // namespace hslab
