#pragma once

#include "hslab/params.hpp"
#include "hslab/radial.hpp"

namespace hslab {

/// Which multiplicative constant the bubble profile carries.
/// euler_lagrange: C_{N,gamma,s}, so the bubble solves the Euler-Lagrange
/// equation with unit coefficient. unit_gamma_norm: rescaled so the
/// gamma-norm is 1; the bubble then solves the equation with coefficient
/// mu^{2*(s)/2}. The two differ by the scalar mu^{-(N-s)/(2(2-s))}.
enum class Normalization { unit_gamma_norm, euler_lagrange };

/// Member c * U^lambda of the extremal family. The scale action used
/// internally is U^lambda(x) = lambda^{(N-2)/2} U(lambda x); the operator
/// T_lambda exposes the reciprocal parameterization.
struct Bubble {
    ProblemParams params;
    double lambda = 1.0;
    double coeff = 1.0;
    Normalization normalization = Normalization::euler_lagrange;

    void validate() const;
};

/// A point c U^lambda of the extremal manifold (c != 0, lambda > 0).
struct ManifoldPoint {
    Bubble bubble;
};

/// Profile constant for the requested normalization.
double normalization_constant(const ProblemParams& p, Normalization norm);

/// Value of the bubble at radius r > 0.
double eval_bubble(const Bubble& b, double r);

/// The bubble as a closed-form RadialFunction (sector 0) with analytic
/// derivatives and decay hints r^{-beta_-} at 0, r^{-beta_+} at infinity.
RadialFunction bubble_profile(const Bubble& b);

/// V = d/dt U^t at t = b.lambda (coefficient folded in), sector 0,
/// computed in closed form. At lambda = 1 this is the generator
/// Z = sum_i x^i d_i U + (N-2)/2 U of the dilation direction.
RadialFunction tangent_generator(const Bubble& b);

/// T_lambda(f)(x) = lambda^{-(N-2)/2} f(x / lambda). Exact for closed
/// forms; sampled inputs get their grid rescaled.
RadialFunction apply_T(double lambda, const RadialFunction& f, const ProblemParams& p);

/// Writes c U^lambda sampled on the grid with the bubble header comment.
void write_bubble_csv_file(const std::string& path, const Bubble& b,
                           const std::vector<double>& grid);

} // namespace hslab
