#pragma once

#include "hslab/bubble.hpp"
#include "hslab/params.hpp"
#include "hslab/radial.hpp"

#include <span>
#include <string>
#include <vector>

namespace hslab {

/// M and M~ carry the same (c, lambda) parameterization here; both entry
/// points are kept because the hypotheses around them are phrased differently.
enum class ManifoldKind { M, M_tilde };

struct ProjectionResult {
    ManifoldPoint best;
    double distance = 0.0;
    RadialFunction rho;
    // first-order optimality residuals: <rho,U>_g, <rho,V>_g and their
    // weighted-integral restatements
    double or1 = 0.0, or2 = 0.0, or3 = 0.0, or4 = 0.0;
    bool converged = false;
    int iterations = 0;
    double u_norm = 0.0;
};

/// Minimizes ||u - c U^lambda||_gamma over (c, lambda): c is eliminated
/// analytically against the unit-norm bubble, lambda searched on a log grid
/// with golden-section refinement and multi-starts. Ties break to the
/// smallest lambda.
ProjectionResult project(const RadialFunction& u, const ProblemParams& p,
                         ManifoldKind kind = ManifoldKind::M);

struct MultiBubbleFit {
    std::vector<ManifoldPoint> bubbles; // sorted by lambda
    double residual_norm = 0.0;
    std::vector<ProjectionResult> stages;
    bool complete = true;   // false when a projection stage failed
    std::string error;      // the failure, when incomplete
};

/// Greedy peeling: projects the running residual nu times.
MultiBubbleFit greedy_multibubble_fit(const RadialFunction& u, const ProblemParams& p, int nu);

/// min over pairs of (li/lj, lj/li); a family is delta-interacting iff this
/// value is <= delta (small values mean well-separated scales).
double delta_interaction(std::span<const double> lams);

} // namespace hslab
