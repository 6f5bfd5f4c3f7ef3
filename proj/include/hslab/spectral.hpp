#pragma once

#include "hslab/bubble.hpp"
#include "hslab/params.hpp"
#include "hslab/radial.hpp"

#include <vector>

namespace hslab {

/// Radial eigenproblem of the linearized operator in sector k:
///   -R'' - (N-1) R'/r - (gamma - lambda_k) R / r^2 = eta (U^{2*-2}/r^s) R.
/// Under r = e^t and R = e^{-(N-2)t/2} psi it becomes
///   -psi'' + eps_k^2 psi = eta w(t) psi,  w(t) = C^{2*-2} / (2 cosh(eps_t (t - log lambda)))^2,
/// which is discretized symmetrically on a uniform t grid. Leaving t_half or
/// n at zero picks defaults sized from the indicial rates.
struct SectorEigenproblem {
    ProblemParams params;
    int sector = 0;
    Normalization normalization = Normalization::unit_gamma_norm;
    double lambda_scale = 1.0;
    double t_half = 0.0;
    int n = 0;
};

struct SectorSolveResult {
    std::vector<double> eigenvalues;          // ascending, Richardson-refined
    std::vector<RadialFunction> eigenfunctions; // gamma-normalized, when requested
    std::vector<int> node_counts;
    double refinement_delta = 0.0; // relative change between the last two extrapolants
    int grid_n = 0;
};

SectorSolveResult solve_sector(const SectorEigenproblem& prob, int count,
                               bool want_eigenfunctions = false);

struct SectorSpectrum {
    int k = 0;
    long long multiplicity = 1;
    std::vector<double> eigenvalues;
};

struct SpectrumReport {
    ProblemParams params;
    Normalization normalization = Normalization::unit_gamma_norm;
    std::vector<SectorSpectrum> sectors;
    double eta1 = 0.0, eta2 = 0.0, eta3 = 0.0;
    /// third value of the ascending list merged with angular multiplicities
    int eta3_sector = 0;
    int eta3_index = 0; // 0-based index within its sector
    /// alternative reading: third distinct value across sectors
    double eta3_distinct = 0.0;
    double alpha = 0.0;  // 1 - eta2/eta3
    double Lambda = 0.0; // infimum of the Rayleigh quotient orthogonal to {U, Z}
    int kernel_dim = 0;  // multiplicity of the eta2 level across sectors
    double eta2_over_eta1 = 0.0;
};

/// Aggregates sector solves until the sector ground level clears the eta3
/// candidate (ground levels increase with k).
SpectrumReport spectrum_report(const ProblemParams& p,
                               Normalization norm = Normalization::unit_gamma_norm,
                               int grid_n_override = 0, double t_half_override = 0.0);

/// Gamma-normalized eigenfunction (sector, 0-based index).
RadialFunction spectrum_eigenfunction(const ProblemParams& p, Normalization norm, int sector,
                                      int index);

/// Action rho -> -Delta rho - gamma rho/|x|^2 - coefficient (U^{2*-2}/|x|^s) rho
/// at the bubble of the given normalization and scale (radial part, by sector).
RadialFunction apply_linearized(const ProblemParams& p, const RadialFunction& rho,
                                double coefficient, Normalization norm, double lambda = 1.0);

} // namespace hslab
