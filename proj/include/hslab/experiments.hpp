#pragma once

#include "hslab/params.hpp"
#include "hslab/radial.hpp"
#include "hslab/spectral.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hslab {

enum class PerturbationKind { third_eigenfunction, random_orthogonal, manifold_tangent };

struct StabilityRow {
    int member = 0;
    double d = 0.0;
    double deficit = 0.0;
    double distance = 0.0;
    double ratio = 0.0; // deficit / distance^2
    std::optional<double> gamma_u;          // dual norm of the EL residual
    std::optional<double> rho_norm;         // projection residual norm
    std::optional<double> rho_over_gamma;   // rho_norm / gamma_u
    double u_norm = 0.0;
    double u_norm_sq = 0.0;
    bool in_energy_window_norm = false;   // 1/2 mu^{(N-s)/(2-s)} <= ||u|| <= 3/2 ...
    bool in_energy_window_norm_sq = false; // same bounds read against ||u||^2
    bool ok = true;
    std::string note;
};

struct StabilityScan {
    ProblemParams params;
    PerturbationKind kind = PerturbationKind::third_eigenfunction;
    std::vector<double> d_grid;
    std::vector<StabilityRow> rows;
    std::optional<double> limit_estimate; // Richardson-extrapolated d -> 0 ratio
    double richardson_stage_delta = 0.0;  // relative change of the last stage
    int perturbation_sector = 0;
    double alpha_reference = 0.0; // 1 - eta2/eta3 from the spectrum report
    unsigned seed = 0;
    std::optional<double> family_ratio_max; // cfm: max over rows of rho/Gamma
    std::optional<double> family_ratio_drift; // cfm: max/min over d of per-d max
};

/// Deficit-vs-distance scan for u = U + d v around the unit-norm bubble.
/// third_eigenfunction uses the global third eigenfunction (its sector may be
/// 1, in which case the perturbed deficit is evaluated with the two-sector
/// weighted integral and Gamma columns stay empty); random_orthogonal draws a
/// seeded bump combination orthogonal to {U, Z}; manifold_tangent moves along
/// Z and only demonstrates the degenerate direction.
StabilityScan bianchi_egnell_scan(const ProblemParams& p, PerturbationKind kind,
                                  std::vector<double> d_grid, unsigned seed = 12345);

/// One-bubble quantitative stability scan in the Euler-Lagrange convention:
/// u = U + d rho for a seeded family of unit orthogonal perturbations;
/// reports ||rho_proj||_gamma / Gamma(u) per row and its drift across d.
StabilityScan cfm_scan(const ProblemParams& p, int family_size, std::vector<double> d_grid,
                       unsigned seed = 12345);

struct AlphaRow {
    ProblemParams params;
    double eta1 = 0, eta2 = 0, eta3 = 0, alpha = 0, Lambda = 0;
    double eta2_over_eta1 = 0;
    int kernel_dim = 0;
    bool ok = false;
    std::string error;
};

/// One spectrum report per grid point; failures recorded per row.
std::vector<AlphaRow> alpha_table(std::span<const ProblemParams> grid);

/// Deterministic unit-gamma-norm perturbation orthogonal to {U, Z}
/// (smooth bump combination, Gram-Schmidt in the gamma inner product).
RadialFunction random_orthogonal_perturbation(const ProblemParams& p, Normalization norm,
                                              unsigned seed);

std::string stability_csv(const StabilityScan& scan, const std::string& config_comment);
std::string alpha_csv(std::span<const AlphaRow> rows, const std::string& config_comment);

} // namespace hslab
