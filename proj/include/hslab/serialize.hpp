#pragma once

#include "hslab/experiments.hpp"
#include "hslab/functionals.hpp"
#include "hslab/interaction.hpp"
#include "hslab/manifold.hpp"
#include "hslab/spectral.hpp"

#include <json.hpp>

namespace hslab {

inline void to_json(nlohmann::json& j, const ProblemParams& p) {
    j = {{"N", p.N}, {"gamma", p.gamma}, {"s", p.s}, {"reference_mode", p.reference_mode}};
}

inline const char* to_string(Normalization n) {
    return n == Normalization::euler_lagrange ? "euler_lagrange" : "unit_gamma_norm";
}

inline void to_json(nlohmann::json& j, const DeficitReport& r) {
    j = {{"gamma_norm_sq", r.gamma_norm_sq},
         {"hs_norm", r.hs_norm},
         {"deficit", r.deficit},
         {"mu", r.mu},
         {"params", r.params}};
}

inline void to_json(nlohmann::json& j, const ProjectionResult& r) {
    j = {{"c", r.best.bubble.coeff},
         {"lambda", r.best.bubble.lambda},
         {"distance", r.distance},
         {"or1", r.or1},
         {"or2", r.or2},
         {"or3", r.or3},
         {"or4", r.or4},
         {"converged", r.converged},
         {"iterations", r.iterations}};
}

inline void to_json(nlohmann::json& j, const SpectrumReport& r) {
    nlohmann::json sectors = nlohmann::json::array();
    for (const auto& s : r.sectors)
        sectors.push_back(
            {{"k", s.k}, {"multiplicity", s.multiplicity}, {"eigenvalues", s.eigenvalues}});
    j = {{"params", r.params},
         {"normalization", to_string(r.normalization)},
         {"sectors", sectors},
         {"eta1", r.eta1},
         {"eta2", r.eta2},
         {"eta3", r.eta3},
         {"eta3_sector", r.eta3_sector},
         {"eta3_distinct", r.eta3_distinct},
         {"alpha", r.alpha},
         {"Lambda", r.Lambda},
         {"kernel_dim", r.kernel_dim},
         {"eta2_over_eta1", r.eta2_over_eta1}};
}

inline void to_json(nlohmann::json& j, const InteractionScan& s) {
    j = {{"params", s.params},
         {"theta", s.theta},
         {"eta", s.eta},
         {"exponent_fit", s.fitted_exponent},
         {"predicted_exponent", s.predicted_exponent},
         {"log_correction_detected", s.log_correction_detected},
         {"max_ratio_envelope", s.max_ratio_envelope},
         {"rss_pure", s.rss_pure},
         {"rss_log", s.rss_log},
         {"log_c1", s.log_c1},
         {"near_degenerate", s.near_degenerate},
         {"dropped_points", s.dropped_points},
         {"n_points", s.lambdas.size()}};
}

inline void to_json(nlohmann::json& j, const StabilityScan& s) {
    j = {{"params", s.params},
         {"kind", s.kind == PerturbationKind::third_eigenfunction ? "third_eigenfunction"
                 : s.kind == PerturbationKind::random_orthogonal  ? "random_orthogonal"
                                                                  : "manifold_tangent"},
         {"seed", s.seed},
         {"perturbation_sector", s.perturbation_sector},
         {"alpha_reference", s.alpha_reference},
         {"rows", s.rows.size()}};
    if (s.limit_estimate) j["limit_estimate"] = *s.limit_estimate;
    j["richardson_stage_delta"] = s.richardson_stage_delta;
    if (s.family_ratio_max) j["family_ratio_max"] = *s.family_ratio_max;
    if (s.family_ratio_drift) j["family_ratio_drift"] = *s.family_ratio_drift;
}

} // namespace hslab
