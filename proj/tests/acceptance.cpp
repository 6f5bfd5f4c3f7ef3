// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Tolerances are fixed here, not tuned at run time.

#include "hslab/bubble.hpp"
#include "hslab/experiments.hpp"
#include "hslab/functionals.hpp"
#include "hslab/interaction.hpp"
#include "hslab/manifold.hpp"
#include "hslab/parallel.hpp"
#include "hslab/spectral.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace hslab;

namespace {

std::vector<ProblemParams> criterion_grid() {
    std::vector<ProblemParams> grid;
    for (int N : {3, 4, 6})
        for (double f : {0.1, 0.5, 0.9})
            for (double s : {0.5, 1.0, 1.5}) {
                const double gH = 0.25 * (N - 2.0) * (N - 2.0);
                grid.push_back(ProblemParams{N, f * gH, s});
            }
    return grid;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int failures = 0;

void report(int criterion, bool pass, const std::string& detail, double secs) {
    std::printf("%s criterion %d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++failures;
}

// 1. closed-form eigenvalue reproduction on the 3x3x3 grid
void criterion1() {
    Timer timer;
    auto grid = criterion_grid();
    std::vector<double> worst(grid.size(), 0.0);
    std::vector<char> thrown(grid.size(), 0);
    parallel::for_index(grid.size(), [&](std::size_t i) {
        try {
            const DerivedConstants d = derive(grid[i]);
            const double mu_pow = std::pow(best_constant(grid[i]), 0.5 * d.two_star_s);
            SectorEigenproblem prob{grid[i], 0, Normalization::unit_gamma_norm};
            SectorSolveResult r = solve_sector(prob, 2);
            const double e1 = std::abs(r.eigenvalues[0] - mu_pow) / mu_pow;
            const double e2 =
                std::abs(r.eigenvalues[1] - (d.two_star_s - 1.0) * mu_pow) /
                ((d.two_star_s - 1.0) * mu_pow);
            worst[i] = std::max(e1, e2);
        } catch (const std::exception&) {
            thrown[i] = 1;
        }
    });
    double w = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        w = std::max(w, worst[i]);
        ok = ok && !thrown[i];
    }
    const double secs = timer.seconds();
    ok = ok && w <= 1e-6 && secs <= 60.0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "eta1/eta2 closed forms on the 27-point grid, worst rel err %.2e, limit 1e-6",
                  w);
    report(1, ok, buf, secs);
}

// 2. spectral gap, alpha in (0,1), kernel dimension 1
void criterion2() {
    Timer timer;
    auto grid = criterion_grid();
    std::vector<SpectrumReport> reps(grid.size());
    std::vector<char> thrown(grid.size(), 0);
    parallel::for_index(grid.size(), [&](std::size_t i) {
        try {
            reps[i] = spectrum_report(grid[i], Normalization::unit_gamma_norm);
        } catch (const std::exception&) {
            thrown[i] = 1;
        }
    });
    bool ok = true;
    double min_gap = 1e300;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (thrown[i]) {
            ok = false;
            continue;
        }
        const auto& r = reps[i];
        ok = ok && r.eta3 > r.eta2 && r.alpha > 0.0 && r.alpha < 1.0 && r.kernel_dim == 1;
        min_gap = std::min(min_gap, r.eta3 / r.eta2 - 1.0);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "spectral gap and kernel dimension on the grid, min eta3/eta2 - 1 = %.3f",
                  min_gap);
    report(2, ok, buf, timer.seconds());
}

// 3. Bianchi-Egnell sharpness ratio via third-eigenfunction perturbations
void criterion3() {
    Timer timer;
    bool ok = true;
    std::string detail = "deficit/dist^2 -> 1 - eta2/eta3 within 5%:";
    for (const auto& p : {ProblemParams{3, 0.1, 0.5}, ProblemParams{4, 0.5, 1.0}}) {
        StabilityScan scan = bianchi_egnell_scan(p, PerturbationKind::third_eigenfunction,
                                                 {0.04, 0.02, 0.01});
        const bool have = scan.limit_estimate.has_value();
        const double rel =
            have ? std::abs(*scan.limit_estimate - scan.alpha_reference) / scan.alpha_reference
                 : 1.0;
        ok = ok && have && rel <= 0.05;
        char buf[96];
        std::snprintf(buf, sizeof buf, " [N=%d sector=%d rel err %.4f]", p.N,
                      scan.perturbation_sector, rel);
        detail += buf;
    }
    const double secs = timer.seconds();
    ok = ok && secs <= 120.0;
    report(3, ok, detail, secs);
}

// 4. best-constant consistency with the quadrature Rayleigh quotient
void criterion4() {
    Timer timer;
    auto grid = criterion_grid();
    std::vector<double> errs(grid.size(), 1.0);
    parallel::for_index(grid.size(), [&](std::size_t i) {
        RadialFunction U =
            bubble_profile(Bubble{grid[i], 1.0, 1.0, Normalization::euler_lagrange});
        const double ray = gamma_norm_sq(U, grid[i]) / std::pow(hs_norm(U, grid[i]), 2.0);
        errs[i] = std::abs(ray - best_constant(grid[i])) / best_constant(grid[i]);
    });
    double w = 0.0;
    for (double e : errs) w = std::max(w, e);
    // reference mode: the Sobolev value
    ProblemParams sob{3, 0.0, 0.0, true};
    const double omega3 = 2.0 * M_PI * M_PI;
    const double sref = 0.75 * std::pow(omega3, 2.0 / 3.0);
    const double eref = std::abs(best_constant(sob) - sref) / sref;
    const bool ok = w <= 1e-8 && eref <= 1e-12;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Rayleigh quotient vs closed form, worst rel err %.2e (limit 1e-8); "
                  "Sobolev reference err %.1e",
                  w, eref);
    report(4, ok, buf, timer.seconds());
}

// 5. interaction asymptotics: power law within 2% and log-correction detection
void criterion5() {
    Timer timer;
    const ProblemParams p{3, 0.1, 0.5};
    const DerivedConstants d = derive(p);
    InteractionScan power = scan_and_fit(p, d.two_star_s - 1.0, 1.0, 1e-5, 1e-2, 24);
    const double rel =
        std::abs(power.fitted_exponent - power.predicted_exponent) / power.predicted_exponent;
    InteractionScan logcase =
        scan_and_fit(p, 0.5 * d.two_star_s, 0.5 * d.two_star_s, 1e-5, 1e-2, 24);
    const double secs = timer.seconds();
    const bool ok = rel <= 0.02 && logcase.log_correction_detected &&
                    logcase.rss_log <= 0.5 * logcase.rss_pure && secs <= 60.0;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "exponent fit rel err %.4f (limit 0.02); log-corrected RSS/pure RSS = %.2e "
                  "(limit 0.5)",
                  rel, logcase.rss_log / logcase.rss_pure);
    report(5, ok, buf, secs);
}

// 6. Euler-Lagrange exactness of the dual norm and the variational oracle
void criterion6() {
    Timer timer;
    bool ok = true;
    double worst_gamma = 0.0;
    const ProblemParams p{4, 0.5, 1.0};
    for (double lam : {0.1, 1.0, 10.0}) {
        RadialFunction u = bubble_profile(Bubble{p, lam, 1.0, Normalization::euler_lagrange});
        const double g = dual_norm(el_residual(u, p, 1.0), p);
        worst_gamma = std::max(worst_gamma, g);
    }
    ok = ok && worst_gamma <= 1e-8;
    double worst_oracle = 0.0;
    for (const auto& pp : {ProblemParams{4, 0.5, 1.0}, ProblemParams{3, 0.1, 0.5}}) {
        auto f = RadialFunction::closed_form(0, [](double r) {
            const double z0 = (std::log(r) - 0.3) / 0.8;
            const double z1 = (std::log(r) + 0.9) / 1.1;
            return std::exp(-0.5 * z0 * z0) - 0.6 * std::exp(-0.5 * z1 * z1);
        });
        const double dn2 = std::pow(dual_norm(f, pp), 2.0);
        const double oracle = oracles::variational_dual_norm_sq(f, pp, 50);
        if (oracle > dn2 * (1.0 + 1e-6)) ok = false; // must stay below
        worst_oracle = std::max(worst_oracle, 1.0 - oracle / dn2);
    }
    ok = ok && worst_oracle <= 0.01;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Gamma(U^lambda) max %.1e (limit 1e-8); oracle shortfall %.4f (limit 0.01)",
                  worst_gamma, worst_oracle);
    report(6, ok, buf, timer.seconds());
}

// 7. projection and greedy two-bubble recovery
void criterion7() {
    Timer timer;
    bool ok = true;
    const ProblemParams p{3, 0.1, 0.5};
    double worst_rec = 0.0;
    for (double lam : {0.7, 1.0, 3.0}) {
        for (double c : {2.0, -0.5}) {
            RadialFunction u = bubble_profile(Bubble{p, lam, c, Normalization::unit_gamma_norm});
            ProjectionResult pr = project(u, p);
            worst_rec = std::max({worst_rec, std::abs(pr.best.bubble.lambda - lam) / lam,
                                  std::abs(pr.best.bubble.coeff - c) / std::abs(c)});
        }
    }
    ok = ok && worst_rec <= 1e-7;

    RadialFunction u1 = bubble_profile(Bubble{p, 1.0, 1.0, Normalization::euler_lagrange});
    RadialFunction u2 = bubble_profile(Bubble{p, 1e-3, 1.0, Normalization::euler_lagrange});
    RadialFunction u = RadialFunction::linear_combination(1.0, u1, 1.0, u2);
    const DerivedConstants d = derive(p);
    u.set_decay_hints(DecayHints{-d.beta_minus, -d.beta_plus});
    MultiBubbleFit fit = greedy_multibubble_fit(u, p, 2);
    const double e1 = std::abs(fit.bubbles[0].bubble.lambda - 1e-3) / 1e-3;
    const double e2 = std::abs(fit.bubbles[1].bubble.lambda - 1.0);
    ok = ok && fit.bubbles.size() == 2 && e1 <= 0.01 && e2 <= 0.01;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "synthetic recovery err %.1e (limit 1e-7); greedy scales err %.4f / %.4f "
                  "(limit 0.01)",
                  worst_rec, e1, e2);
    report(7, ok, buf, timer.seconds());
}

// 8. one-bubble quantitative stability: bounded rho/Gamma with small drift
void criterion8() {
    Timer timer;
    const ProblemParams p{4, 0.5, 1.0};
    StabilityScan scan = cfm_scan(p, 5, {0.04, 0.02, 0.01, 0.005});
    bool ok = scan.family_ratio_max.has_value() && scan.family_ratio_drift.has_value() &&
              *scan.family_ratio_drift <= 2.0;
    int usable = 0;
    for (const auto& r : scan.rows)
        if (r.ok && r.rho_over_gamma) ++usable;
    ok = ok && usable >= 16;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "rho/Gamma max %.3f, drift across d %.3f (limit 2.0), %d usable rows",
                  scan.family_ratio_max.value_or(0.0), scan.family_ratio_drift.value_or(0.0),
                  usable);
    report(8, ok, buf, timer.seconds());
}

// 9. invariance suite and byte-identical reruns
void criterion9() {
    Timer timer;
    const ProblemParams p{3, 0.1, 0.5};
    bool ok = true;
    double worst = 0.0;
    // randomized inputs: perturbed bubbles; randomized scales in [1/8, 8]
    unsigned state = 321;
    auto next_uniform = [&state]() {
        state = state * 1664525u + 1013904223u;
        return ((state >> 8) & 0xFFFFFF) / double(0xFFFFFF);
    };
    for (int trial = 0; trial < 6; ++trial) {
        RadialFunction U = bubble_profile(Bubble{p, 1.0, 1.0, Normalization::unit_gamma_norm});
        RadialFunction v = random_orthogonal_perturbation(p, Normalization::unit_gamma_norm,
                                                          1000 + trial);
        RadialFunction u = RadialFunction::linear_combination(1.0, U, 0.2 * next_uniform(), v);
        u.set_decay_hints(U.decay_hints());
        const double lam = std::exp((2.0 * next_uniform() - 1.0) * std::log(8.0));
        RadialFunction tu = apply_T(lam, u, p);
        const double g0 = gamma_norm_sq(u, p), g1 = gamma_norm_sq(tu, p);
        const double h0 = hs_weighted_integral(u, p), h1 = hs_weighted_integral(tu, p);
        const double d0 = deficit(u, p).deficit, d1 = deficit(tu, p).deficit;
        const double e0 = energy(u, p), e1 = energy(tu, p);
        worst = std::max({worst, std::abs(g1 - g0) / g0, std::abs(h1 - h0) / h0,
                          std::abs(d1 - d0) / std::max(std::abs(d0), 1e-12),
                          std::abs(e1 - e0) / std::abs(e0)});
    }
    // eigenvalues at a shifted bubble scale
    SectorEigenproblem a{p, 0, Normalization::unit_gamma_norm, 1.0};
    SectorEigenproblem b{p, 0, Normalization::unit_gamma_norm, 0.3};
    SectorSolveResult ra = solve_sector(a, 3), rb = solve_sector(b, 3);
    for (int i = 0; i < 3; ++i)
        worst = std::max(worst,
                         std::abs(ra.eigenvalues[i] - rb.eigenvalues[i]) / ra.eigenvalues[i]);
    ok = ok && worst <= 1e-8;

    // determinism: fixed seed, repeated runs, both execution policies
    const DerivedConstants d = derive(p);
    auto scan_once = [&](parallel::Policy pol) {
        const parallel::Policy saved = parallel::default_policy();
        parallel::default_policy() = pol;
        InteractionScan s = scan_and_fit(p, d.two_star_s - 1.0, 1.0, 1e-4, 1e-2, 12);
        std::string csv = scan_csv(s, "criterion 9");
        csv += stability_csv(cfm_scan(p, 2, {0.02, 0.01}, 4242), "criterion 9");
        parallel::default_policy() = saved;
        return csv;
    };
    const std::string run1 = scan_once(parallel::Policy::openmp);
    const std::string run2 = scan_once(parallel::Policy::openmp);
    const std::string run3 = scan_once(parallel::Policy::serial);
    const bool deterministic = run1 == run2 && run1 == run3;
    ok = ok && deterministic;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "T_lambda identities worst rel err %.2e (limit 1e-8); reruns byte-identical: %s",
                  worst, deterministic ? "yes" : "no");
    report(9, ok, buf, timer.seconds());
}

} // namespace

int main() {
    Timer total;
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("%s: %d criterion(s) failed (total %.1f s)\n",
                failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", failures,
                total.seconds());
    return failures == 0 ? 0 : 1;
}
