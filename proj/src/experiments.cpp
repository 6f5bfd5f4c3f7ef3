#include "hslab/experiments.hpp"

#include "hslab/bubble.hpp"
#include "hslab/errors.hpp"
#include "hslab/functionals.hpp"
#include "hslab/manifold.hpp"
#include "hslab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hslab {

namespace {

// portable deterministic uniform/gaussian draws (fixed linear congruence,
// Box-Muller); keeps scan output identical across platforms and thread counts
struct Rng {
    unsigned long long state;
    explicit Rng(unsigned seed) : state(seed * 6364136223846793005ULL + 1442695040888963407ULL) {}
    double uniform() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return ((state >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }
    double gaussian() {
        const double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

// closed-form combination of gaussian bumps in t = log r
RadialFunction bump_combo(const std::vector<double>& centers, const std::vector<double>& coeffs,
                          double sigma) {
    auto val = [centers, coeffs, sigma](double r) {
        const double t = std::log(r);
        double v = 0.0;
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double z = (t - centers[i]) / sigma;
            v += coeffs[i] * std::exp(-0.5 * z * z);
        }
        return v;
    };
    auto der = [centers, coeffs, sigma](double r) {
        const double t = std::log(r);
        double v = 0.0;
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double z = (t - centers[i]) / sigma;
            v += coeffs[i] * std::exp(-0.5 * z * z) * (-z / sigma);
        }
        return v / r;
    };
    auto der2 = [centers, coeffs, sigma](double r) {
        const double t = std::log(r);
        double ftt = 0.0, ft = 0.0;
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double z = (t - centers[i]) / sigma;
            const double e = coeffs[i] * std::exp(-0.5 * z * z);
            ft += e * (-z / sigma);
            ftt += e * (z * z - 1.0) / (sigma * sigma);
        }
        return (ftt - ft) / (r * r);
    };
    return RadialFunction::closed_form(0, val, der, der2, std::nullopt);
}

double energy_window_center(const ProblemParams& p) {
    const double mu = best_constant(p);
    return std::pow(mu, (p.N - p.s) / (2.0 - p.s));
}

} // namespace

RadialFunction random_orthogonal_perturbation(const ProblemParams& p, Normalization norm,
                                              unsigned seed) {
    Rng rng(seed);
    std::vector<double> centers = {-3.0, -1.8, -0.6, 0.6, 1.8, 3.0};
    std::vector<double> coeffs(centers.size());
    for (auto& c : coeffs) c = rng.gaussian();
    RadialFunction bump = bump_combo(centers, coeffs, 1.0);

    Bubble b{p, 1.0, 1.0, norm};
    RadialFunction U = bubble_profile(b);
    RadialFunction Z = tangent_generator(b);
    const double u2 = gamma_norm_sq(U, p);
    const double z2 = gamma_norm_sq(Z, p);
    const double cu = inner_gamma(bump, U, p) / u2;
    const double cz = inner_gamma(bump, Z, p) / z2;
    RadialFunction v = RadialFunction::linear_combination(1.0, bump, -cu, U);
    v = RadialFunction::linear_combination(1.0, v, -cz, Z);
    const double nv = std::sqrt(gamma_norm_sq(v, p));
    if (!(nv > 1e-12))
        throw accuracy_error("random_orthogonal_perturbation: degenerate draw", nv);
    RadialFunction out = RadialFunction::linear_combination(1.0 / nv, v, 0.0, v);
    out.set_decay_hints(U.decay_hints()); // U/Z tails dominate the combination
    return out;
}

StabilityScan bianchi_egnell_scan(const ProblemParams& p, PerturbationKind kind,
                                  std::vector<double> d_grid, unsigned seed) {
    p.validate();
    for (double d : d_grid)
        if (!(d > 0.0) || d > 0.05)
            throw std::domain_error("bianchi_egnell_scan: d_grid must lie in (0, 0.05]");

    StabilityScan scan;
    scan.params = p;
    scan.kind = kind;
    scan.d_grid = d_grid;
    scan.seed = seed;

    SpectrumReport rep = spectrum_report(p, Normalization::unit_gamma_norm);
    scan.alpha_reference = rep.alpha;

    Bubble bu{p, 1.0, 1.0, Normalization::unit_gamma_norm};
    RadialFunction U = bubble_profile(bu);
    const double mu = best_constant(p);
    const DerivedConstants dc = derive(p);
    const double mu_pow = std::pow(mu, 0.5 * dc.two_star_s);

    RadialFunction v;
    int sector = 0;
    switch (kind) {
    case PerturbationKind::third_eigenfunction:
        sector = rep.eta3_sector;
        v = spectrum_eigenfunction(p, Normalization::unit_gamma_norm, rep.eta3_sector,
                                   rep.eta3_index);
        if (sector == 0) {
            // squeeze the representation leak out of the sampled eigenfunction:
            // re-orthogonalize against the exact closed-form {U, Z} pair
            RadialFunction Z = tangent_generator(bu);
            const double z2 = gamma_norm_sq(Z, p);
            v = RadialFunction::linear_combination(1.0, v, -inner_gamma(v, U, p), U);
            v = RadialFunction::linear_combination(1.0, v, -inner_gamma(v, Z, p) / z2, Z);
            const double nv = std::sqrt(gamma_norm_sq(v, p));
            v = RadialFunction::linear_combination(1.0 / nv, v, 0.0, v);
            v.set_decay_hints(U.decay_hints());
        }
        break;
    case PerturbationKind::random_orthogonal:
        v = random_orthogonal_perturbation(p, Normalization::unit_gamma_norm, seed);
        break;
    case PerturbationKind::manifold_tangent: {
        RadialFunction Z = tangent_generator(bu);
        const double nz = std::sqrt(gamma_norm_sq(Z, p));
        v = RadialFunction::linear_combination(1.0 / nz, Z, 0.0, Z);
        v.set_decay_hints(Z.decay_hints());
        break;
    }
    }
    scan.perturbation_sector = sector;
    const double v_norm_sq = gamma_norm_sq(v, p); // sector-aware quadratic form
    const double wc = energy_window_center(p);

    for (double d : d_grid) {
        StabilityRow row;
        row.d = d;
        try {
            double norm_sq, hs_int, dist;
            if (sector == 0) {
                RadialFunction u = RadialFunction::linear_combination(1.0, U, d, v);
                u.set_decay_hints(U.decay_hints());
                norm_sq = gamma_norm_sq(u, p);
                hs_int = hs_weighted_integral(u, p);
                ProjectionResult pr = project(u, p);
                dist = pr.distance;
                row.rho_norm = pr.distance;
                // residual of the equation the unit-norm bubble solves
                RadialFunction res = el_residual(u, p, mu_pow);
                row.gamma_u = dual_norm(res, p);
                if (*row.gamma_u > 0.0) row.rho_over_gamma = *row.rho_norm / *row.gamma_u;
            } else {
                // cross-sector orthogonality is exact: norms decompose
                norm_sq = gamma_norm_sq(U, p) + d * d * v_norm_sq;
                RadialFunction dv = RadialFunction::linear_combination(d, v, 0.0, v);
                dv.set_decay_hints(v.decay_hints());
                hs_int = hs_integral_two_sector(U, dv, sector, p);
                ProjectionResult pr = project(U, p); // radial part is exactly U
                dist = std::sqrt(pr.distance * pr.distance + d * d * v_norm_sq);
                row.rho_norm = dist;
                row.note = "sector-" + std::to_string(sector) +
                           " perturbation; Gamma not defined in the radial class";
            }
            const double hs2 = std::pow(hs_int, 2.0 / dc.two_star_s);
            row.deficit = norm_sq - mu * hs2;
            row.distance = dist;
            row.u_norm_sq = norm_sq;
            row.u_norm = std::sqrt(norm_sq);
            row.in_energy_window_norm = row.u_norm >= 0.5 * wc && row.u_norm <= 1.5 * wc;
            row.in_energy_window_norm_sq = norm_sq >= 0.5 * wc && norm_sq <= 1.5 * wc;
            if (kind == PerturbationKind::manifold_tangent) {
                // moving along M: distance is o(d), the quotient is not a
                // valid test direction
                row.ratio = 0.0;
                row.ok = dist <= 0.1 * d;
                row.note = "tangent direction: distance o(d), ratio not meaningful";
            } else {
                row.ratio = row.deficit / (dist * dist);
                row.ok = true;
            }
        } catch (const accuracy_error& e) {
            row.ok = false;
            row.note = e.what();
        }
        scan.rows.push_back(std::move(row));
    }

    // Richardson limit from the first three usable rows (quadratic in d)
    if (kind != PerturbationKind::manifold_tangent) {
        std::vector<const StabilityRow*> good;
        for (const auto& r : scan.rows)
            if (r.ok) good.push_back(&r);
        if (good.size() >= 3) {
            const double d0 = good[0]->d, d1 = good[1]->d, d2 = good[2]->d;
            const double r0 = good[0]->ratio, r1 = good[1]->ratio, r2 = good[2]->ratio;
            // Lagrange extrapolation of the quadratic through (d_i, r_i) to d = 0
            const double q0 = r0 * d1 * d2 / ((d0 - d1) * (d0 - d2));
            const double q1 = r1 * d0 * d2 / ((d1 - d0) * (d1 - d2));
            const double q2 = r2 * d0 * d1 / ((d2 - d0) * (d2 - d1));
            scan.limit_estimate = q0 + q1 + q2;
            // stage values: linear extrapolations from consecutive pairs
            const double s01 = (r1 * d0 - r0 * d1) / (d0 - d1);
            const double s12 = (r2 * d1 - r1 * d2) / (d1 - d2);
            scan.richardson_stage_delta =
                std::abs(s12 - *scan.limit_estimate) /
                std::max(std::abs(*scan.limit_estimate), 1e-300);
            (void)s01;
        }
    }
    return scan;
}

StabilityScan cfm_scan(const ProblemParams& p, int family_size, std::vector<double> d_grid,
                       unsigned seed) {
    p.validate();
    if (family_size < 1 || family_size > 64)
        throw std::domain_error("cfm_scan: family_size must be in [1, 64]");
    for (double d : d_grid)
        if (!(d > 0.0) || d > 0.05)
            throw std::domain_error("cfm_scan: d_grid must lie in (0, 0.05]");

    StabilityScan scan;
    scan.params = p;
    scan.kind = PerturbationKind::random_orthogonal;
    scan.d_grid = d_grid;
    scan.seed = seed;

    Bubble bu{p, 1.0, 1.0, Normalization::euler_lagrange};
    RadialFunction U = bubble_profile(bu);
    const double wc = energy_window_center(p);

    std::vector<RadialFunction> family(family_size);
    for (int m = 0; m < family_size; ++m)
        family[m] = random_orthogonal_perturbation(p, Normalization::euler_lagrange, seed + m);

    struct Item {
        int m;
        double d;
    };
    std::vector<Item> items;
    for (double d : d_grid)
        for (int m = 0; m < family_size; ++m) items.push_back({m, d});
    std::vector<StabilityRow> rows(items.size());

    parallel::for_index(items.size(), [&](std::size_t i) {
        StabilityRow row;
        row.member = items[i].m;
        row.d = items[i].d;
        const RadialFunction& rho = family[items[i].m];
        try {
            RadialFunction u = RadialFunction::linear_combination(1.0, U, row.d, rho);
            u.set_decay_hints(U.decay_hints());
            // nonnegativity hypothesis check on a log grid
            double umin = 0.0;
            for (int j = 0; j <= 200; ++j) {
                const double t = -10.0 + 20.0 * j / 200.0;
                umin = std::min(umin, u.value(std::exp(t)));
            }
            if (umin < 0.0) {
                row.ok = false;
                row.note = "nonnegativity violated at this d; row skipped";
                rows[i] = std::move(row);
                return;
            }
            const double norm_sq = gamma_norm_sq(u, p);
            row.u_norm_sq = norm_sq;
            row.u_norm = std::sqrt(norm_sq);
            row.in_energy_window_norm = row.u_norm >= 0.5 * wc && row.u_norm <= 1.5 * wc;
            row.in_energy_window_norm_sq = norm_sq >= 0.5 * wc && norm_sq <= 1.5 * wc;
            RadialFunction res = el_residual(u, p, 1.0);
            row.gamma_u = dual_norm(res, p);
            ProjectionResult pr = project(u, p);
            row.rho_norm = pr.distance;
            row.distance = pr.distance;
            DeficitReport dr = deficit(u, p);
            row.deficit = dr.deficit;
            row.ratio = row.deficit / std::max(pr.distance * pr.distance, 1e-300);
            if (*row.gamma_u > 0.0)
                row.rho_over_gamma = *row.rho_norm / *row.gamma_u;
            row.ok = true;
        } catch (const accuracy_error& e) {
            row.ok = false;
            row.note = e.what();
        }
        rows[i] = std::move(row);
    });
    scan.rows = std::move(rows);

    // per-d max of rho/Gamma and its drift across d
    double overall_max = 0.0;
    double drift_lo = std::numeric_limits<double>::infinity(), drift_hi = 0.0;
    for (double d : d_grid) {
        double dmax = 0.0;
        bool any = false;
        for (const auto& r : scan.rows)
            if (r.ok && r.d == d && r.rho_over_gamma) {
                dmax = std::max(dmax, *r.rho_over_gamma);
                any = true;
            }
        if (any) {
            overall_max = std::max(overall_max, dmax);
            drift_lo = std::min(drift_lo, dmax);
            drift_hi = std::max(drift_hi, dmax);
        }
    }
    if (overall_max > 0.0) {
        scan.family_ratio_max = overall_max;
        scan.family_ratio_drift = drift_hi / drift_lo;
    }
    return scan;
}

std::vector<AlphaRow> alpha_table(std::span<const ProblemParams> grid) {
    std::vector<AlphaRow> rows(grid.size());
    parallel::for_index(grid.size(), [&](std::size_t i) {
        AlphaRow row;
        row.params = grid[i];
        try {
            SpectrumReport rep = spectrum_report(grid[i], Normalization::unit_gamma_norm);
            row.eta1 = rep.eta1;
            row.eta2 = rep.eta2;
            row.eta3 = rep.eta3;
            row.alpha = rep.alpha;
            row.Lambda = rep.Lambda;
            row.kernel_dim = rep.kernel_dim;
            row.eta2_over_eta1 = rep.eta2_over_eta1;
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows[i] = std::move(row);
    });
    return rows;
}

std::string stability_csv(const StabilityScan& scan, const std::string& config_comment) {
    std::ostringstream os;
    os.precision(17);
    if (!config_comment.empty()) os << "# " << config_comment << "\n";
    os << "member,d,deficit,distance,ratio,gamma_u,rho_norm,rho_over_gamma,u_norm,u_norm_sq,"
          "in_window_norm,in_window_norm_sq,ok,note\n";
    for (const auto& r : scan.rows) {
        os << r.member << "," << r.d << "," << r.deficit << "," << r.distance << "," << r.ratio
           << ",";
        if (r.gamma_u) os << *r.gamma_u;
        os << ",";
        if (r.rho_norm) os << *r.rho_norm;
        os << ",";
        if (r.rho_over_gamma) os << *r.rho_over_gamma;
        os << "," << r.u_norm << "," << r.u_norm_sq << "," << (r.in_energy_window_norm ? 1 : 0)
           << "," << (r.in_energy_window_norm_sq ? 1 : 0) << "," << (r.ok ? 1 : 0) << ","
           << r.note << "\n";
    }
    return os.str();
}

std::string alpha_csv(std::span<const AlphaRow> rows, const std::string& config_comment) {
    std::ostringstream os;
    os.precision(17);
    if (!config_comment.empty()) os << "# " << config_comment << "\n";
    os << "N,gamma,s,eta1,eta2,eta3,alpha,Lambda,kernel_dim,eta2_over_eta1,ok,error\n";
    for (const auto& r : rows) {
        os << r.params.N << "," << r.params.gamma << "," << r.params.s << "," << r.eta1 << ","
           << r.eta2 << "," << r.eta3 << "," << r.alpha << "," << r.Lambda << "," << r.kernel_dim
           << "," << r.eta2_over_eta1 << "," << (r.ok ? 1 : 0) << "," << r.error << "\n";
    }
    return os.str();
}

} // namespace hslab
