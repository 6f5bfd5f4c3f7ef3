#include "hslab/spectral.hpp"

#include "hslab/errors.hpp"
#include "hslab/quadrature.hpp"
#include "hslab/functionals.hpp"
#include "hslab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hslab {

namespace {

struct PencilGrid {
    std::vector<double> t;   // interior nodes
    std::vector<double> w;   // weight at nodes
    double h = 0.0;
    double dia = 0.0;        // 2/h^2 + eps_k^2 (constant diagonal of A)
    double off = 0.0;        // -1/h^2
};

struct ProblemData {
    double eps, eps_t, eps_k, Cw, t_center, t_half;
    int n_base;
};

ProblemData problem_data(const SectorEigenproblem& prob) {
    prob.params.validate();
    if (!(prob.lambda_scale > 0.0))
        throw std::domain_error("solve_sector: lambda_scale must be positive");
    const DerivedConstants d = derive(prob.params);
    ProblemData pd;
    pd.eps = d.epsilon;
    pd.eps_t = d.epsilon * (2.0 - prob.params.s) / (prob.params.N - 2.0);
    pd.eps_k = std::sqrt(d.epsilon * d.epsilon + angular_eigenvalue(prob.params.N, prob.sector));
    const double C = normalization_constant(prob.params, prob.normalization);
    pd.Cw = std::pow(C, d.two_star_s - 2.0);
    pd.t_center = std::log(prob.lambda_scale);
    // window covers the sech^{eps_k/eps_t} asymptotics of the eigenfunctions
    pd.t_half = prob.t_half > 0.0
                    ? prob.t_half
                    : std::max(17.0, 13.0 / pd.eps + 1.2 / pd.eps_t + 6.0) +
                          quadrature_defaults().extra_half_width;
    pd.n_base = prob.n > 0 ? std::max(512, prob.n)
                           : std::max(512, static_cast<int>(std::ceil(2.0 * pd.t_half / 0.04)));
    // Dirichlet truncation of the ground state behaves like
    // (2 e^{-eps_t t_half})^{2 eps_k / eps_t}; grid refinement cannot see
    // this, so an inadequate window must be rejected outright.
    const double log_trunc =
        2.0 * (pd.eps_k / pd.eps_t) * std::log(2.0) - 2.0 * pd.eps_k * pd.t_half;
    if (log_trunc > std::log(1e-9))
        throw accuracy_error("solve_sector: t window too narrow for the indicial decay "
                             "(estimated truncation " +
                                 std::to_string(std::exp(log_trunc)) + ")",
                             std::exp(log_trunc));
    return pd;
}

PencilGrid make_grid(const ProblemData& pd, int intervals) {
    PencilGrid g;
    g.h = 2.0 * pd.t_half / intervals;
    const int n = intervals - 1;
    g.t.resize(n);
    g.w.resize(n);
    for (int i = 0; i < n; ++i) {
        g.t[i] = pd.t_center - pd.t_half + (i + 1) * g.h;
        const double x = pd.eps_t * (g.t[i] - pd.t_center);
        const double ch = 2.0 * std::cosh(std::min(std::abs(x), 350.0));
        g.w[i] = std::max(pd.Cw / (ch * ch), 1e-300);
    }
    g.dia = 2.0 / (g.h * g.h) + pd.eps_k * pd.eps_k;
    g.off = -1.0 / (g.h * g.h);
    return g;
}

// number of pencil eigenvalues of (A, B) strictly below x, via the inertia
// of A - x B (LDL^T pivot signs); well scaled because B is never inverted
int sturm_count(const PencilGrid& g, double x) {
    int count = 0;
    const double off2 = g.off * g.off;
    double dprev = g.dia - x * g.w[0];
    if (dprev < 0.0) ++count;
    for (std::size_t i = 1; i < g.w.size(); ++i) {
        if (dprev == 0.0) dprev = 1e-300;
        const double di = (g.dia - x * g.w[i]) - off2 / dprev;
        if (di < 0.0) ++count;
        dprev = di;
    }
    return count;
}

double bisect_eigenvalue(const PencilGrid& g, int index) {
    double hi = 1.0;
    while (sturm_count(g, hi) < index + 1) {
        hi *= 2.0;
        if (hi > 1e18) throw accuracy_error("solve_sector: eigenvalue bracket failed", hi);
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (sturm_count(g, mid) >= index + 1)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

// tridiagonal solve (A - sigma B) x = rhs with partial pivoting
void shifted_solve(const PencilGrid& g, double sigma, std::vector<double>& x) {
    const std::size_t n = g.w.size();
    std::vector<double> dl(n, g.off), dd(n), du(n, g.off), du2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) dd[i] = g.dia - sigma * g.w[i];
    std::vector<int> piv(n, 0);
    // LU with partial pivoting on a tridiagonal matrix (extra superdiagonal)
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(dd[i]) >= std::abs(dl[i + 1])) {
            if (dd[i] == 0.0) dd[i] = 1e-300;
            const double m = dl[i + 1] / dd[i];
            dd[i + 1] -= m * du[i];
            dl[i + 1] = m;
        } else {
            piv[i] = 1;
            const double m = dd[i] / dl[i + 1];
            std::swap(dd[i], dl[i + 1]);
            const double tmp = du[i];
            du[i] = dd[i + 1];
            dd[i + 1] = tmp - m * dd[i + 1];
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -m * du[i + 1];
            }
            dl[i + 1] = m;
            std::swap(x[i], x[i + 1]);
        }
        x[i + 1] -= dl[i + 1] * x[i];
    }
    if (dd[n - 1] == 0.0) dd[n - 1] = 1e-300;
    x[n - 1] /= dd[n - 1];
    if (n >= 2) x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / (dd[n - 2] == 0.0 ? 1e-300 : dd[n - 2]);
    for (int i = static_cast<int>(n) - 3; i >= 0; --i) {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / (dd[i] == 0.0 ? 1e-300 : dd[i]);
    }
}

// inverse iteration for the eigenvector at eigenvalue eta
std::vector<double> eigenvector(const PencilGrid& g, double eta) {
    const std::size_t n = g.w.size();
    std::vector<double> v(n);
    // deterministic start vector with no accidental symmetry
    unsigned state = 0x9E3779B9u;
    for (std::size_t i = 0; i < n; ++i) {
        state = state * 1664525u + 1013904223u;
        v[i] = (state >> 9) * (1.0 / (1u << 23)) - 1.0;
    }
    const double sigma = eta * (1.0 + 1e-9) + 1e-13;
    for (int it = 0; it < 5; ++it) {
        shifted_solve(g, sigma, v);
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (double& x : v) x /= nrm;
    }
    return v;
}

// discrete gamma-norm^2 of psi on the grid (quadratic form of A times h)
double discrete_gamma_norm_sq(const PencilGrid& g, const std::vector<double>& v,
                              double sphere_area) {
    double qa = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) qa += g.dia * v[i] * v[i];
    for (std::size_t i = 0; i + 1 < v.size(); ++i) qa += 2.0 * g.off * v[i] * v[i + 1];
    return sphere_area * qa * g.h;
}

} // namespace

SectorSolveResult solve_sector(const SectorEigenproblem& prob, int count,
                               bool want_eigenfunctions) {
    if (count < 1 || count > 6)
        throw std::domain_error("solve_sector: count must be between 1 and 6");
    ProblemData pd = problem_data(prob);
    const DerivedConstants d = derive(prob.params);

    SectorSolveResult res;
    res.eigenvalues.resize(count);
    res.node_counts.resize(count);
    PencilGrid g2, g4;
    double worst_delta = 0.0;
    for (int attempt = 0;; ++attempt) {
        const int m0 = pd.n_base;
        const PencilGrid g1 = make_grid(pd, m0);
        g2 = make_grid(pd, 2 * m0);
        g4 = make_grid(pd, 4 * m0);
        res.grid_n = 4 * m0;
        worst_delta = 0.0;
        for (int idx = 0; idx < count; ++idx) {
            const double e1 = bisect_eigenvalue(g1, idx);
            const double e2 = bisect_eigenvalue(g2, idx);
            const double e4 = bisect_eigenvalue(g4, idx);
            const double r1 = (4.0 * e2 - e1) / 3.0;
            const double r2 = (4.0 * e4 - e2) / 3.0;
            const double eta = (16.0 * r2 - r1) / 15.0;
            res.eigenvalues[idx] = eta;
            res.node_counts[idx] = idx;
            worst_delta =
                std::max(worst_delta, std::abs(r2 - r1) / std::max(std::abs(eta), 1e-300));
        }
        res.refinement_delta = worst_delta;
        if (worst_delta <= 1e-7) break;
        if (attempt >= 2)
            throw accuracy_error("solve_sector: refinement did not converge (relative change " +
                                     std::to_string(worst_delta) + ")",
                                 worst_delta);
        pd.n_base *= 2;
    }

    if (want_eigenfunctions) {
        res.eigenfunctions.resize(count);
        const double c = 0.5 * (prob.params.N - 2.0);
        const double bm_k = c - pd.eps_k, bp_k = c + pd.eps_k;
        for (int idx = 0; idx < count; ++idx) {
            std::vector<double> v2 = eigenvector(g2, res.eigenvalues[idx]);
            std::vector<double> v4 = eigenvector(g4, res.eigenvalues[idx]);
            // normalize both to continuum gamma-norm 1 and align signs
            const double n2 = std::sqrt(discrete_gamma_norm_sq(g2, v2, d.sphere_area));
            const double n4 = std::sqrt(discrete_gamma_norm_sq(g4, v4, d.sphere_area));
            for (auto& x : v2) x /= n2;
            for (auto& x : v4) x /= n4;
            // sign: largest-magnitude entry of the fine vector positive,
            // coarse vector aligned by inner product
            std::size_t imax = 0;
            for (std::size_t i = 0; i < v4.size(); ++i)
                if (std::abs(v4[i]) > std::abs(v4[imax])) imax = i;
            const double s4 = v4[imax] >= 0 ? 1.0 : -1.0;
            double dot = 0.0;
            for (std::size_t j = 0; j < v2.size(); ++j) dot += v2[j] * v4[2 * j + 1];
            const double s2 = dot >= 0.0 ? s4 : -s4;
            // nodes of g2 are the odd-indexed... (g2 interior j=1..2m0-1 at spacing h2;
            // g4 interior i=1..4m0-1 at h2/2; shared points: i = 2j)
            std::vector<double> radii, values;
            radii.reserve(v2.size());
            int nodes = 0;
            double prev = 0.0;
            for (std::size_t j = 0; j < v2.size(); ++j) {
                const std::size_t i = 2 * j + 1; // g4 index of g2 node j
                const double extr = (4.0 * s4 * v4[i] - s2 * v2[j]) / 3.0;
                const double t = g2.t[j];
                radii.push_back(std::exp(t));
                values.push_back(extr * std::exp(-c * t));
                if (j > 0 && extr * prev < 0.0 && (std::abs(extr) > 1e-8 || std::abs(prev) > 1e-8))
                    ++nodes;
                if (extr != 0.0) prev = extr;
            }
            res.node_counts[idx] = nodes;
            RadialFunction f = RadialFunction::sampled(prob.sector, std::move(radii),
                                                       std::move(values), DecayHints{-bm_k, -bp_k});
            // final normalization through the continuum quadrature
            ProblemParams pp = prob.params;
            const double nq = std::sqrt(gamma_norm_sq(f, pp));
            std::vector<double> vals = f.sample_values();
            for (auto& x : vals) x /= nq;
            res.eigenfunctions[idx] = RadialFunction::sampled(prob.sector, f.sample_radii(), vals,
                                                              DecayHints{-bm_k, -bp_k});
        }
    }
    return res;
}

SpectrumReport spectrum_report(const ProblemParams& p, Normalization norm, int grid_n_override,
                               double t_half_override) {
    p.validate();
    SpectrumReport rep;
    rep.params = p;
    rep.normalization = norm;

    const int per_sector = 4;
    // the first three sectors are always needed; solve them as one batch
    rep.sectors.resize(3);
    parallel::for_index(3, [&](std::size_t k) {
        SectorEigenproblem prob{p, static_cast<int>(k), norm, 1.0, t_half_override,
                                grid_n_override};
        SectorSolveResult r = solve_sector(prob, per_sector, false);
        rep.sectors[k] = SectorSpectrum{static_cast<int>(k),
                                        harmonic_multiplicity(p.N, static_cast<int>(k)),
                                        std::move(r.eigenvalues)};
    });
    double eta3_candidate = std::min({rep.sectors[0].eigenvalues[2],
                                      rep.sectors[1].eigenvalues[0],
                                      rep.sectors[2].eigenvalues[0]});
    // extend until the sector ground level clears the candidate
    // (ground levels are increasing in k)
    for (int k = 3; k <= 8 && rep.sectors.back().eigenvalues[0] <= eta3_candidate; ++k) {
        SectorEigenproblem prob{p, k, norm, 1.0, t_half_override, grid_n_override};
        SectorSolveResult r = solve_sector(prob, per_sector, false);
        rep.sectors.push_back(SectorSpectrum{k, harmonic_multiplicity(p.N, k),
                                             std::move(r.eigenvalues)});
        eta3_candidate = std::min(eta3_candidate, rep.sectors.back().eigenvalues[0]);
    }

    // merged ascending list with angular multiplicities
    struct Entry {
        double eta;
        int k, idx;
        long long mult;
    };
    std::vector<Entry> entries;
    for (const auto& sec : rep.sectors)
        for (std::size_t i = 0; i < sec.eigenvalues.size(); ++i)
            entries.push_back({sec.eigenvalues[i], sec.k, static_cast<int>(i), sec.multiplicity});
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.eta < b.eta; });

    long long pos = 0;
    double e1 = 0, e2 = 0, e3 = 0;
    int e3k = 0, e3i = 0;
    for (const auto& e : entries) {
        if (pos < 1 && pos + e.mult >= 1) e1 = e.eta;
        if (pos < 2 && pos + e.mult >= 2) e2 = e.eta;
        if (pos < 3 && pos + e.mult >= 3) {
            e3 = e.eta;
            e3k = e.k;
            e3i = e.idx;
            break;
        }
        pos += e.mult;
    }
    rep.eta1 = e1;
    rep.eta2 = e2;
    rep.eta3 = e3;
    rep.eta3_sector = e3k;
    rep.eta3_index = e3i;

    // alternative reading: third distinct value
    std::vector<double> distinct;
    for (const auto& e : entries) {
        if (distinct.empty() || e.eta > distinct.back() * (1.0 + 1e-9)) distinct.push_back(e.eta);
        if (distinct.size() == 3) break;
    }
    rep.eta3_distinct = distinct.size() >= 3 ? distinct[2] : rep.eta3;

    rep.alpha = 1.0 - rep.eta2 / rep.eta3;
    rep.Lambda = rep.eta3;
    rep.eta2_over_eta1 = rep.eta2 / rep.eta1;

    long long kdim = 0;
    for (const auto& e : entries)
        if (std::abs(e.eta - rep.eta2) <= 1e-5 * rep.eta2) kdim += e.mult;
    rep.kernel_dim = static_cast<int>(kdim);
    return rep;
}

RadialFunction spectrum_eigenfunction(const ProblemParams& p, Normalization norm, int sector,
                                      int index) {
    SectorEigenproblem prob{p, sector, norm};
    SectorSolveResult r = solve_sector(prob, index + 1, true);
    return r.eigenfunctions[index];
}

RadialFunction apply_linearized(const ProblemParams& p, const RadialFunction& rho,
                                double coefficient, Normalization norm, double lambda) {
    p.validate();
    const DerivedConstants d = derive(p);
    const double ts = d.two_star_s;
    const double coeff2 = p.gamma - angular_eigenvalue(p.N, rho.sector());
    Bubble b{p, lambda, 1.0, norm};
    RadialFunction W = bubble_profile(b);
    auto rr = rho;
    const int N = p.N;
    const double s = p.s;
    auto val = [rr, W, N, s, ts, coeff2, coefficient](double r) {
        return -rr.second_derivative(r) - (N - 1.0) * rr.derivative(r) / r -
               coeff2 * rr.value(r) / (r * r) -
               coefficient * std::pow(W.value(r), ts - 2.0) * std::pow(r, -s) * rr.value(r);
    };
    return RadialFunction::closed_form(rho.sector(), val, {}, {}, std::nullopt);
}

} // namespace hslab
