#include "hslab/functionals.hpp"

#include "hslab/errors.hpp"
#include "hslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace hslab {

namespace {

// effective indicial data for sector k
struct SectorRoots {
    double eps_k, beta_minus_k, beta_plus_k, lambda_k;
};

SectorRoots sector_roots(const ProblemParams& p, int k) {
    SectorRoots r;
    r.lambda_k = angular_eigenvalue(p.N, k);
    const double nm2 = p.N - 2.0;
    r.eps_k = std::sqrt(0.25 * nm2 * nm2 - p.gamma + r.lambda_k);
    r.beta_minus_k = 0.5 * nm2 - r.eps_k;
    r.beta_plus_k = 0.5 * nm2 + r.eps_k;
    return r;
}

// window wide enough for e^{-rate |t|} integrands, clipped to sampled ranges
QuadratureSpec window_for(double rate0, double rateinf, double extra_shift,
                          std::initializer_list<const RadialFunction*> funcs) {
    QuadratureSpec spec = QuadratureSpec::for_decay_rates(rate0, rateinf, extra_shift);
    for (const RadialFunction* f : funcs) {
        if (f && f->kind() == RadialFunction::Kind::sampled && !f->decay_hints()) {
            spec.t_min = std::max(spec.t_min, std::log(f->sample_radii().front()));
            spec.t_max = std::min(spec.t_max, std::log(f->sample_radii().back()));
        }
    }
    if (spec.t_max <= spec.t_min)
        throw std::domain_error("quadrature window is empty for the given samples");
    return spec;
}

double checked_value(const QuadratureResult& r, double rel_tol, const char* what) {
    const double scale = std::max(std::abs(r.value), 1e-300);
    if (r.error_estimate > rel_tol * scale)
        throw accuracy_error(std::string(what) + ": estimated relative error " +
                                 std::to_string(r.error_estimate / scale),
                             r.error_estimate);
    return r.value;
}

// d/dt of u(e^t)
double dt_value(const RadialFunction& u, double t) {
    const double r = std::exp(t);
    return u.derivative(r) * r;
}

} // namespace

QuadratureSpec quad_spec_for_profile(const ProblemParams& p, const std::optional<DecayHints>& hints,
                                     int copies, double weight_exponent, double extra_shift) {
    if (!hints) {
        QuadratureSpec spec;
        spec.t_min -= std::abs(extra_shift);
        spec.t_max += std::abs(extra_shift);
        return spec;
    }
    const double q0 = copies * hints->at_zero + weight_exponent + 1.0;
    const double qinf = -(copies * hints->at_infinity + weight_exponent + 1.0);
    if (q0 <= 0.0 || qinf <= 0.0)
        throw accuracy_error("divergent weighted integral for the given decay hints",
                             std::abs(std::min(q0, qinf)));
    (void)p;
    return QuadratureSpec::for_decay_rates(q0, qinf, extra_shift);
}

double gamma_norm_sq(const RadialFunction& u, const ProblemParams& p) {
    const DerivedConstants d = derive(p);
    const double coeff = angular_eigenvalue(p.N, u.sector()) - p.gamma;
    const double nm2 = p.N - 2.0;

    IntegrandHints ih;
    double rate0 = 1.0, rateinf = 1.0;
    if (u.decay_hints()) {
        rate0 = 2.0 * u.decay_hints()->at_zero + nm2;
        rateinf = -(2.0 * u.decay_hints()->at_infinity + nm2);
        if (rate0 <= 0.0 || rateinf <= 0.0)
            throw accuracy_error("gamma_norm_sq: divergent for the given decay hints",
                                 std::min(rate0, rateinf));
        ih.q_at_zero = rate0;
        ih.q_at_inf = -rateinf;
    }
    QuadratureSpec spec = window_for(rate0, rateinf, 0.0, {&u});
    auto g = [&](double t) {
        const double ut = dt_value(u, t);
        const double uv = u.value(std::exp(t));
        return (ut * ut + coeff * uv * uv) * std::exp(nm2 * t);
    };
    QuadratureResult r = integrate_log_checked(g, spec, ih);
    return d.sphere_area * checked_value(r, 1e-3, "gamma_norm_sq");
}

double dirichlet_norm_sq(const RadialFunction& u, const ProblemParams& p) {
    ProblemParams q = p;
    q.gamma = 0.0;
    q.reference_mode = true;
    return gamma_norm_sq(u, q);
}

double inner_gamma(const RadialFunction& u, const RadialFunction& v, const ProblemParams& p) {
    if (u.sector() != v.sector()) return 0.0; // angular orthogonality is exact
    const DerivedConstants d = derive(p);
    const double coeff = angular_eigenvalue(p.N, u.sector()) - p.gamma;
    const double nm2 = p.N - 2.0;

    IntegrandHints ih;
    double rate0 = 1.0, rateinf = 1.0;
    if (u.decay_hints() && v.decay_hints()) {
        rate0 = u.decay_hints()->at_zero + v.decay_hints()->at_zero + nm2;
        rateinf = -(u.decay_hints()->at_infinity + v.decay_hints()->at_infinity + nm2);
        if (rate0 <= 0.0 || rateinf <= 0.0)
            throw accuracy_error("inner_gamma: divergent for the given decay hints",
                                 std::min(rate0, rateinf));
        ih.q_at_zero = rate0;
        ih.q_at_inf = -rateinf;
    }
    QuadratureSpec spec = window_for(rate0, rateinf, 0.0, {&u, &v});
    auto g = [&](double t) {
        const double r = std::exp(t);
        return (dt_value(u, t) * dt_value(v, t) + coeff * u.value(r) * v.value(r)) *
               std::exp(nm2 * t);
    };
    // inner products may legitimately cancel; no relative check against the value
    QuadratureResult res = integrate_log_checked(g, spec, ih);
    return d.sphere_area * res.value;
}

double angular_lp_factor(int N, int k, double pw) {
    if (k == 0) return 1.0;
    struct Key {
        int N, k;
        double p;
        bool operator<(const Key& o) const {
            return std::tie(N, k, p) < std::tie(o.N, o.k, o.p);
        }
    };
    static std::map<Key, double> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(Key{N, k, pw});
        if (it != cache.end()) return it->second;
    }
    // zonal harmonic: Gegenbauer C_k^{(N-2)/2}(cos phi), normalized to mean square 1
    const double alpha = 0.5 * (N - 2.0);
    auto gegen = [&](double x) {
        double c0 = 1.0, c1 = 2.0 * alpha * x;
        if (k == 0) return c0;
        if (k == 1) return c1;
        double c2 = 0.0;
        for (int n = 2; n <= k; ++n) {
            c2 = (2.0 * (n + alpha - 1.0) * x * c1 - (n + 2.0 * alpha - 2.0) * c0) / n;
            c0 = c1;
            c1 = c2;
        }
        return c2;
    };
    // integrate over phi in [0, pi] with weight sin^{N-2}
    const auto& gx = detail::gl16_nodes();
    const auto& gw = detail::gl16_weights();
    double wsum = 0.0, sq = 0.0, pp = 0.0;
    const int panels = 8;
    for (int i = 0; i < panels; ++i) {
        const double a = M_PI * i / panels, b = M_PI * (i + 1) / panels;
        for (std::size_t j = 0; j < gx.size(); ++j) {
            const double phi = 0.5 * (a + b) + 0.5 * (b - a) * gx[j];
            const double w = 0.5 * (b - a) * gw[j] * std::pow(std::sin(phi), N - 2.0);
            const double y = gegen(std::cos(phi));
            wsum += w;
            sq += w * y * y;
            pp += w * std::pow(std::abs(y), pw);
        }
    }
    const double norm = std::sqrt(sq / wsum); // mean-square normalization
    double again = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = M_PI * i / panels, b = M_PI * (i + 1) / panels;
        for (std::size_t j = 0; j < gx.size(); ++j) {
            const double phi = 0.5 * (a + b) + 0.5 * (b - a) * gx[j];
            const double w = 0.5 * (b - a) * gw[j] * std::pow(std::sin(phi), N - 2.0);
            again += w * std::pow(std::abs(gegen(std::cos(phi)) / norm), pw);
        }
    }
    const double result = again / wsum;
    std::lock_guard<std::mutex> lock(mu);
    cache[Key{N, k, pw}] = result;
    return result;
}

double hs_weighted_integral(const RadialFunction& u, const ProblemParams& p) {
    const DerivedConstants d = derive(p);
    const double ts = d.two_star_s;
    IntegrandHints ih;
    double rate0 = 1.0, rateinf = 1.0;
    if (u.decay_hints()) {
        rate0 = ts * u.decay_hints()->at_zero + p.N - p.s;
        rateinf = -(ts * u.decay_hints()->at_infinity + p.N - p.s);
        if (rate0 <= 0.0 || rateinf <= 0.0)
            throw accuracy_error("hs integral: divergent for the given decay hints",
                                 std::min(rate0, rateinf));
        ih.q_at_zero = rate0;
        ih.q_at_inf = -rateinf;
    }
    QuadratureSpec spec = window_for(rate0, rateinf, 0.0, {&u});
    auto g = [&](double t) {
        return std::pow(std::abs(u.value(std::exp(t))), ts) * std::exp((p.N - p.s) * t);
    };
    QuadratureResult r = integrate_log_checked(g, spec, ih);
    const double ang = angular_lp_factor(p.N, u.sector(), ts);
    return d.sphere_area * ang * checked_value(r, 1e-3, "hs_weighted_integral");
}

double hs_norm(const RadialFunction& u, const ProblemParams& p) {
    const DerivedConstants d = derive(p);
    return std::pow(hs_weighted_integral(u, p), 1.0 / d.two_star_s);
}

DeficitReport deficit(const RadialFunction& u, const ProblemParams& p) {
    if (u.sector() != 0)
        throw std::domain_error("deficit: defined on the radial (sector 0) class");
    DeficitReport rep;
    rep.params = p;
    rep.mu = best_constant(p);
    rep.gamma_norm_sq = gamma_norm_sq(u, p);
    rep.hs_norm = hs_norm(u, p);
    rep.deficit = rep.gamma_norm_sq - rep.mu * rep.hs_norm * rep.hs_norm;
    return rep;
}

double energy(const RadialFunction& u, const ProblemParams& p) {
    const DerivedConstants d = derive(p);
    return 0.5 * gamma_norm_sq(u, p) - hs_weighted_integral(u, p) / d.two_star_s;
}

RadialFunction el_residual(const RadialFunction& u, const ProblemParams& p, double coefficient) {
    p.validate();
    if (u.kind() == RadialFunction::Kind::sampled && u.sample_radii().size() < 128)
        throw std::domain_error(
            "el_residual: sampled input needs >= 128 points to resolve second derivatives");
    const DerivedConstants d = derive(p);
    const double ts = d.two_star_s;
    const double coeff2 = p.gamma - angular_eigenvalue(p.N, u.sector());
    const int N = p.N;
    const double s = p.s;
    auto uu = u;
    auto val = [uu, N, s, ts, coeff2, coefficient](double r) {
        const double v = uu.value(r);
        return uu.second_derivative(r) + (N - 1.0) * uu.derivative(r) / r +
               coeff2 * v / (r * r) +
               coefficient * std::pow(std::abs(v), ts - 2.0) * v * std::pow(r, -s);
    };
    return RadialFunction::closed_form(u.sector(), val, {}, {}, std::nullopt);
}

namespace {

// shared machinery for dual_norm / green_solve: cumulative kernel integrals
struct GreenParts {
    std::vector<double> edges;      // panel edges in t
    std::vector<double> Fm, Fp;     // cumulative integrals at edges
    double tail_low = 0.0;          // contribution of (-inf, t_min] to Fm
    double tail_high = 0.0;         // contribution of [t_max, inf) to Fp
    SectorRoots roots;
};

GreenParts green_parts(const RadialFunction& f, const ProblemParams& p) {
    const SectorRoots roots = sector_roots(p, f.sector());
    const DerivedConstants d = derive(p);
    double base = std::max(34.0, 24.0 / std::max(1e-3, 2.0 * d.epsilon));
    QuadratureSpec spec = window_for(1.0, 1.0, base - 34.0, {&f});
    const int npanels = std::max(8, spec.n / 16);

    auto fl = f;
    auto gm = [fl, roots, N = p.N](double t) {
        return fl.value(std::exp(t)) * std::exp((N - roots.beta_minus_k) * t);
    };
    auto gp = [fl, roots, N = p.N](double t) {
        return fl.value(std::exp(t)) * std::exp((N - roots.beta_plus_k) * t);
    };

    GreenParts parts;
    parts.roots = roots;
    parts.edges.resize(npanels + 1);
    for (int i = 0; i <= npanels; ++i)
        parts.edges[i] = spec.t_min + (spec.t_max - spec.t_min) * i / npanels;

    parts.Fm.assign(npanels + 1, 0.0);
    parts.Fp.assign(npanels + 1, 0.0);
    for (int i = 0; i < npanels; ++i)
        parts.Fm[i + 1] = parts.Fm[i] + detail::panel16(gm, parts.edges[i], parts.edges[i + 1]);
    for (int i = npanels - 1; i >= 0; --i)
        parts.Fp[i] = parts.Fp[i + 1] + detail::panel16(gp, parts.edges[i], parts.edges[i + 1]);

    // growth/tail handling at the window ends. Unmeasurable slopes (sign
    // flips between probes) indicate rounding noise, not growth: those tails
    // are spent. A measured non-decaying slope on a significant edge value is
    // a genuine divergence.
    auto slope = [](auto& g, double t, double dstep) -> std::optional<double> {
        const double a = g(t), b = g(t + dstep);
        if (a == 0.0 || b == 0.0 || (a > 0) != (b > 0)) return std::nullopt;
        return (std::log(std::abs(b)) - std::log(std::abs(a))) / dstep;
    };
    double peak = 0.0, peakp = 0.0;
    for (int i = 0; i <= npanels; ++i) {
        const double mid = i < npanels ? 0.5 * (parts.edges[i] + parts.edges[i + 1])
                                       : parts.edges[i];
        peak = std::max({peak, std::abs(gm(parts.edges[i])), std::abs(gm(mid))});
        peakp = std::max({peakp, std::abs(gp(parts.edges[i])), std::abs(gp(mid))});
    }
    const double ga = gm(parts.edges.front());
    if (ga != 0.0 && std::abs(ga) > 1e-9 * peak) {
        auto q = slope(gm, parts.edges.front(), 0.25);
        if (q && *q > 1e-12)
            parts.tail_low = ga / *q;
        else if (q)
            throw accuracy_error("dual_norm: f grows too fast at r -> 0", std::abs(ga));
    }
    const double gb = gp(parts.edges.back());
    if (gb != 0.0 && std::abs(gb) > 1e-9 * peakp) {
        auto q = slope(gp, parts.edges.back() - 0.25, 0.25);
        if (q && *q < -1e-12)
            parts.tail_high = -gb / *q;
        else if (q)
            throw accuracy_error("dual_norm: f grows too fast at r -> infinity", std::abs(gb));
    }
    for (auto& v : parts.Fm) v += parts.tail_low;
    for (auto& v : parts.Fp) v += parts.tail_high;
    return parts;
}

} // namespace

double dual_norm(const RadialFunction& f, const ProblemParams& p) {
    p.validate();
    const DerivedConstants d = derive(p);
    GreenParts parts = green_parts(f, p);
    const auto& roots = parts.roots;
    auto fl = f;
    auto gm = [fl, roots, N = p.N](double t) {
        return fl.value(std::exp(t)) * std::exp((N - roots.beta_minus_k) * t);
    };
    auto gp = [fl, roots, N = p.N](double t) {
        return fl.value(std::exp(t)) * std::exp((N - roots.beta_plus_k) * t);
    };
    // norm^2 = (sph / eps_k) * int gp(t) Fm(t) dt  (double-integral symmetry)
    const auto& gx = detail::gl16_nodes();
    const auto& gw = detail::gl16_weights();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < parts.edges.size(); ++i) {
        const double a = parts.edges[i], b = parts.edges[i + 1];
        const double xm = 0.5 * (a + b), xr = 0.5 * (b - a);
        for (std::size_t j = 0; j < gx.size(); ++j) {
            const double t = xm + xr * gx[j];
            const double Fm_t = parts.Fm[i] + detail::panel16(gm, a, t);
            total += xr * gw[j] * gp(t) * Fm_t;
        }
    }
    // upper outer tail: gp ~ e^{q t} with Fm ~ const
    const double gb = gp(parts.edges.back());
    if (gb != 0.0) {
        const double step = 0.25;
        const double g2 = gp(parts.edges.back() - step);
        if (g2 != 0.0 && (gb > 0) == (g2 > 0)) {
            const double q = (std::log(std::abs(gb)) - std::log(std::abs(g2))) / step;
            if (q < -1e-12) total += -gb / q * parts.Fm.back();
        }
    }
    const double norm2 = d.sphere_area / parts.roots.eps_k * total;
    return std::sqrt(std::max(0.0, norm2));
}

RadialFunction green_solve(const RadialFunction& f, const ProblemParams& p, int n_grid) {
    p.validate();
    GreenParts parts = green_parts(f, p);
    const auto& roots = parts.roots;
    auto fl = f;
    auto gm = [fl, roots, N = p.N](double t) {
        return fl.value(std::exp(t)) * std::exp((N - roots.beta_minus_k) * t);
    };
    auto gp = [fl, roots, N = p.N](double t) {
        return fl.value(std::exp(t)) * std::exp((N - roots.beta_plus_k) * t);
    };
    const double t0 = parts.edges.front(), t1 = parts.edges.back();
    std::vector<double> radii(n_grid), values(n_grid);
    // w(r) = (r^{-beta_+} Fm(r) + r^{-beta_-} Fp(r)) / (2 eps_k)
    int panel = 0;
    for (int i = 0; i < n_grid; ++i) {
        const double t = t0 + (t1 - t0) * i / (n_grid - 1.0);
        while (panel + 2 < static_cast<int>(parts.edges.size()) && parts.edges[panel + 1] < t)
            ++panel;
        const double Fm_t = parts.Fm[panel] + detail::panel16(gm, parts.edges[panel], t);
        const double Fp_t = parts.Fp[panel + 1] + detail::panel16(gp, t, parts.edges[panel + 1]);
        radii[i] = std::exp(t);
        values[i] = (std::exp(-roots.beta_plus_k * t) * Fm_t +
                     std::exp(-roots.beta_minus_k * t) * Fp_t) /
                    (2.0 * roots.eps_k);
    }
    return RadialFunction::sampled(f.sector(), std::move(radii), std::move(values),
                                   DecayHints{-roots.beta_minus_k, -roots.beta_plus_k});
}

double hs_integral_two_sector(const RadialFunction& u0, const RadialFunction& uk, int k,
                              const ProblemParams& p) {
    if (u0.sector() != 0) throw std::domain_error("hs_integral_two_sector: u0 must be sector 0");
    if (k < 1) throw std::domain_error("hs_integral_two_sector: k must be >= 1");
    const DerivedConstants d = derive(p);
    const double ts = d.two_star_s;

    // angular nodes: phi in [0, pi], weight sin^{N-2}, zonal harmonic values
    const double alpha = 0.5 * (p.N - 2.0);
    auto gegen = [&](double x) {
        double c0 = 1.0, c1 = 2.0 * alpha * x;
        if (k == 1) return c1;
        double c2 = 0.0;
        for (int n = 2; n <= k; ++n) {
            c2 = (2.0 * (n + alpha - 1.0) * x * c1 - (n + 2.0 * alpha - 2.0) * c0) / n;
            c0 = c1;
            c1 = c2;
        }
        return c2;
    };
    const auto& gx = detail::gl16_nodes();
    const auto& gw = detail::gl16_weights();
    std::vector<double> phiw, Y;
    double wsum = 0.0, sq = 0.0;
    const int panels = 8;
    for (int i = 0; i < panels; ++i) {
        const double a = M_PI * i / panels, b = M_PI * (i + 1) / panels;
        for (std::size_t j = 0; j < gx.size(); ++j) {
            const double phi = 0.5 * (a + b) + 0.5 * (b - a) * gx[j];
            const double w = 0.5 * (b - a) * gw[j] * std::pow(std::sin(phi), p.N - 2.0);
            phiw.push_back(w);
            Y.push_back(gegen(std::cos(phi)));
            wsum += w;
            sq += w * Y.back() * Y.back();
        }
    }
    const double ynorm = std::sqrt(sq / wsum);
    for (auto& y : Y) y /= ynorm;

    double rate0 = 1.0, rateinf = 1.0;
    IntegrandHints ih;
    if (u0.decay_hints()) {
        rate0 = ts * u0.decay_hints()->at_zero + p.N - p.s;
        rateinf = -(ts * u0.decay_hints()->at_infinity + p.N - p.s);
        ih.q_at_zero = rate0;
        ih.q_at_inf = -rateinf;
    }
    QuadratureSpec spec = window_for(rate0, rateinf, 0.0, {&u0, &uk});
    auto g = [&](double t) {
        const double r = std::exp(t);
        const double a = u0.value(r), b = uk.value(r);
        double avg = 0.0;
        for (std::size_t j = 0; j < Y.size(); ++j)
            avg += phiw[j] * std::pow(std::abs(a + b * Y[j]), ts);
        return avg / wsum * std::exp((p.N - p.s) * t);
    };
    QuadratureResult r = integrate_log_checked(g, spec, ih);
    return d.sphere_area * checked_value(r, 1e-3, "hs_integral_two_sector");
}

} // namespace hslab
