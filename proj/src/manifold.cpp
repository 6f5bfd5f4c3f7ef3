#include "hslab/manifold.hpp"

#include "hslab/errors.hpp"
#include "hslab/functionals.hpp"
#include "hslab/parallel.hpp"
#include "hslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hslab {

namespace {

constexpr double kLogLambdaMin = -4.0 * 2.302585092994046; // log(1e-4)
constexpr double kLogLambdaMax = 4.0 * 2.302585092994046;
constexpr int kMultiStarts = 41;

// <u, U^lambda>_gamma against the unit-norm bubble through its equation:
// <u, W^l>_g = mu^{2*/2} int u (W^l)^{2*-1} / |x|^s.
struct InnerEvaluator {
    const RadialFunction* u;
    ProblemParams p;
    DerivedConstants d;
    double mu_pow; // mu^{2*/2}
    double base_rate0, base_rateinf;
    mutable long evals = 0;

    explicit InnerEvaluator(const RadialFunction& uu, const ProblemParams& pp)
        : u(&uu), p(pp), d(derive(pp)) {
        mu_pow = std::pow(best_constant(p), 0.5 * d.two_star_s);
        const double u0 = u->decay_hints() ? u->decay_hints()->at_zero : 0.0;
        const double uinf = u->decay_hints() ? u->decay_hints()->at_infinity : 0.0;
        base_rate0 = u0 - d.beta_minus * (d.two_star_s - 1.0) + p.N - p.s;
        base_rateinf = -(uinf - d.beta_plus * (d.two_star_s - 1.0) + p.N - p.s);
        if (!u->decay_hints()) {
            // bubble-kernel rates alone keep the window finite
            base_rate0 = d.epsilon;
            base_rateinf = d.epsilon;
        }
    }

    double operator()(double loglam) const {
        ++evals;
        Bubble b{p, std::exp(loglam), 1.0, Normalization::unit_gamma_norm};
        RadialFunction W = bubble_profile(b);
        QuadratureSpec spec =
            QuadratureSpec::for_decay_rates(base_rate0, base_rateinf, std::abs(loglam));
        if (u->kind() == RadialFunction::Kind::sampled && !u->decay_hints()) {
            spec.t_min = std::max(spec.t_min, std::log(u->sample_radii().front()));
            spec.t_max = std::min(spec.t_max, std::log(u->sample_radii().back()));
        }
        const double ts = d.two_star_s;
        auto g = [&](double t) {
            const double r = std::exp(t);
            return u->value(r) * std::pow(W.value(r), ts - 1.0) * std::exp((p.N - p.s) * t);
        };
        QuadratureResult res = integrate_log_checked(g, spec, {});
        return mu_pow * d.sphere_area * res.value;
    }
};

struct GoldenResult {
    double x, f;
    int iterations;
};

// maximize f on [a, b] by golden section, then one parabolic polish
template <class F>
GoldenResult golden_max(const F& f, double a, double b, double tol) {
    const double R = 0.6180339887498949;
    double x1 = b - R * (b - a), x2 = a + R * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int it = 0;
    while (b - a > tol && it < 200) {
        ++it;
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + R * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - R * (b - a);
            f1 = f(x1);
        }
    }
    double x = f1 > f2 ? x1 : x2;
    double fx = std::max(f1, f2);
    // parabolic refinement through (x-h, x, x+h)
    const double h = std::max(tol, 1e-9);
    const double fm = f(x - h), fp = f(x + h);
    const double denom = fm - 2.0 * fx + fp;
    if (denom < 0.0) {
        const double step = 0.5 * h * (fm - fp) / denom;
        if (std::abs(step) < h) {
            const double xn = x + step;
            const double fn = f(xn);
            if (fn >= fx) {
                x = xn;
                fx = fn;
            }
        }
    }
    return {x, fx, it};
}

} // namespace

ProjectionResult project(const RadialFunction& u, const ProblemParams& p, ManifoldKind kind) {
    (void)kind; // both manifolds share the parameterization
    p.validate();
    if (u.sector() != 0) throw std::domain_error("project: input must be sector 0");
    const double u_norm_sq = gamma_norm_sq(u, p);
    if (!(u_norm_sq > 0.0)) throw std::domain_error("project: ||u||_gamma must be positive");

    InnerEvaluator inner(u, p);
    auto objective = [&](double L) {
        const double c = inner(L);
        return c * c;
    };

    // multi-start over a log-spaced lambda grid
    std::vector<double> seeds(kMultiStarts), vals(kMultiStarts);
    for (int i = 0; i < kMultiStarts; ++i)
        seeds[i] = kLogLambdaMin + (kLogLambdaMax - kLogLambdaMin) * i / (kMultiStarts - 1.0);
    parallel::for_index(static_cast<std::size_t>(kMultiStarts),
                        [&](std::size_t i) { vals[i] = objective(seeds[i]); });

    // refine every local maximum of the coarse scan
    struct Candidate {
        double L, f;
        int iters;
    };
    std::vector<int> basins;
    for (int i = 0; i < kMultiStarts; ++i) {
        const bool upl = i == 0 || vals[i] >= vals[i - 1];
        const bool upr = i == kMultiStarts - 1 || vals[i] >= vals[i + 1];
        if (upl && upr) basins.push_back(i);
    }
    std::vector<Candidate> cands(basins.size());
    parallel::for_index(basins.size(), [&](std::size_t bi) {
        const int i = basins[bi];
        const double a = seeds[std::max(0, i - 1)];
        const double b = seeds[std::min(kMultiStarts - 1, i + 1)];
        GoldenResult g = golden_max(objective, a, b, 1e-11);
        cands[bi] = {g.x, g.f, g.iterations};
    });

    // best objective; ties break to the smallest lambda
    std::size_t best = 0;
    for (std::size_t i = 1; i < cands.size(); ++i) {
        if (cands[i].f > cands[best].f * (1.0 + 1e-12) ||
            (std::abs(cands[i].f - cands[best].f) <= 1e-12 * cands[best].f &&
             cands[i].L < cands[best].L))
            best = i;
    }

    ProjectionResult res;
    const double Lstar = cands[best].L;
    const double cstar = inner(Lstar);
    res.iterations = cands[best].iters;
    res.converged = cands[best].iters < 200 && Lstar > kLogLambdaMin + 1e-9 &&
                    Lstar < kLogLambdaMax - 1e-9;
    res.u_norm = std::sqrt(u_norm_sq);

    Bubble bb{p, std::exp(Lstar), cstar, Normalization::unit_gamma_norm};
    res.best = ManifoldPoint{bb};
    const double dist_sq = std::max(0.0, u_norm_sq - cstar * cstar);
    res.distance = std::sqrt(dist_sq);

    RadialFunction W = bubble_profile(Bubble{p, std::exp(Lstar), 1.0, Normalization::unit_gamma_norm});
    res.rho = RadialFunction::linear_combination(1.0, u, -cstar, W);
    res.rho.set_decay_hints(u.decay_hints());

    // orthogonality residuals, the gradient pair and the weighted pair
    const DerivedConstants d = derive(p);
    RadialFunction V = tangent_generator(Bubble{p, std::exp(Lstar), 1.0, Normalization::unit_gamma_norm});
    res.or1 = inner_gamma(res.rho, W, p);
    res.or2 = inner_gamma(res.rho, V, p);
    const double ts = d.two_star_s;
    QuadratureSpec spec =
        QuadratureSpec::for_decay_rates(d.epsilon, d.epsilon, std::abs(Lstar) + 3.0);
    if (u.kind() == RadialFunction::Kind::sampled && !u.decay_hints()) {
        spec.t_min = std::max(spec.t_min, std::log(u.sample_radii().front()));
        spec.t_max = std::min(spec.t_max, std::log(u.sample_radii().back()));
    }
    auto g3 = [&](double t) {
        const double r = std::exp(t);
        return res.rho.value(r) * std::pow(W.value(r), ts - 1.0) * std::exp((p.N - p.s) * t);
    };
    auto g4 = [&](double t) {
        const double r = std::exp(t);
        return res.rho.value(r) * V.value(r) * std::pow(W.value(r), ts - 2.0) *
               std::exp((p.N - p.s) * t);
    };
    res.or3 = d.sphere_area * integrate_log_checked(g3, spec, {}).value;
    res.or4 = d.sphere_area * integrate_log_checked(g4, spec, {}).value;
    return res;
}

MultiBubbleFit greedy_multibubble_fit(const RadialFunction& u, const ProblemParams& p, int nu) {
    if (nu < 1 || nu > 4) throw std::domain_error("greedy_multibubble_fit: nu must be in [1, 4]");
    MultiBubbleFit fit;
    RadialFunction residual = u;
    for (int round = 0; round < nu; ++round) {
        try {
            ProjectionResult pr = project(residual, p, ManifoldKind::M_tilde);
            fit.bubbles.push_back(pr.best);
            fit.stages.push_back(pr);
            residual = pr.rho;
            fit.residual_norm = pr.distance;
        } catch (const accuracy_error& e) {
            fit.complete = false;
            fit.error = e.what();
            break;
        }
    }

    // Gauss-Seidel polish: re-project each bubble against u minus the others.
    // The greedy pass leaves O(Q^eps) cross-contamination between scales;
    // each sweep shrinks it by another power.
    auto subtract_others = [&](std::size_t skip) {
        RadialFunction r = u;
        for (std::size_t j = 0; j < fit.bubbles.size(); ++j) {
            if (j == skip) continue;
            RadialFunction W = bubble_profile(fit.bubbles[j].bubble);
            r = RadialFunction::linear_combination(1.0, r, -1.0, W);
        }
        r.set_decay_hints(u.decay_hints());
        return r;
    };
    if (nu > 1) {
        for (int sweep = 0; sweep < 2; ++sweep) {
            for (std::size_t i = 0; i < fit.bubbles.size(); ++i) {
                ProjectionResult pr = project(subtract_others(i), p, ManifoldKind::M_tilde);
                fit.bubbles[i] = pr.best;
            }
        }
        RadialFunction final_res = u;
        for (const auto& mp : fit.bubbles) {
            RadialFunction W = bubble_profile(mp.bubble);
            final_res = RadialFunction::linear_combination(1.0, final_res, -1.0, W);
        }
        final_res.set_decay_hints(u.decay_hints());
        fit.residual_norm = std::sqrt(gamma_norm_sq(final_res, p));
    }

    std::sort(fit.bubbles.begin(), fit.bubbles.end(),
              [](const ManifoldPoint& a, const ManifoldPoint& b) {
                  return a.bubble.lambda < b.bubble.lambda;
              });
    return fit;
}

double delta_interaction(std::span<const double> lams) {
    if (lams.size() < 2)
        throw std::domain_error("delta_interaction: need at least two scales");
    for (double l : lams)
        if (!(l > 0.0)) throw std::domain_error("delta_interaction: scales must be positive");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lams.size(); ++i)
        for (std::size_t j = i + 1; j < lams.size(); ++j)
            best = std::min(best, std::min(lams[i] / lams[j], lams[j] / lams[i]));
    return best;
}

} // namespace hslab
