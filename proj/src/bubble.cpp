#include "hslab/bubble.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hslab {

namespace {

// Shape data for stable evaluation of U(r) = C (r^a + r^b)^{-m} in log space.
struct Shape {
    double a, b, m, C, c; // c = (N-2)/2
};

Shape shape_for(const ProblemParams& p, Normalization norm) {
    const DerivedConstants d = derive(p);
    Shape s;
    s.a = d.beta_minus * (2.0 - p.s) / (p.N - 2.0);
    s.b = d.beta_plus * (2.0 - p.s) / (p.N - 2.0);
    s.m = (p.N - 2.0) / (2.0 - p.s);
    s.C = normalization_constant(p, norm);
    s.c = 0.5 * (p.N - 2.0);
    return s;
}

// log of (e^{a t} + e^{b t}) without overflow
double log_sum(double a, double b, double t) {
    const double hi = std::max(a * t, b * t), lo = std::min(a * t, b * t);
    return hi + std::log1p(std::exp(lo - hi));
}

double log_profile(const Shape& s, double t) { return std::log(s.C) - s.m * log_sum(s.a, s.b, t); }

// d log U / dt = -m (a + (b-a) p) with p the logistic weight of the r^b branch
double dlog_profile(const Shape& s, double t) {
    const double p = 1.0 / (1.0 + std::exp(-(s.b - s.a) * t));
    return -s.m * (s.a + (s.b - s.a) * p);
}

double d2log_profile(const Shape& s, double t) {
    const double p = 1.0 / (1.0 + std::exp(-(s.b - s.a) * t));
    return -s.m * (s.b - s.a) * (s.b - s.a) * p * (1.0 - p);
}

} // namespace

void Bubble::validate() const {
    params.validate();
    if (!(lambda > 0.0)) throw std::domain_error("Bubble: lambda must be positive");
    if (coeff == 0.0) throw std::domain_error("Bubble: coefficient must be nonzero");
}

double normalization_constant(const ProblemParams& p, Normalization norm) {
    const double cel = el_normalization_constant(p);
    if (norm == Normalization::euler_lagrange) return cel;
    const double mu = best_constant(p);
    return cel * std::pow(mu, -(p.N - p.s) / (2.0 * (2.0 - p.s)));
}

double eval_bubble(const Bubble& b, double r) {
    if (!(r > 0.0)) throw std::domain_error("eval_bubble: r must be positive");
    const Shape s = shape_for(b.params, b.normalization);
    const double t = std::log(r) + std::log(b.lambda);
    return b.coeff * std::pow(b.lambda, s.c) * std::exp(log_profile(s, t));
}

RadialFunction bubble_profile(const Bubble& b) {
    b.validate();
    const Shape s = shape_for(b.params, b.normalization);
    const double lam = b.lambda, pref = b.coeff * std::pow(lam, s.c);
    const double llam = std::log(lam);
    auto val = [s, pref, llam](double r) { return pref * std::exp(log_profile(s, std::log(r) + llam)); };
    auto der = [s, pref, llam](double r) {
        const double t = std::log(r) + llam;
        return pref * std::exp(log_profile(s, t)) * dlog_profile(s, t) / r;
    };
    auto der2 = [s, pref, llam](double r) {
        const double t = std::log(r) + llam;
        const double q = dlog_profile(s, t);
        return pref * std::exp(log_profile(s, t)) * (q * q + d2log_profile(s, t) - q) / (r * r);
    };
    const DerivedConstants d = derive(b.params);
    return RadialFunction::closed_form(0, val, der, der2,
                                       DecayHints{-d.beta_minus, -d.beta_plus});
}

RadialFunction tangent_generator(const Bubble& b) {
    b.validate();
    const Shape s = shape_for(b.params, b.normalization);
    const double lam = b.lambda, co = b.coeff;
    const double llam = std::log(lam);
    // d/dlam [lam^c U(lam r)] = lam^{c-1} (c + dlogU(t)) U(lam r), t = log(lam r)
    auto factor = [s](double t) { return s.c + dlog_profile(s, t); };
    auto val = [s, lam, co, llam, factor](double r) {
        const double t = std::log(r) + llam;
        return co * std::pow(lam, s.c - 1.0) * factor(t) * std::exp(log_profile(s, t));
    };
    auto der = [s, lam, co, llam, factor](double r) {
        const double t = std::log(r) + llam;
        const double U = std::exp(log_profile(s, t));
        const double dU = U * dlog_profile(s, t); // d/dt
        const double dfac = d2log_profile(s, t);
        return co * std::pow(lam, s.c - 1.0) * (dfac * U + factor(t) * dU) / r;
    };
    auto der2 = [s, lam, co, llam, factor](double r) {
        const double t = std::log(r) + llam;
        const double U = std::exp(log_profile(s, t));
        const double q = dlog_profile(s, t);
        const double q2 = d2log_profile(s, t);
        // third log-derivative of the profile
        const double p = 1.0 / (1.0 + std::exp(-(s.b - s.a) * t));
        const double q3 = -s.m * std::pow(s.b - s.a, 3) * p * (1.0 - p) * (1.0 - 2.0 * p);
        const double g = factor(t);
        // f = g U; f_tt = (q3 + 2 q2 q + g (q^2 + q2)) U
        const double ftt = (q3 + 2.0 * q2 * q + g * (q * q + q2)) * U;
        const double ft = (q2 + g * q) * U;
        return co * std::pow(lam, s.c - 1.0) * (ftt - ft) / (r * r);
    };
    const DerivedConstants d = derive(b.params);
    // same power laws as the bubble at both ends
    return RadialFunction::closed_form(0, val, der, der2,
                                       DecayHints{-d.beta_minus, -d.beta_plus});
}

RadialFunction apply_T(double lambda, const RadialFunction& f, const ProblemParams& p) {
    if (!(lambda > 0.0)) throw std::domain_error("apply_T: lambda must be positive");
    const double c = 0.5 * (p.N - 2.0);
    const double pref = std::pow(lambda, -c);
    if (f.kind() == RadialFunction::Kind::sampled) {
        std::vector<double> radii = f.sample_radii();
        std::vector<double> values = f.sample_values();
        for (auto& r : radii) r *= lambda;
        for (auto& v : values) v *= pref;
        return RadialFunction::sampled(f.sector(), std::move(radii), std::move(values),
                                       f.decay_hints());
    }
    auto g = f;
    auto val = [g, lambda, pref](double r) { return pref * g.value(r / lambda); };
    std::function<double(double)> d1, d2;
    if (f.has_analytic_derivatives()) {
        d1 = [g, lambda, pref](double r) { return pref / lambda * g.derivative(r / lambda); };
        d2 = [g, lambda, pref](double r) {
            return pref / (lambda * lambda) * g.second_derivative(r / lambda);
        };
    }
    return RadialFunction::closed_form(f.sector(), val, d1, d2, f.decay_hints());
}

void write_bubble_csv_file(const std::string& path, const Bubble& b,
                           const std::vector<double>& grid) {
    b.validate();
    RadialFunction f = resample(bubble_profile(b), grid);
    std::ostringstream os;
    os << "bubble N=" << b.params.N << " gamma=" << b.params.gamma << " s=" << b.params.s
       << " lambda=" << b.lambda << " coeff=" << b.coeff
       << " norm=" << (b.normalization == Normalization::euler_lagrange ? "el" : "unit");
    write_radial_csv_file(path, f, {os.str()});
}

} // namespace hslab
