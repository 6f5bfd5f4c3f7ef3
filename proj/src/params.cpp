#include "hslab/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hslab {

void ProblemParams::validate() const {
    if (N < 3) throw std::domain_error("ProblemParams: N must be >= 3");
    if (!std::isfinite(gamma) || !std::isfinite(s))
        throw std::domain_error("ProblemParams: gamma and s must be finite");
    const double gh = gamma_hardy();
    if (reference_mode) {
        // boundary cases admitted: gamma = 0 with 0 <= s < 2
        if (gamma < 0.0 || gamma >= gh)
            throw std::domain_error("ProblemParams: need 0 <= gamma < gamma_H");
        if (s < 0.0 || s >= 2.0)
            throw std::domain_error("ProblemParams: need 0 <= s < 2");
        if (s == 0.0 && gamma != 0.0)
            throw std::domain_error("ProblemParams: s = 0 is admitted only with gamma = 0");
    } else {
        if (gamma <= 0.0 || gamma >= gh)
            throw std::domain_error("ProblemParams: need 0 < gamma < gamma_H (strict); "
                                    "use reference mode for the boundary cases");
        if (s <= 0.0 || s >= 2.0)
            throw std::domain_error("ProblemParams: need 0 < s < 2 (strict)");
    }
}

std::string ProblemParams::describe() const {
    std::ostringstream os;
    os << "N=" << N << " gamma=" << gamma << " s=" << s;
    if (reference_mode) os << " (reference mode)";
    return os.str();
}

DerivedConstants derive(const ProblemParams& p) {
    p.validate();
    DerivedConstants d;
    const double nm2 = p.N - 2.0;
    d.epsilon = std::sqrt(0.25 * nm2 * nm2 - p.gamma);
    d.beta_minus = 0.5 * nm2 - d.epsilon;
    d.beta_plus = 0.5 * nm2 + d.epsilon;
    d.two_star_s = 2.0 * (p.N - p.s) / nm2;
    d.sphere_area = 2.0 * std::pow(M_PI, 0.5 * p.N) / gamma_fn(0.5 * p.N);
    d.omega_N = 2.0 * std::pow(M_PI, 0.5 * (p.N + 1)) / gamma_fn(0.5 * (p.N + 1));
    return d;
}

double gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma_fn: argument must be positive");
    // Lanczos, g = 7, 9 coefficients
    static const double c[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    if (x < 0.5) {
        // reflection keeps the small-argument range accurate
        return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
    }
    const double z = x - 1.0;
    double a = c[0];
    for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
    const double t = z + 7.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

double best_constant(const ProblemParams& p) {
    p.validate();
    const int N = p.N;
    const double s = p.s;
    const double nm2 = N - 2.0;
    if (p.gamma == 0.0 && s == 0.0) {
        const double omega_N = 2.0 * std::pow(M_PI, 0.5 * (N + 1)) / gamma_fn(0.5 * (N + 1));
        return N * nm2 * std::pow(omega_N, 2.0 / N) / 4.0;
    }
    if (p.gamma == 0.0) {
        // value attained by the explicit gamma = 0 extremal; the bracket is
        // a Beta function B(q, q) with q = (N-s)/(2-s)
        const double q = (N - s) / (2.0 - s);
        const double omega = 2.0 * std::pow(M_PI, 0.5 * N) / gamma_fn(0.5 * N);
        const double bracket = omega / (2.0 - s) * gamma_fn(q) * gamma_fn(q) / gamma_fn(2.0 * q);
        return nm2 * (N - s) * std::pow(bracket, (2.0 - s) / (N - s));
    }
    const double ts = 2.0 * (N - s) / nm2;
    const double ds = std::pow(2.0 * std::pow(M_PI, 0.5 * N) / gamma_fn(0.5 * N), (2.0 - s) / (N - s)) *
                      std::pow(0.5 * ts, 2.0 / ts) *
                      std::pow(gamma_fn((N - s) / (2.0 - s)) * gamma_fn((N + 2.0 - 2.0 * s) / (2.0 - s)) /
                                   gamma_fn(2.0 * (N - s) / (2.0 - s)),
                               (2.0 - s) / (N - s));
    return std::pow(nm2 * nm2 - 4.0 * p.gamma, 1.0 / ts + 0.5) * ds;
}

double el_normalization_constant(const ProblemParams& p) {
    p.validate();
    const DerivedConstants d = derive(p);
    const double eps2 = d.epsilon * d.epsilon;
    return std::pow(4.0 * (p.N - p.s) / (p.N - 2.0) * eps2, 1.0 / (d.two_star_s - 2.0));
}

double angular_eigenvalue(int N, int k) {
    return static_cast<double>(k) * k + (N - 2.0) * k;
}

long long harmonic_multiplicity(int N, int k) {
    auto binom = [](long long n, long long r) -> long long {
        if (r < 0 || r > n) return 0;
        long long v = 1;
        for (long long i = 1; i <= r; ++i) v = v * (n - r + i) / i;
        return v;
    };
    if (k == 0) return 1;
    return binom(N + k - 1, k) - binom(N + k - 3, k - 2);
}

} // namespace hslab
