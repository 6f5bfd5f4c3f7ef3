#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hslab/bubble.hpp"
#include "hslab/functionals.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace hslab;

namespace {
const ProblemParams kP{3, 0.1, 0.5};
const ProblemParams kQ{4, 0.5, 1.0};
}

TEST_CASE("bubble value at r = 1") {
    // both power terms are 1, so U(1) = C / 2^{(N-2)/(2-s)}
    for (const auto& p : {kP, kQ}) {
        Bubble b{p, 1.0, 1.0, Normalization::euler_lagrange};
        const double C = el_normalization_constant(p);
        const double expected = C / std::pow(2.0, (p.N - 2.0) / (2.0 - p.s));
        CHECK(eval_bubble(b, 1.0) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("scale action identity") {
    unsigned state = 7;
    for (int i = 0; i < 16; ++i) {
        state = state * 1664525u + 1013904223u;
        const double lam = std::exp(((state >> 8) & 0xFFFF) / 65535.0 * 6.0 - 3.0);
        state = state * 1664525u + 1013904223u;
        const double r = std::exp(((state >> 8) & 0xFFFF) / 65535.0 * 8.0 - 4.0);
        Bubble b1{kP, 1.0, 1.0, Normalization::euler_lagrange};
        Bubble bl{kP, lam, 1.0, Normalization::euler_lagrange};
        const double c = 0.5 * (kP.N - 2.0);
        CHECK(eval_bubble(bl, r) ==
              doctest::Approx(std::pow(lam, c) * eval_bubble(b1, lam * r)).epsilon(1e-13));
    }
}

TEST_CASE("far-field slope equals -beta_plus") {
    const DerivedConstants d = derive(kP);
    RadialFunction u = bubble_profile(Bubble{kP, 1.0, 1.0, Normalization::euler_lagrange});
    // log-log slope fitted on r in [1e4, 1e6]
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = 50;
    for (int i = 0; i < n; ++i) {
        const double t = std::log(1e4) + (std::log(1e6) - std::log(1e4)) * i / (n - 1.0);
        const double y = std::log(u.value(std::exp(t)));
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-d.beta_plus).epsilon(1e-3));
}

TEST_CASE("derivatives of the closed forms match finite differences") {
    RadialFunction u = bubble_profile(Bubble{kQ, 0.7, 1.3, Normalization::unit_gamma_norm});
    RadialFunction v = tangent_generator(Bubble{kQ, 0.7, 1.3, Normalization::unit_gamma_norm});
    for (const RadialFunction* f : {&u, &v}) {
        for (double r : {0.08, 0.9, 3.7, 42.0}) {
            const double h = 1e-6 * r;
            const double fd1 = (f->value(r + h) - f->value(r - h)) / (2 * h);
            CHECK(f->derivative(r) == doctest::Approx(fd1).epsilon(1e-7));
            const double fd2 = (f->value(r + h) - 2 * f->value(r) + f->value(r - h)) / (h * h);
            CHECK(f->second_derivative(r) == doctest::Approx(fd2).epsilon(1e-3));
        }
    }
}

TEST_CASE("EL pairing identity for the EL-normalized bubble") {
    for (double lam : {0.1, 1.0, 10.0}) {
        RadialFunction u = bubble_profile(Bubble{kQ, lam, 1.0, Normalization::euler_lagrange});
        const double g = gamma_norm_sq(u, kQ);
        const double hs = hs_weighted_integral(u, kQ);
        CHECK(g == doctest::Approx(hs).epsilon(1e-8));
    }
}

TEST_CASE("exact self-integral matches quadrature") {
    for (const auto& p : {kP, kQ, ProblemParams{3, 0.225, 1.5}, ProblemParams{6, 3.6, 1.5}}) {
        RadialFunction u = bubble_profile(Bubble{p, 1.0, 1.0, Normalization::euler_lagrange});
        CHECK(hs_weighted_integral(u, p) ==
              doctest::Approx(oracles::bubble_self_integral(p)).epsilon(1e-10));
    }
}

TEST_CASE("unit-norm bubble has gamma-norm one") {
    for (const auto& p : {kP, kQ}) {
        RadialFunction u = bubble_profile(Bubble{p, 1.0, 1.0, Normalization::unit_gamma_norm});
        CHECK(gamma_norm_sq(u, p) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("normalization conversion round-trips") {
    for (const auto& p : {kP, kQ}) {
        const double cel = normalization_constant(p, Normalization::euler_lagrange);
        const double cu = normalization_constant(p, Normalization::unit_gamma_norm);
        const double mu = best_constant(p);
        CHECK(cu * std::pow(mu, (p.N - p.s) / (2.0 * (2.0 - p.s))) ==
              doctest::Approx(cel).epsilon(1e-14));
    }
}

TEST_CASE("EL residual of the exact bubble vanishes (scaled sup over radii)") {
    for (double lam : {0.1, 1.0, 10.0}) {
        Bubble b{kP, lam, 1.0, Normalization::euler_lagrange};
        RadialFunction u = bubble_profile(b);
        RadialFunction res = el_residual(u, kP, 1.0);
        const DerivedConstants d = derive(kP);
        for (int i = 0; i <= 40; ++i) {
            const double r = std::exp(-6.0 + 12.0 * i / 40.0);
            const double scale = std::abs(u.second_derivative(r)) +
                                 std::abs((kP.N - 1.0) * u.derivative(r) / r) +
                                 std::abs(kP.gamma * u.value(r) / (r * r)) +
                                 std::pow(u.value(r), d.two_star_s - 1.0) * std::pow(r, -kP.s);
            CHECK(std::abs(res.value(r)) <= 1e-7 * scale);
        }
    }
}

TEST_CASE("unit-norm bubble solves the mu-weighted equation") {
    const DerivedConstants d = derive(kQ);
    const double mu = best_constant(kQ);
    RadialFunction u = bubble_profile(Bubble{kQ, 1.0, 1.0, Normalization::unit_gamma_norm});
    RadialFunction res = el_residual(u, kQ, std::pow(mu, 0.5 * d.two_star_s));
    for (int i = 0; i <= 30; ++i) {
        const double r = std::exp(-5.0 + 10.0 * i / 30.0);
        const double scale = std::abs(u.second_derivative(r)) + std::abs(u.value(r) / (r * r)) +
                             std::pow(u.value(r), d.two_star_s - 1.0) * std::pow(r, -kQ.s);
        CHECK(std::abs(res.value(r)) <= 1e-7 * scale);
    }
    // with the plain coefficient the residual keeps the predicted closed form
    RadialFunction res1 = el_residual(u, kQ, 1.0);
    const double mu_pow = std::pow(mu, 0.5 * d.two_star_s);
    for (double r : {0.3, 1.0, 2.5}) {
        const double pattern = (1.0 - mu_pow) * std::pow(u.value(r), d.two_star_s - 1.0) *
                               std::pow(r, -kQ.s);
        CHECK(res1.value(r) == doctest::Approx(pattern).epsilon(1e-6));
    }
}

TEST_CASE("finite-difference residual oracle confirms the EL constant") {
    for (const auto& p : {kP, kQ}) {
        RadialFunction u = bubble_profile(Bubble{p, 1.0, 1.0, Normalization::euler_lagrange});
        const DerivedConstants d = derive(p);
        for (double r : {0.2, 0.7, 1.0, 3.0, 9.0}) {
            const double res = oracles::fd_el_residual(u, p, 1.0, r);
            const double scale =
                std::pow(u.value(r), d.two_star_s - 1.0) * std::pow(r, -p.s) +
                std::abs(u.value(r)) / (r * r);
            CHECK(std::abs(res) <= 1e-8 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("tangent generator is gamma-orthogonal to the bubble") {
    for (const auto& p : {kP, kQ}) {
        Bubble b{p, 1.0, 1.0, Normalization::unit_gamma_norm};
        RadialFunction U = bubble_profile(b);
        RadialFunction Z = tangent_generator(b);
        const double ip = inner_gamma(U, Z, p);
        CHECK(std::abs(ip) <= 1e-8 * std::sqrt(gamma_norm_sq(U, p) * gamma_norm_sq(Z, p)));
    }
}

TEST_CASE("tangent generator solves the linearized equation") {
    // -Delta Z - gamma Z/r^2 - (2*-1) U^{2*-2}/r^s Z = 0 (EL normalization)
    const DerivedConstants d = derive(kP);
    Bubble b{kP, 1.0, 1.0, Normalization::euler_lagrange};
    RadialFunction U = bubble_profile(b);
    RadialFunction Z = tangent_generator(b);
    for (int i = 0; i <= 30; ++i) {
        const double r = std::exp(-4.0 + 8.0 * i / 30.0);
        const double lhs = -Z.second_derivative(r) - (kP.N - 1.0) * Z.derivative(r) / r -
                           kP.gamma * Z.value(r) / (r * r);
        const double rhs = (d.two_star_s - 1.0) *
                           std::pow(U.value(r), d.two_star_s - 2.0) * std::pow(r, -kP.s) *
                           Z.value(r);
        const double scale = std::abs(Z.second_derivative(r)) + std::abs(rhs) +
                             std::abs(Z.value(r) / (r * r));
        CHECK(std::abs(lhs - rhs) <= 1e-7 * scale);
    }
}

TEST_CASE("tangent at lambda via the scaling operator") {
    // d/dlam U^lam at lam0 = (1/lam0) T_{1/lam0}(Z), with Z the tangent at 1
    const double lam0 = 0.6;
    Bubble b1{kP, 1.0, 1.0, Normalization::euler_lagrange};
    Bubble bl{kP, lam0, 1.0, Normalization::euler_lagrange};
    RadialFunction Z = tangent_generator(b1);
    RadialFunction V = tangent_generator(bl);
    RadialFunction TZ = apply_T(1.0 / lam0, Z, kP);
    for (double r : {0.1, 0.9, 3.0, 20.0}) {
        CHECK(V.value(r) == doctest::Approx(TZ.value(r) / lam0).epsilon(1e-12));
    }
    // finite-difference cross-check of the lambda derivative
    const double h = 1e-6;
    for (double r : {0.5, 2.0}) {
        Bubble bp{kP, lam0 + h, 1.0, Normalization::euler_lagrange};
        Bubble bm{kP, lam0 - h, 1.0, Normalization::euler_lagrange};
        const double fd = (eval_bubble(bp, r) - eval_bubble(bm, r)) / (2 * h);
        CHECK(V.value(r) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("T_lambda invariances") {
    RadialFunction u = bubble_profile(Bubble{kQ, 1.0, 1.0, Normalization::euler_lagrange});
    const double g0 = gamma_norm_sq(u, kQ);
    const double h0 = hs_weighted_integral(u, kQ);
    unsigned state = 31;
    for (int i = 0; i < 6; ++i) {
        state = state * 1664525u + 1013904223u;
        const double lam = std::exp(((state >> 8) & 0xFFFF) / 65535.0 * 4.0 - 2.0);
        RadialFunction tu = apply_T(lam, u, kQ);
        CHECK(gamma_norm_sq(tu, kQ) == doctest::Approx(g0).epsilon(1e-9));
        CHECK(hs_weighted_integral(tu, kQ) == doctest::Approx(h0).epsilon(1e-9));
    }
    // T_1 is the identity
    RadialFunction t1 = apply_T(1.0, u, kQ);
    for (double r : {0.2, 1.0, 7.0}) CHECK(t1.value(r) == u.value(r));
}

TEST_CASE("T_lambda reaches the scaled bubble") {
    // U^lam = T_{1/lam}(U)
    const double lam = 3.7;
    RadialFunction U = bubble_profile(Bubble{kP, 1.0, 1.0, Normalization::euler_lagrange});
    RadialFunction Ul = bubble_profile(Bubble{kP, lam, 1.0, Normalization::euler_lagrange});
    RadialFunction TU = apply_T(1.0 / lam, U, kP);
    for (double r : {0.05, 0.4, 1.0, 11.0}) {
        CHECK(Ul.value(r) == doctest::Approx(TU.value(r)).epsilon(1e-13));
    }
}

TEST_CASE("T_lambda on sampled profiles shifts the grid exactly") {
    RadialFunction U = bubble_profile(Bubble{kP, 1.0, 1.0, Normalization::euler_lagrange});
    RadialFunction s = resample(U, log_grid(1e-3, 1e3, 128));
    const double lam = 2.5;
    RadialFunction ts = apply_T(lam, s, kP);
    const double c = 0.5 * (kP.N - 2.0);
    REQUIRE(ts.kind() == RadialFunction::Kind::sampled);
    for (std::size_t i = 0; i < s.sample_radii().size(); i += 13) {
        CHECK(ts.sample_radii()[i] == s.sample_radii()[i] * lam);
        CHECK(ts.sample_values()[i] ==
              doctest::Approx(std::pow(lam, -c) * s.sample_values()[i]).epsilon(1e-15));
    }
    // norm invariance survives the grid shift
    CHECK(gamma_norm_sq(ts, kP) == doctest::Approx(gamma_norm_sq(s, kP)).epsilon(2e-5));
}
