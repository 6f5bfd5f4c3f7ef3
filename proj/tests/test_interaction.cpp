#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hslab/bubble.hpp"
#include "hslab/functionals.hpp"
#include "hslab/interaction.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace hslab;

namespace {
const ProblemParams kP{3, 0.1, 0.5};
const ProblemParams kQ{4, 0.5, 1.0};
}

TEST_CASE("self-interaction at lambda = 1 is the EL pairing") {
    for (const auto& p : {kP, kQ}) {
        const DerivedConstants d = derive(p);
        const double ts = d.two_star_s;
        const double v = interaction_integral(p, ts - 1.0, 1.0, 1.0);
        CHECK(v == doctest::Approx(oracles::bubble_self_integral(p)).epsilon(1e-9));
        RadialFunction U = bubble_profile(Bubble{p, 1.0, 1.0, Normalization::euler_lagrange});
        CHECK(v == doctest::Approx(gamma_norm_sq(U, p)).epsilon(1e-8));
    }
}

TEST_CASE("exponent symmetry under scale inversion") {
    const DerivedConstants d = derive(kP);
    const double ts = d.two_star_s;
    for (double lam : {1e-1, 1e-2, 1e-3}) {
        const double a = interaction_integral(kP, ts - 1.0, 1.0, lam);
        const double b = interaction_integral(kP, 1.0, ts - 1.0, lam);
        CHECK(a == doctest::Approx(b).epsilon(1e-8));
    }
}

TEST_CASE("ratio law across a decade") {
    const DerivedConstants d = derive(kP);
    const double ts = d.two_star_s;
    const double i2 = interaction_integral(kP, ts - 1.0, 1.0, 1e-2);
    const double i3 = interaction_integral(kP, ts - 1.0, 1.0, 1e-3);
    const double predicted = std::pow(10.0, d.epsilon * 1.0);
    CHECK(i2 / i3 == doctest::Approx(predicted).epsilon(0.03));
}

TEST_CASE("exponent rules are enforced") {
    const DerivedConstants d = derive(kP);
    CHECK_THROWS_AS(interaction_integral(kP, 1.0, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(interaction_integral(kP, d.two_star_s - 1.0, 1.0, 1.5), std::domain_error);
    CHECK_THROWS_AS(interaction_integral(kP, -0.5, d.two_star_s + 0.5, 0.5), std::domain_error);
}

TEST_CASE("two general scales depend only on the ratio Q") {
    const DerivedConstants d = derive(kP);
    const double ts = d.two_star_s;
    const double q = 1e-2;
    double first = 0.0;
    int idx = 0;
    for (double l1 : {0.2, 1.0, 3.0}) {
        const double v = interaction_integral_pair(kP, ts - 1.0, 1.0, l1, l1 * q);
        if (idx++ == 0)
            first = v;
        else
            CHECK(v == doctest::Approx(first).epsilon(1e-8));
    }
}

TEST_CASE("piecewise bubble asymptotics on both sides of the crossover") {
    // U^lam(r) lam^{-(c - beta_-)} r^{beta_-} stays within a fixed ratio
    // band on r < 1/lam, and similarly in the far regime
    for (const auto& p : {kP, kQ}) {
        const DerivedConstants d = derive(p);
        const double c = 0.5 * (p.N - 2.0);
        const double C_bound = 4.0;
        for (double lam : {1e-1, 1e-3, 1e-5}) {
            RadialFunction Ul = bubble_profile(Bubble{p, lam, 1.0, Normalization::euler_lagrange});
            for (double frac : {1e-4, 1e-2, 0.3}) {
                const double r = frac / lam;
                const double ratio = Ul.value(r) * std::pow(lam, -(c - d.beta_minus)) *
                                     std::pow(r, d.beta_minus);
                CHECK(ratio <= C_bound);
                CHECK(ratio >= 1.0 / C_bound);
            }
            for (double mult : {3.0, 100.0}) {
                const double r = mult / lam;
                const double ratio = Ul.value(r) * std::pow(lam, -(c - d.beta_plus)) *
                                     std::pow(r, d.beta_plus);
                CHECK(ratio <= C_bound);
                CHECK(ratio >= 1.0 / C_bound);
            }
        }
    }
}

TEST_CASE("Hoelder upper bound along the grid") {
    const DerivedConstants d = derive(kQ);
    const double ts = d.two_star_s;
    const double theta = ts - 1.0, eta = 1.0;
    const double self = oracles::bubble_self_integral(kQ);
    for (double lam : {1e-1, 1e-3, 1e-5}) {
        const double v = interaction_integral(kQ, theta, eta, lam);
        // int (U^lam)^{2*}/|x|^s is scale invariant, so both Hoelder factors
        // reduce to powers of the self-integral
        const double bound = std::pow(self, theta / ts) * std::pow(self, eta / ts);
        CHECK(v <= bound * (1.0 + 1e-9));
    }
}

TEST_CASE("scan recovers the pure power-law exponent") {
    // the slope settles once lambda^{eps |theta - eta|} is small over the
    // window, so the shallow-gap case is scanned deeper
    struct Case {
        ProblemParams p;
        double lo, hi, tol;
    };
    for (const auto& c : {Case{kP, 1e-5, 1e-2, 0.02}, Case{kQ, 1e-6, 1e-3, 0.03}}) {
        const DerivedConstants d = derive(c.p);
        InteractionScan scan = scan_and_fit(c.p, d.two_star_s - 1.0, 1.0, c.lo, c.hi, 24);
        CHECK(scan.dropped_points == 0);
        CHECK(scan.fitted_exponent == doctest::Approx(scan.predicted_exponent).epsilon(c.tol));
        CHECK(!scan.log_correction_detected);
        CHECK(!scan.near_degenerate);
        // values positive and increasing with lambda (toward weaker separation)
        for (std::size_t i = 1; i < scan.values.size(); ++i) {
            CHECK(scan.values[i] > 0.0);
            CHECK(scan.values[i] > scan.values[i - 1]);
        }
    }
}

TEST_CASE("equal-split scan detects the logarithmic correction") {
    for (const auto& p : {kP, kQ}) {
        const DerivedConstants d = derive(p);
        const double half = 0.5 * d.two_star_s;
        InteractionScan scan = scan_and_fit(p, half, half, 1e-5, 1e-2, 24);
        CHECK(scan.log_correction_detected);
        CHECK(scan.rss_log <= 0.5 * scan.rss_pure);
        // the pinned-slope model uses the predicted exponent
        CHECK(scan.predicted_exponent ==
              doctest::Approx(d.epsilon * (p.N - p.s) / (p.N - 2.0)).epsilon(1e-12));
    }
}

TEST_CASE("near-degenerate exponent splits are flagged") {
    const DerivedConstants d = derive(kQ);
    const double ts = d.two_star_s;
    InteractionScan scan = scan_and_fit(kQ, 0.5 * ts + 0.04, 0.5 * ts - 0.04, 1e-4, 1e-2, 12);
    CHECK(scan.near_degenerate);
}

TEST_CASE("scan csv shape") {
    const DerivedConstants d = derive(kP);
    InteractionScan scan = scan_and_fit(kP, d.two_star_s - 1.0, 1.0, 1e-4, 1e-2, 10);
    const std::string csv = scan_csv(scan, "config line");
    CHECK(csv.rfind("# config line", 0) == 0);
    CHECK(csv.find("lambda,integral,log_lambda,log_integral") != std::string::npos);
    // one row per surviving grid point
    std::size_t rows = 0;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 2 + scan.lambdas.size());
}

TEST_CASE("scan input validation") {
    const DerivedConstants d = derive(kP);
    CHECK_THROWS_AS(scan_and_fit(kP, d.two_star_s - 1.0, 1.0, 1e-2, 1e-4, 24),
                    std::domain_error);
    CHECK_THROWS_AS(scan_and_fit(kP, d.two_star_s - 1.0, 1.0, 1e-4, 1e-2, 4), std::domain_error);
}
