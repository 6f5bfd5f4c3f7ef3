#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hslab/experiments.hpp"
#include "hslab/interaction.hpp"
#include "hslab/parallel.hpp"

#include <string>
#include <vector>

using namespace hslab;

namespace {
const ProblemParams kP{3, 0.1, 0.5};
const ProblemParams kQ{4, 0.5, 1.0};

struct PolicyGuard {
    parallel::Policy saved;
    explicit PolicyGuard(parallel::Policy p) : saved(parallel::default_policy()) {
        parallel::default_policy() = p;
    }
    ~PolicyGuard() { parallel::default_policy() = saved; }
};
} // namespace

TEST_CASE("for_index covers the range exactly once under both policies") {
    for (auto pol : {parallel::Policy::serial, parallel::Policy::openmp}) {
        std::vector<int> hits(1000, 0);
        parallel::for_index(hits.size(), [&](std::size_t i) { hits[i] += 1; }, pol);
        for (int h : hits) CHECK(h == 1);
    }
}

TEST_CASE("interaction scan output is identical across policies") {
    const DerivedConstants d = derive(kP);
    std::string serial_csv, parallel_csv;
    {
        PolicyGuard g(parallel::Policy::serial);
        InteractionScan scan = scan_and_fit(kP, d.two_star_s - 1.0, 1.0, 1e-4, 1e-2, 12);
        serial_csv = scan_csv(scan, "policy test");
    }
    {
        PolicyGuard g(parallel::Policy::openmp);
        InteractionScan scan = scan_and_fit(kP, d.two_star_s - 1.0, 1.0, 1e-4, 1e-2, 12);
        parallel_csv = scan_csv(scan, "policy test");
    }
    CHECK(serial_csv == parallel_csv);
}

TEST_CASE("alpha table rows are identical across policies") {
    std::vector<ProblemParams> grid;
    for (double f : {0.3, 0.6}) grid.push_back(ProblemParams{3, f * 0.25, 0.8});
    std::string a, b;
    {
        PolicyGuard g(parallel::Policy::serial);
        a = alpha_csv(alpha_table(grid), "policy");
    }
    {
        PolicyGuard g(parallel::Policy::openmp);
        b = alpha_csv(alpha_table(grid), "policy");
    }
    CHECK(a == b);
}

TEST_CASE("cfm scan rows are identical across policies and reruns") {
    std::string a, b, c;
    {
        PolicyGuard g(parallel::Policy::serial);
        a = stability_csv(cfm_scan(kQ, 2, {0.02, 0.01}, 77), "policy");
    }
    {
        PolicyGuard g(parallel::Policy::openmp);
        b = stability_csv(cfm_scan(kQ, 2, {0.02, 0.01}, 77), "policy");
        c = stability_csv(cfm_scan(kQ, 2, {0.02, 0.01}, 77), "policy");
    }
    CHECK(a == b);
    CHECK(b == c);
}

TEST_CASE("different seeds produce different scans") {
    PolicyGuard g(parallel::Policy::openmp);
    const std::string a = stability_csv(cfm_scan(kQ, 1, {0.02}, 1), "x");
    const std::string b = stability_csv(cfm_scan(kQ, 1, {0.02}, 2), "x");
    CHECK(a != b);
}
