#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pbn/sim.hpp"

using namespace pbn;

namespace {

constexpr std::size_t kPaths = 20000;

TimeGrid half_steps() { return TimeGrid::uniform(1.0, 2); }  // {0, 0.5, 1}

}  // namespace

TEST_CASE("time grid validates and locates times") {
    CHECK_THROWS_WITH_AS(TimeGrid({0.5, 1.0}), doctest::Contains("BadGrid"), Error);
    CHECK_THROWS_WITH_AS(TimeGrid({0.0, 1.0, 1.0}), doctest::Contains("BadGrid"), Error);
    CHECK_THROWS_WITH_AS(TimeGrid(std::vector<double>{}), doctest::Contains("BadGrid"), Error);
    CHECK_THROWS_WITH_AS(TimeGrid::uniform(0.0, 4), doctest::Contains("BadGrid"), Error);

    const TimeGrid grid = TimeGrid::uniform(2.0, 4);
    CHECK(grid.size() == 5);
    CHECK(grid.at(0) == 0.0);
    CHECK(grid.at(4) == 2.0);
    CHECK(grid.index_of(1.5) == 3);
    CHECK(grid.index_of(1.5 + 1e-13) == 3);
    CHECK_THROWS_WITH_AS(grid.index_of(0.3), doctest::Contains("TimesNotOnGrid"), Error);
}

TEST_CASE("counting paths are integer, nondecreasing, zero-started") {
    const PathEnsemble ensemble = sample_poisson(2.0, half_steps(), 500, 7);
    CHECK(ensemble.n_paths() == 500);
    for (std::size_t i = 0; i < ensemble.n_paths(); ++i) {
        const auto& path = ensemble.path(i);
        CHECK(path[0] == 0.0);
        for (std::size_t j = 0; j < path.size(); ++j) {
            CHECK(path[j] == std::floor(path[j]));
            if (j > 0) CHECK(path[j] >= path[j - 1]);
        }
    }
    CHECK_THROWS_WITH_AS(sample_poisson(0.0, half_steps(), 10, 1), doctest::Contains("BadRate"),
                         Error);
}

TEST_CASE("identical seeds reproduce ensembles bit for bit") {
    const PathEnsemble a = sample_poisson(2.0, half_steps(), 300, 42);
    const PathEnsemble b = sample_poisson(2.0, half_steps(), 300, 42);
    for (std::size_t i = 0; i < 300; ++i) CHECK(a.path(i) == b.path(i));

    // Path i depends only on (seed, i, interval): widening the ensemble
    // cannot disturb earlier paths, which is what makes parallel generation
    // order-independent.
    const PathEnsemble wide = sample_poisson(2.0, half_steps(), 600, 42);
    for (std::size_t i = 0; i < 300; ++i) CHECK(a.path(i) == wide.path(i));

    const PathEnsemble c = sample_poisson(2.0, half_steps(), 300, 43);
    bool any_difference = false;
    for (std::size_t i = 0; i < 300 && !any_difference; ++i) {
        any_difference = a.path(i) != c.path(i);
    }
    CHECK(any_difference);

    const PathEnsemble w1 = sample_brownian(0.0, 1.0, half_steps(), 300, 42);
    const PathEnsemble w2 = sample_brownian(0.0, 1.0, half_steps(), 300, 42);
    for (std::size_t i = 0; i < 300; ++i) CHECK(w1.path(i) == w2.path(i));
}

TEST_CASE("sampled moments track the analytic laws") {
    SUBCASE("counting process, rate 2 at t = 1") {
        const PathEnsemble ensemble = sample_poisson(2.0, half_steps(), kPaths, 42);
        const CheckReport report = moment_checks(ensemble, 1.0);
        REQUIRE(report.rows.size() == 2);
        CHECK(report.all_pass());
    }

    SUBCASE("drifting diffusion, mean mu t at t = 2") {
        const PathEnsemble ensemble =
            sample_brownian(0.5, 1.0, TimeGrid::uniform(2.0, 4), kPaths, 42);
        const CheckReport report = moment_checks(ensemble, 2.0);
        CHECK(report.all_pass());
        CHECK(report.rows[0].rhs == 1.0);  // mu t
    }

    SUBCASE("driftless diffusion has variance t") {
        const PathEnsemble ensemble =
            sample_brownian(0.0, 1.0, half_steps(), kPaths, 42);
        const CheckReport report = moment_checks(ensemble, 1.0);
        CHECK(report.all_pass());
        CHECK(report.rows[1].rhs == 1.0);  // sigma^2 t
    }

    CHECK_THROWS_WITH_AS(sample_brownian(0.5, 0.0, half_steps(), 10, 1),
                         doctest::Contains("BadVolatility"), Error);
}

TEST_CASE("mean compensation subtracts the analytic growth") {
    SUBCASE("counting process minus lambda t") {
        const PathEnsemble raw = sample_poisson(2.0, half_steps(), 200, 5);
        const PathEnsemble centered = compensate(raw);
        CHECK(centered.descriptor().kind == ProcessKind::CompensatedPoisson);
        for (std::size_t i = 0; i < raw.n_paths(); ++i) {
            for (std::size_t j = 0; j < raw.grid().size(); ++j) {
                CHECK(centered.value(i, j) == raw.value(i, j) - 2.0 * raw.grid().at(j));
            }
        }
    }

    SUBCASE("driftless diffusion is untouched") {
        const PathEnsemble raw = sample_brownian(0.0, 1.0, half_steps(), 200, 5);
        const PathEnsemble centered = compensate(raw);
        for (std::size_t i = 0; i < raw.n_paths(); ++i) CHECK(centered.path(i) == raw.path(i));
    }

    SUBCASE("already-centered input is rejected") {
        const PathEnsemble raw = sample_poisson(2.0, half_steps(), 200, 5);
        CHECK_THROWS_WITH_AS(compensate(compensate(raw)),
                             doctest::Contains("UnknownMeanFunction"), Error);
    }
}

TEST_CASE("quadratic construction is Z squared minus variance growth") {
    const PathEnsemble raw = sample_brownian(0.5, 1.0, half_steps(), 200, 9);
    const PathEnsemble centered = compensate(raw);
    const PathEnsemble quad = quadratic_martingale(centered, 1.0);
    CHECK(quad.descriptor().kind == ProcessKind::QuadraticBrownian);
    for (std::size_t i = 0; i < quad.n_paths(); ++i) {
        CHECK(quad.value(i, 0) == 0.0);
        for (std::size_t j = 0; j < quad.grid().size(); ++j) {
            const double z = centered.value(i, j);
            CHECK(quad.value(i, j) == z * z - quad.grid().at(j));
        }
    }
    CHECK_THROWS_WITH_AS(quadratic_martingale(raw, 1.0),
                         doctest::Contains("NotCompensatedBrownian"), Error);
}

TEST_CASE("statistical verifier accepts centered processes and flags drift") {
    SUBCASE("compensated counting process passes at 4 sigma") {
        const PathEnsemble centered = compensate(sample_poisson(2.0, half_steps(), kPaths, 42));
        const StatReport report = verify_martingale_statistical(centered, 0.5, 1.0);
        CHECK(report.pass);
        CHECK(report.bins.size() >= 2);
        for (const auto& bin : report.bins) CHECK(bin.count >= 30);
        CHECK(std::abs(report.drift) <= 4.0 * report.drift_stderr);
        CHECK(report.rows.all_pass());
    }

    SUBCASE("raw counting process fails with drift near lambda (t - s)") {
        const PathEnsemble raw = sample_poisson(2.0, half_steps(), kPaths, 42);
        const StatReport report = verify_martingale_statistical(raw, 0.5, 1.0);
        CHECK(!report.pass);
        CHECK(std::abs(report.drift - 1.0) < 0.05);
        CHECK(report.max_sigmas > 4.0);
    }

    SUBCASE("centered diffusion and its quadratic companion pass") {
        const PathEnsemble centered =
            compensate(sample_brownian(0.5, 1.0, half_steps(), kPaths, 42));
        CHECK(verify_martingale_statistical(centered, 0.5, 1.0).pass);

        const PathEnsemble quad = quadratic_martingale(centered, 1.0);
        CHECK(verify_martingale_statistical(quad, 0.5, 1.0).pass);
    }

    SUBCASE("preconditions") {
        const PathEnsemble small = compensate(sample_poisson(2.0, half_steps(), 100, 1));
        CHECK_THROWS_WITH_AS(verify_martingale_statistical(small, 0.5, 1.0),
                             doctest::Contains("TooFewPaths"), Error);
        const PathEnsemble ok = compensate(sample_poisson(2.0, half_steps(), 1000, 1));
        CHECK_THROWS_WITH_AS(verify_martingale_statistical(ok, 0.3, 1.0),
                             doctest::Contains("TimesNotOnGrid"), Error);
        CHECK_THROWS_WITH_AS(verify_martingale_statistical(ok, 0.5, 0.5),
                             doctest::Contains("BadGrid"), Error);
        CHECK_THROWS_WITH_AS(verify_martingale_statistical(ok, 0.5, 1.0, 0),
                             doctest::Contains("DegenerateBin"), Error);
    }
}

TEST_CASE("independence check passes construction and catches coupling") {
    const PathEnsemble wiener = sample_brownian(0.0, 1.0, half_steps(), kPaths, 11);

    SUBCASE("independent increments by construction") {
        const IncrementsReport report = independent_increments_check(wiener, 0.5, 1.0);
        CHECK(report.corr_pass);
        CHECK(report.homogeneity_pass);
        CHECK(report.pass);
    }

    SUBCASE("counting increments are homogeneous") {
        const PathEnsemble poisson = sample_poisson(2.0, half_steps(), kPaths, 42);
        const IncrementsReport report = independent_increments_check(poisson, 0.5, 1.0);
        CHECK(report.pass);
    }

    SUBCASE("coupling the endpoint to the midpoint fails") {
        std::vector<std::vector<double>> coupled(wiener.n_paths());
        for (std::size_t i = 0; i < wiener.n_paths(); ++i) {
            coupled[i] = wiener.path(i);
            coupled[i][2] += 0.5 * coupled[i][1];
        }
        const PathEnsemble tampered(wiener.grid(), std::move(coupled), wiener.seed(),
                                    wiener.descriptor());
        const IncrementsReport report = independent_increments_check(tampered, 0.5, 1.0);
        CHECK(!report.corr_pass);
        CHECK(!report.pass);
        // Induced correlation 0.5 Var(X_s) / normalizer is about 0.45 here.
        CHECK(report.correlation > 0.4);
    }

    SUBCASE("preconditions") {
        CHECK_THROWS_WITH_AS(independent_increments_check(wiener, 0.0, 1.0),
                             doctest::Contains("BadGrid"), Error);
        const PathEnsemble uneven =
            sample_brownian(0.0, 1.0, TimeGrid({0.0, 0.3, 1.0}), 1000, 3);
        CHECK_THROWS_WITH_AS(independent_increments_check(uneven, 0.3, 1.0),
                             doctest::Contains("TimesNotOnGrid"), Error);
    }
}

TEST_CASE("process parameters carry consistent dimensions") {
    ProcessDescriptor poisson;
    poisson.kind = ProcessKind::Poisson;
    poisson.lambda = 2.0;
    const CheckReport rate_report = process_dim_checks(poisson);
    CHECK(rate_report.rows.size() == 2);
    CHECK(rate_report.all_pass());

    ProcessDescriptor brownian;
    brownian.kind = ProcessKind::Brownian;
    brownian.mu = 0.5;
    brownian.sigma = 1.0;
    const CheckReport diffusion_report = process_dim_checks(brownian);
    CHECK(diffusion_report.rows.size() == 4);
    CHECK(diffusion_report.all_pass());
}
