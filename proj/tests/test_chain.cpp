#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "pbn/chain.hpp"
#include "pbn/corpus.hpp"

using namespace pbn;

namespace {

// Two-state chain with known powers: P^2 = [[0.83, 0.17], [0.34, 0.66]].
MarkovChain weather_chain() {
    return MarkovChain({"sunny", "rainy"}, {{0.9, 0.1}, {0.2, 0.8}}, {0.5, 0.5}, {{1.0, -1.0}});
}

// Absorbing boundary walk on {0,...,4}, fair steps inside, started at 2.
MarkovChain ruin_chain() {
    Matrix p{{1.0, 0.0, 0.0, 0.0, 0.0},
             {0.5, 0.0, 0.5, 0.0, 0.0},
             {0.0, 0.5, 0.0, 0.5, 0.0},
             {0.0, 0.0, 0.5, 0.0, 0.5},
             {0.0, 0.0, 0.0, 0.0, 1.0}};
    return MarkovChain({"0", "1", "2", "3", "4"}, std::move(p), {0.0, 0.0, 1.0, 0.0, 0.0},
                       {{0.0, 1.0, 2.0, 3.0, 4.0}});
}

MarkovChain random_chain(corpus::Rng& rng, std::size_t n) {
    std::vector<std::string> states;
    for (std::size_t i = 0; i < n; ++i) states.push_back("s" + std::to_string(i));
    Matrix p(n, std::vector<double>(n));
    for (auto& row : p) {
        double total = 0.0;
        for (double& x : row) {
            x = 0.1 + rng.next_double();
            total += x;
        }
        for (double& x : row) x /= total;
    }
    std::vector<double> initial(n);
    double total = 0.0;
    for (double& x : initial) {
        x = 0.1 + rng.next_double();
        total += x;
    }
    for (double& x : initial) x /= total;
    return MarkovChain(std::move(states), std::move(p), std::move(initial));
}

}  // namespace

TEST_CASE("chain construction rejects malformed input") {
    CHECK_THROWS_WITH_AS(MarkovChain({"a", "b"}, {{0.5, 0.4}, {0.2, 0.8}}, {1.0, 0.0}),
                         doctest::Contains("RowNotStochastic"), Error);
    CHECK_THROWS_WITH_AS(MarkovChain({"a", "b"}, {{1.2, -0.2}, {0.2, 0.8}}, {1.0, 0.0}),
                         doctest::Contains("RowNotStochastic"), Error);
    CHECK_THROWS_WITH_AS(MarkovChain({"a", "b"}, {{1.0, 0.0}, {0.2, 0.8}}, {0.7, 0.7}),
                         doctest::Contains("NotNormalized"), Error);
    CHECK_THROWS_WITH_AS(MarkovChain({"a", "b"}, {{1.0}}, {1.0, 0.0}),
                         doctest::Contains("LengthMismatch"), Error);
    CHECK_THROWS_WITH_AS(
        MarkovChain({"a", "b"}, {{1.0, 0.0}, {0.0, 1.0}}, {1.0, 0.0}, {{1.0, 2.0, 3.0}}),
        doctest::Contains("LengthMismatch"), Error);

    const MarkovChain bare({"a"}, {{1.0}}, {1.0});
    CHECK_THROWS_WITH_AS(bare.value_of(0), doctest::Contains("BadProcess"), Error);
}

TEST_CASE("matrix powers match the hand-computed two-step matrix") {
    const MarkovChain chain = weather_chain();
    const Matrix p2 = mat_pow_squaring(chain.p(), 2);
    CHECK(p2[0][0] == doctest::Approx(0.83).epsilon(1e-14));
    CHECK(p2[0][1] == doctest::Approx(0.17).epsilon(1e-14));
    CHECK(p2[1][0] == doctest::Approx(0.34).epsilon(1e-14));
    CHECK(p2[1][1] == doctest::Approx(0.66).epsilon(1e-14));

    const Matrix p0 = mat_pow_naive(chain.p(), 0);
    CHECK(p0 == mat_identity(2));
}

TEST_CASE("two-step composition agrees between both power routes") {
    CHECK(chapman_kolmogorov_check(weather_chain(), 1, 1) <= 1e-12);

    corpus::Rng rng(7);
    const MarkovChain big = random_chain(rng, 6);
    CHECK(chapman_kolmogorov_check(big, 2, 3) <= 1e-12);
    CHECK(chapman_kolmogorov_check(big, 0, 4) <= 1e-12);

    const MarkovChain frozen({"a", "b"}, {{1.0, 0.0}, {0.0, 1.0}}, {1.0, 0.0});
    CHECK(chapman_kolmogorov_check(frozen, 3, 5) == 0.0);
}

TEST_CASE("eigenpair residual is zero for the known pair and large otherwise") {
    const MarkovChain chain = weather_chain();
    CHECK(verify_eigenpair(chain, 0.7, {1.0, -2.0}) <= 1e-15);
    CHECK(verify_eigenpair(chain, 1.0, {1.0, 1.0}) <= 1e-15);
    // Same vector against the wrong eigenvalue: residual (0.7-0.5)*2/2 = 0.2.
    CHECK(verify_eigenpair(chain, 0.5, {1.0, -2.0}) == doctest::Approx(0.2).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(verify_eigenpair(chain, 1.0, {0.0, 0.0}),
                         doctest::Contains("ZeroVector"), Error);
    CHECK_THROWS_WITH_AS(verify_eigenpair(chain, 1.0, {1.0}),
                         doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("harmonic solver finds the fixed-vector space") {
    SUBCASE("irreducible two-state chain has only constants") {
        const auto basis = solve_harmonic(weather_chain());
        REQUIRE(basis.size() == 1);
        CHECK(basis[0][0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(basis[0][1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(verify_eigenpair(weather_chain(), 1.0, basis[0]) <= 1e-12);
    }

    SUBCASE("absorbing boundary walk has a two-dimensional space") {
        const MarkovChain chain = ruin_chain();
        const auto basis = solve_harmonic(chain);
        REQUIRE(basis.size() == 2);
        for (const auto& v : basis) {
            CHECK(verify_eigenpair(chain, 1.0, v) <= 1e-12);
            double norm = 0.0;
            for (double x : v) norm = std::max(norm, std::abs(x));
            CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));
            for (double x : v) {
                if (std::abs(x) > 1e-12) {
                    CHECK(x > 0.0);
                    break;
                }
            }
        }

        // phi(i) = i/4 is harmonic and lies in the basis span; solve for the
        // coefficients from the absorbing endpoints.
        const std::vector<double> ramp{0.0, 0.25, 0.5, 0.75, 1.0};
        CHECK(verify_eigenpair(chain, 1.0, ramp) <= 1e-15);
        const auto& v = basis[0];
        const auto& w = basis[1];
        const double det = v[0] * w[4] - w[0] * v[4];
        REQUIRE(std::abs(det) > 1e-12);
        const double alpha = (ramp[0] * w[4] - w[0] * ramp[4]) / det;
        const double beta = (v[0] * ramp[4] - ramp[0] * v[4]) / det;
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(alpha * v[i] + beta * w[i] == doctest::Approx(ramp[i]).epsilon(1e-12));
        }
    }

    SUBCASE("constants are harmonic for every chain") {
        corpus::Rng rng(11);
        for (int rep = 0; rep < 10; ++rep) {
            const MarkovChain chain = random_chain(rng, 2 + rng.next_below(5));
            const std::vector<double> ones(chain.size(), 1.0);
            CHECK(verify_eigenpair(chain, 1.0, ones) <= 1e-14);
            const auto basis = solve_harmonic(chain);
            REQUIRE(!basis.empty());
            for (const auto& v : basis) CHECK(verify_eigenpair(chain, 1.0, v) <= 1e-10);
        }
    }
}

TEST_CASE("iid increment chain carries one draw per step") {
    const MarkovChain chain = iid_increment_chain({1.0, -1.0}, {0.5, 0.5});
    REQUIRE(chain.size() == 3);
    CHECK(chain.states()[0] == "start");
    CHECK(chain.value_of(0) == 0.0);
    CHECK(chain.value_of(1) == 1.0);
    CHECK(chain.value_of(2) == -1.0);
    CHECK(chain.initial() == std::vector<double>{1.0, 0.0, 0.0});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(chain.row(i) == std::vector<double>{0.0, 0.5, 0.5});
    }
    CHECK_THROWS_WITH_AS(iid_increment_chain({1.0}, {0.5, 0.5}),
                         doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("path tree enumerates positive-probability prefixes") {
    const PathTree tree(weather_chain(), 10);
    CHECK(tree.horizon() == 10);
    CHECK(tree.levels()[0].size() == 2);
    CHECK(tree.levels()[10].size() == 2048);
    for (std::size_t depth = 0; depth <= 10; ++depth) {
        CHECK(std::abs(tree.depth_mass(depth) - 1.0) <= 1e-12);
    }

    const auto prefix = tree.prefix_of(3, 5);
    REQUIRE(prefix.size() == 4);
    CHECK(prefix.back() == tree.levels()[3][5].state);
    // Every consecutive pair must be a positive-probability transition.
    const MarkovChain chain = weather_chain();
    for (std::size_t k = 1; k < prefix.size(); ++k) {
        CHECK(chain.row(prefix[k - 1])[prefix[k]] > 0.0);
    }

    CHECK_THROWS_WITH_AS(PathTree(weather_chain(), 10, 100), doctest::Contains("TreeTooLarge"),
                         Error);
}

TEST_CASE("fair random walk verifies as a martingale") {
    const auto walk = make_random_walk({1.0, -1.0}, {0.5, 0.5});
    const auto report = verify_martingale_exact(*walk, 6);
    CHECK(report.classification == MgClass::Martingale);
    CHECK(report.max_abs_gap == 0.0);  // dyadic arithmetic is exact here
    CHECK(report.prefixes_checked == 63);
    CHECK(report.depth_mass_gap <= 1e-12);
    CHECK(report.mean_gap == 0.0);
    CHECK(report.rows.all_pass());

    // Horizon 0 has no one-step checks and trivially verifies.
    const auto trivial = verify_martingale_exact(*walk, 0);
    CHECK(trivial.prefixes_checked == 0);
    CHECK(trivial.classification == MgClass::Martingale);
}

TEST_CASE("drifted walks classify by the sign of the one-step gap") {
    CHECK_THROWS_WITH_AS(make_random_walk({1.1, -0.9}, {0.5, 0.5}),
                         doctest::Contains("NonZeroMeanIncrement"), Error);

    const auto up = make_random_walk({1.1, -0.9}, {0.5, 0.5}, /*force=*/true);
    const auto up_report = verify_martingale_exact(*up, 6);
    CHECK(up_report.classification == MgClass::Submartingale);
    CHECK(std::abs(up_report.min_gap - 0.1) <= 1e-12);
    CHECK(std::abs(up_report.max_gap - 0.1) <= 1e-12);

    const auto down = make_random_walk({0.9, -1.1}, {0.5, 0.5}, /*force=*/true);
    const auto down_report = verify_martingale_exact(*down, 6);
    CHECK(down_report.classification == MgClass::Supermartingale);
    CHECK(std::abs(down_report.min_gap + 0.1) <= 1e-12);
    CHECK(std::abs(down_report.max_gap + 0.1) <= 1e-12);
}

TEST_CASE("harmonic function of the ruin chain is a martingale") {
    const MarkovChain chain = ruin_chain();
    const auto mg = make_harmonic_mg(chain, {0.0, 0.25, 0.5, 0.75, 1.0});
    const auto report = verify_martingale_exact(*mg, 6);
    CHECK(report.classification == MgClass::Martingale);
    CHECK(report.max_abs_gap == 0.0);
    CHECK(report.rows.all_pass());

    CHECK_THROWS_WITH_AS(make_harmonic_mg(chain, {0.0, 1.0, 0.0, 0.0, 0.0}),
                         doctest::Contains("NotAnEigenpair"), Error);
}

TEST_CASE("eigenvalue-scaled observable is a martingale exactly at its eigenvalue") {
    const MarkovChain chain = weather_chain();

    const auto mg = make_eigen_mg(chain, 0.7, {1.0, -2.0});
    const auto report = verify_martingale_exact(*mg, 5);
    CHECK(report.classification == MgClass::Martingale);
    CHECK(report.max_abs_gap <= 1e-12);
    CHECK(report.mean_gap <= 1e-12);
    CHECK(report.rows.all_pass());

    CHECK_THROWS_WITH_AS(make_eigen_mg(chain, 0.65, {1.0, -2.0}),
                         doctest::Contains("NotAnEigenpair"), Error);
    CHECK_THROWS_WITH_AS(make_eigen_mg(chain, 0.0, {1.0, -2.0}), doctest::Contains("ZeroLambda"),
                         Error);

    // Forcing the wrong eigenvalue produces mixed-sign gaps: the scaled
    // residual is 0.05 * phi(x) and phi changes sign.
    const auto broken = make_eigen_mg(chain, 0.65, {1.0, -2.0}, /*force=*/true);
    const auto broken_report = verify_martingale_exact(*broken, 5);
    CHECK(broken_report.classification == MgClass::Neither);
    CHECK(broken_report.max_abs_gap > 1e-3);
    CHECK(broken_report.min_gap < -1e-3);
    CHECK(broken_report.max_gap > 1e-3);
}

TEST_CASE("exponentially tilted walk normalizes to a mean-one martingale") {
    const double lambda_w = std::log(2.0);
    CHECK(wald_normalizer({1.0, -1.0}, {0.5, 0.5}, lambda_w) ==
          doctest::Approx(1.25).epsilon(1e-14));

    const auto mg = make_wald_mg({1.0, -1.0}, {0.5, 0.5}, lambda_w);
    const auto report = verify_martingale_exact(*mg, 8);
    CHECK(report.classification == MgClass::Martingale);
    CHECK(report.max_abs_gap <= 1e-10);
    CHECK(report.mean_gap <= 1e-10);  // <Y_n> stays at Y_0 = 1
    CHECK(report.rows.all_pass());

    const std::vector<std::size_t> root{0};
    CHECK(mg->y_value(root) == 1.0);

    CHECK_THROWS_WITH_AS(make_wald_mg({1.0, -1.0}, {0.5, 0.5}, 0.0),
                         doctest::Contains("ZeroLambda"), Error);
}

TEST_CASE("conditional mean of a terminal functional is a martingale") {
    SUBCASE("running sum terminal reproduces the walk exactly") {
        const MarkovChain chain = iid_increment_chain({1.0, -1.0}, {0.5, 0.5});
        const TerminalFn total = [](std::span<const double> values) {
            double s = 0.0;
            for (double v : values) s += v;
            return s;
        };
        const auto mg = make_doob_mg(chain, total, 4, "sum");
        const auto report = verify_martingale_exact(*mg, 4);
        CHECK(report.classification == MgClass::Martingale);
        CHECK(report.max_abs_gap == 0.0);

        // The projected value at every prefix equals the partial sum, bit for bit.
        const PathTree tree(chain, 4);
        for (std::size_t depth = 0; depth <= 4; ++depth) {
            for (std::size_t idx = 0; idx < tree.levels()[depth].size(); ++idx) {
                const auto prefix = tree.prefix_of(depth, idx);
                double s = 0.0;
                for (std::size_t state : prefix) s += chain.value_of(state);
                CHECK(mg->y_value(prefix) == s);
            }
        }
    }

    SUBCASE("terminal on a two-state weather chain") {
        const MarkovChain chain = weather_chain();
        const TerminalFn total = [](std::span<const double> values) {
            double s = 0.0;
            for (double v : values) s += v;
            return s;
        };
        const auto mg = make_doob_mg(chain, total, 3, "sum");
        const auto report = verify_martingale_exact(*mg, 3);
        CHECK(report.classification == MgClass::Martingale);
        CHECK(report.max_abs_gap <= 1e-14);
    }

    SUBCASE("constant terminal gives a constant process") {
        const MarkovChain chain = iid_increment_chain({1.0, -1.0}, {0.5, 0.5});
        const auto mg = make_doob_mg(
            chain, [](std::span<const double>) { return 2.5; }, 3, "const");
        const auto report = verify_martingale_exact(*mg, 3);
        CHECK(report.classification == MgClass::Martingale);
        CHECK(report.max_abs_gap == 0.0);
        const std::vector<std::size_t> root{0};
        CHECK(mg->y_value(root) == 2.5);
    }

    SUBCASE("prefixes beyond the terminal horizon are rejected") {
        const MarkovChain chain = iid_increment_chain({1.0, -1.0}, {0.5, 0.5});
        const auto mg = make_doob_mg(
            chain, [](std::span<const double>) { return 0.0; }, 2, "const");
        const std::vector<std::size_t> too_long{0, 1, 1, 1};
        CHECK_THROWS_WITH_AS(mg->y_value(too_long), doctest::Contains("IndexOutOfRange"), Error);
        CHECK_THROWS_WITH_AS(verify_martingale_exact(*mg, 3),
                             doctest::Contains("IndexOutOfRange"), Error);
    }

    CHECK_THROWS_WITH_AS(
        make_doob_mg(MarkovChain({"a"}, {{1.0}}, {1.0}),
                     [](std::span<const double>) { return 0.0; }, 2),
        doctest::Contains("BadProcess"), Error);
}

TEST_CASE("previsible transform of a fair walk stays a martingale") {
    // Bet double after a net loss, otherwise bet one unit.
    const PrevisibleRule rule = [](std::span<const double> past) {
        double s = 0.0;
        for (double x : past) s += x;
        return s < 0.0 ? 2.0 : 1.0;
    };
    const auto mg = make_transform({1.0, -1.0}, {0.5, 0.5}, rule, 2.0, "double-after-loss");
    const auto report = verify_martingale_exact(*mg, 6);
    CHECK(report.classification == MgClass::Martingale);
    CHECK(report.max_abs_gap == 0.0);
    CHECK(report.rows.all_pass());

    CHECK_THROWS_WITH_AS(make_transform({1.1, -0.9}, {0.5, 0.5}, rule, 2.0),
                         doctest::Contains("NonZeroMeanIncrement"), Error);

    // A doubling rule without cap blows past its declared bound.
    const PrevisibleRule doubling = [](std::span<const double> past) {
        return std::pow(2.0, static_cast<double>(past.size()));
    };
    const auto runaway = make_transform({1.0, -1.0}, {0.5, 0.5}, doubling, 5.0, "doubling");
    CHECK_THROWS_WITH_AS(verify_martingale_exact(*runaway, 6),
                         doctest::Contains("UnboundedTransform"), Error);
}

TEST_CASE("difference-form verification agrees with the direct form") {
    VerifyOptions diff;
    diff.via_differences = true;

    const auto walk = make_random_walk({1.0, -1.0}, {0.5, 0.5});
    const auto a = verify_martingale_exact(*walk, 6);
    const auto b = verify_martingale_exact(*walk, 6, diff);
    CHECK(a.classification == b.classification);
    CHECK(std::abs(a.max_abs_gap - b.max_abs_gap) <= 1e-12);

    const auto drift = make_random_walk({1.1, -0.9}, {0.5, 0.5}, /*force=*/true);
    const auto c = verify_martingale_exact(*drift, 6);
    const auto d = verify_martingale_exact(*drift, 6, diff);
    CHECK(c.classification == d.classification);
    CHECK(std::abs(c.min_gap - d.min_gap) <= 1e-12);
    CHECK(std::abs(c.max_gap - d.max_gap) <= 1e-12);

    const auto eigen = make_eigen_mg(weather_chain(), 0.7, {1.0, -2.0});
    const auto e = verify_martingale_exact(*eigen, 5);
    const auto f = verify_martingale_exact(*eigen, 5, diff);
    CHECK(e.classification == f.classification);
    CHECK(f.max_abs_gap <= 1e-12);
}

TEST_CASE("verification respects the node cap") {
    const auto walk = make_random_walk({1.0, -1.0}, {0.5, 0.5});
    VerifyOptions tight;
    tight.node_cap = 50;
    CHECK_THROWS_WITH_AS(verify_martingale_exact(*walk, 10, tight),
                         doctest::Contains("TreeTooLarge"), Error);
}

TEST_CASE("classification names are stable") {
    CHECK(std::string(mg_class_name(MgClass::Martingale)) == "martingale");
    CHECK(std::string(mg_class_name(MgClass::Submartingale)) == "submartingale");
    CHECK(std::string(mg_class_name(MgClass::Supermartingale)) == "supermartingale");
    CHECK(std::string(mg_class_name(MgClass::Neither)) == "neither");
}
