#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "pbn/bracket.hpp"
#include "pbn/corpus.hpp"

using namespace pbn;

namespace {

SampleSpace fair_die() {
    return build_space({"1", "2", "3", "4", "5", "6"},
                       {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6});
}

RandomVariable die_face() {
    return RandomVariable{"X", {1, 2, 3, 4, 5, 6}};
}

using Ops = std::vector<Operator>;

double bracket(const SampleSpace& s, const Event& bra, const Ops& ops, const Event& ket) {
    return eval_bracket(s, bra, ops, ket).value;
}

}  // namespace

TEST_CASE("bracket with one observable is the conditional mean") {
    const auto die = fair_die();
    const Event omega = Event::full(die);

    CHECK(bracket(die, omega, {Operator::observable(die_face())}, omega) ==
          doctest::Approx(3.5).epsilon(1e-12));

    // No operators: plain conditional probability.
    const Event a({0, 1});
    const Event b({1, 2});
    CHECK(bracket(die, a, {}, b) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("bracket degenerate cases") {
    const auto die = fair_die();

    // Condition contained in the evidence: certainty.
    const Event a({0, 2, 4});
    CHECK(bracket(die, a, {}, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bracket(die, Event::full(die), {}, a) == doctest::Approx(1.0).epsilon(1e-12));

    // Singleton bra against singleton ket: Kronecker delta.
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            const double v = bracket(die, Event::single(i), {}, Event::single(j));
            CHECK(v == (i == j ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("conditioning on zero probability is rejected") {
    const auto space = build_space({"a", "b", "c"}, {0.5, 0.5, 0.0});
    CHECK_THROWS_AS(bracket(space, Event::full(space), {}, Event({2})), Error);
    try {
        bracket(space, Event::full(space), {}, Event({2}));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroProbabilityCondition);
    }
}

TEST_CASE("identity insertion anywhere leaves the value unchanged exactly") {
    corpus::Rng rng(314);
    for (int rep = 0; rep < 25; ++rep) {
        const auto space = corpus::random_space(rng, 4 + rng.next_below(9));
        const auto x = corpus::random_rv(rng, space.size(), "X");
        const auto a = corpus::random_event(rng, space.size());
        const auto bra = corpus::random_event(rng, space.size());
        const auto ket = corpus::random_event(rng, space.size());

        const Ops ops = {Operator::observable(x), Operator::indicator(a),
                         Operator::scalar_fn(ScalarFnKind::Square, x)};
        const double base = bracket(space, bra, ops, ket);
        for (std::size_t at = 0; at <= ops.size(); ++at) {
            Ops with_id = ops;
            with_id.insert(with_id.begin() + static_cast<std::ptrdiff_t>(at),
                           Operator::identity());
            CHECK(bracket(space, bra, with_id, ket) == base);
        }
    }
}

TEST_CASE("Bayes rearrangement holds at positive mass") {
    corpus::Rng rng(2718);
    for (int rep = 0; rep < 25; ++rep) {
        const auto space = corpus::random_space(rng, 4 + rng.next_below(9));
        const auto a = corpus::random_event(rng, space.size());
        const auto b = corpus::random_event(rng, space.size());
        const double lhs = bracket(space, a, {}, b) * event_prob(space, b);
        const double rhs = bracket(space, b, {}, a) * event_prob(space, a);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("expectation delegates to the bracket") {
    const auto coin = build_space({"+", "-"}, {0.5, 0.5});
    CHECK(expectation(coin, Operator::observable({"X", {1, -1}})) == 0.0);
    CHECK(expectation(coin, Operator::identity()) == 1.0);

    const auto die = fair_die();
    const Event omega = Event::full(die);
    const Operator op = Operator::observable(die_face());
    CHECK(expectation(die, op) == bracket(die, omega, {op}, omega));
}

TEST_CASE("second moment of a discretized standard normal") {
    const std::size_t bins = 201;
    const double lo = -8.0, hi = 8.0;
    const double dx = (hi - lo) / static_cast<double>(bins);
    std::vector<std::string> labels;
    std::vector<double> weights;
    RandomVariable x{"x", {}};
    for (std::size_t i = 0; i < bins; ++i) {
        const double xi = lo + (static_cast<double>(i) + 0.5) * dx;
        labels.push_back("b" + std::to_string(i));
        weights.push_back(std::exp(-0.5 * xi * xi) / std::sqrt(2.0 * std::numbers::pi) * dx);
        x.values.push_back(xi);
    }
    const auto grid = build_space(labels, weights, std::vector<double>(bins, dx), true);
    const double second = expectation(grid, Operator::scalar_fn(ScalarFnKind::Square, x));
    CHECK(std::abs(second - 1.0) <= 2e-3);
}

TEST_CASE("conditional mean given an event") {
    const auto die = fair_die();
    const Event even({1, 3, 5});

    CHECK(cond_expectation_event(die, die_face(), even) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(cond_expectation_event(die, die_face(), Event::full(die)) ==
          doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("conditioning on an event from an independent factor is a no-op") {
    corpus::Rng rng(11);
    const auto s1 = corpus::random_space(rng, 4);
    const auto s2 = corpus::random_space(rng, 3);
    const ProductSpace prod(s1, s2);
    const auto x = prod.lift_rv_1(corpus::random_rv(rng, 4, "X"));
    const auto h = prod.lift_event_2(Event({0, 2}));

    const double conditioned = cond_expectation_event(prod.space(), x, h);
    const double plain = expectation(prod.space(), Operator::observable(x));
    CHECK(std::abs(conditioned - plain) <= 1e-12);
}

TEST_CASE("conditional mean given a variable averages per level set") {
    const auto die = fair_die();
    const RandomVariable parity{"parity", {1, 0, 1, 0, 1, 0}};

    const auto ce = cond_expectation_given_rv(die, Operator::observable(die_face()), parity);
    const std::vector<double> expected = {3, 4, 3, 4, 3, 4};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(ce.values[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }

    // Conditioning a function of X on X itself returns the function.
    const auto self = cond_expectation_given_rv(
        die, Operator::scalar_fn(ScalarFnKind::Square, die_face()), die_face());
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(self.values[i] ==
              doctest::Approx(die_face().values[i] * die_face().values[i]).epsilon(1e-12));
    }
}

TEST_CASE("conditional mean given an independent variable is constant") {
    corpus::Rng rng(5);
    const auto s1 = corpus::random_space(rng, 5);
    const auto s2 = corpus::random_space(rng, 4);
    const ProductSpace prod(s1, s2);
    const auto x = prod.lift_rv_1(corpus::random_rv(rng, 5, "X"));
    const auto y = prod.lift_rv_2(corpus::random_coarse_rv(rng, 4, 2, "Y"));

    const auto ce = cond_expectation_given_rv(prod.space(), Operator::observable(x), y);
    const double mean = expectation(prod.space(), Operator::observable(x));
    for (double v : ce.values) CHECK(std::abs(v - mean) <= 1e-12);
}

TEST_CASE("conditional mean given a partition") {
    const auto die = fair_die();
    const auto x = die_face();

    const auto trivial = cond_expectation_given_partition(die, x, Partition::trivial(die));
    for (double v : trivial.values) CHECK(v == doctest::Approx(3.5).epsilon(1e-12));

    const auto finest = cond_expectation_given_partition(die, x, Partition::singletons(die));
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(finest.values[i] == doctest::Approx(x.values[i]).epsilon(1e-12));
    }

    const Partition parity(die, {Event({0, 2, 4}), Event({1, 3, 5})});
    const auto z = cond_expectation_given_partition(die, x, parity);
    const std::vector<double> expected = {3, 4, 3, 4, 3, 4};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(z.values[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
}

TEST_CASE("zero-mass atom is rejected") {
    const auto space = build_space({"a", "b", "c"}, {0.5, 0.5, 0.0});
    const Partition part(space, {Event({0, 1}), Event({2})});
    try {
        cond_expectation_given_partition(space, {"X", {1, 2, 3}}, part);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroProbabilityAtom);
    }
}

TEST_CASE("indicator identity suite passes on a random corpus") {
    corpus::Rng rng(1618);
    for (int rep = 0; rep < 50; ++rep) {
        const auto space = corpus::random_space(rng, 4 + rng.next_below(9));
        const auto x = corpus::random_rv(rng, space.size(), "X");
        const auto a = corpus::random_event(rng, space.size());
        const auto b = corpus::random_event(rng, space.size());
        const auto report = indicator_identities(space, x, a, b);
        CHECK(report.all_pass());
        CHECK(report.max_residual() <= 1e-12);
    }
}

TEST_CASE("characteristic function") {
    const auto coin = build_space({"+", "-"}, {0.5, 0.5});
    const RandomVariable x{"X", {1, -1}};

    CHECK(characteristic_function(coin, x, 0.0) == std::complex<double>(1.0, 0.0));
    const auto at = characteristic_function(coin, x, 0.7);
    CHECK(at.real() == doctest::Approx(std::cos(0.7)).epsilon(1e-12));
    CHECK(std::abs(at.imag()) <= 1e-12);

    const auto point = build_space({"p"}, {1.0});
    const auto v = characteristic_function(point, {"X", {2.5}}, 1.3);
    CHECK(std::abs(v - std::polar(1.0, 1.3 * 2.5)) <= 1e-12);
}

TEST_CASE("observables commute") {
    corpus::Rng rng(42);
    for (int rep = 0; rep < 10; ++rep) {
        const auto space = corpus::random_space(rng, 10);
        const auto x = corpus::random_rv(rng, 10, "X");
        const auto y = corpus::random_rv(rng, 10, "Y");
        CHECK(commutator_check(space, x, y) == 0.0);
    }
    const auto die = fair_die();
    CHECK(commutator_check(die, die_face(), die_face()) == 0.0);
}

TEST_CASE("conditional expectation property suite on seeded spaces") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        corpus::Rng rng(seed);
        const auto space = corpus::random_space(rng, 4 + rng.next_below(9));
        const auto inputs = make_ce_inputs(space, seed * 1000 + 7);
        const auto report = verify_ce_properties(space, inputs, seed);
        if (!report.all_pass()) {
            for (const auto& row : report.rows) {
                if (!row.pass) MESSAGE(row.ref, " residual ", row.residual);
            }
        }
        CHECK(report.all_pass());
        CHECK(report.max_residual() <= 1e-12);
    }
}

TEST_CASE("bracket values carry declared dimensions") {
    const auto die = fair_die();
    const Event omega = Event::full(die);
    DimDeclaration decl;
    decl.declare("X", Dimension::length());

    const Ops obs = {Operator::observable(die_face())};
    CHECK(eval_bracket(die, omega, obs, omega, &decl).dimension == Dimension::length());

    const Ops sq = {Operator::scalar_fn(ScalarFnKind::Square, die_face())};
    CHECK(eval_bracket(die, omega, sq, omega, &decl).dimension == Dimension{2, 0, 0});

    const Ops ind = {Operator::indicator(Event({0}))};
    CHECK(eval_bracket(die, omega, ind, omega, &decl).dimension.is_dimensionless());

    // Without declarations the value is dimensionless.
    CHECK(eval_bracket(die, omega, obs, omega).dimension.is_dimensionless());
}
