#include "pbn/bracket.hpp"

#include <cmath>
#include <utility>

#include "pbn/corpus.hpp"
#include "pbn/numeric.hpp"

namespace pbn {

double apply_scalar_fn(ScalarFnKind fn, double v) {
    switch (fn) {
        case ScalarFnKind::Id: return v;
        case ScalarFnKind::Square: return v * v;
        case ScalarFnKind::Exp: return std::exp(v);
        case ScalarFnKind::Abs: return std::abs(v);
    }
    return v;
}

const char* scalar_fn_name(ScalarFnKind fn) {
    switch (fn) {
        case ScalarFnKind::Id: return "id";
        case ScalarFnKind::Square: return "square";
        case ScalarFnKind::Exp: return "exp";
        case ScalarFnKind::Abs: return "abs";
    }
    return "id";
}

std::optional<ScalarFnKind> scalar_fn_by_name(const std::string& name) {
    if (name == "id") return ScalarFnKind::Id;
    if (name == "square") return ScalarFnKind::Square;
    if (name == "exp") return ScalarFnKind::Exp;
    if (name == "abs") return ScalarFnKind::Abs;
    return std::nullopt;
}

Operator Operator::observable(RandomVariable rv) {
    Operator op;
    op.kind_ = Kind::Observable;
    op.rv_ = std::move(rv);
    return op;
}

Operator Operator::indicator(Event event) {
    Operator op;
    op.kind_ = Kind::Indicator;
    op.event_ = std::move(event);
    return op;
}

Operator Operator::scalar_fn(ScalarFnKind fn, RandomVariable rv) {
    Operator op;
    op.kind_ = Kind::ScalarFn;
    op.fn_ = fn;
    op.rv_ = std::move(rv);
    return op;
}

Operator Operator::identity() {
    return Operator{};
}

double Operator::factor_at(std::size_t outcome) const {
    switch (kind_) {
        case Kind::Observable: return rv_.values[outcome];
        case Kind::Indicator: return event_.contains(outcome) ? 1.0 : 0.0;
        case Kind::ScalarFn: return apply_scalar_fn(fn_, rv_.values[outcome]);
        case Kind::Identity: return 1.0;
    }
    return 1.0;
}

void Operator::require_on(const SampleSpace& space) const {
    switch (kind_) {
        case Kind::Observable:
        case Kind::ScalarFn: require_rv_on_space(space, rv_); break;
        case Kind::Indicator: require_event_in_space(space, event_); break;
        case Kind::Identity: break;
    }
}

Dimension Operator::dimension(const DimDeclaration& decl) const {
    switch (kind_) {
        case Kind::Observable: return decl.find(rv_.name).value_or(Dimension::dimensionless());
        case Kind::ScalarFn: {
            const Dimension base = decl.find(rv_.name).value_or(Dimension::dimensionless());
            switch (fn_) {
                case ScalarFnKind::Id:
                case ScalarFnKind::Abs: return base;
                case ScalarFnKind::Square: return base.pow(Rational(2));
                case ScalarFnKind::Exp: return Dimension::dimensionless();
            }
            return base;
        }
        case Kind::Indicator:
        case Kind::Identity: return Dimension::dimensionless();
    }
    return Dimension::dimensionless();
}

BracketValue eval_bracket(const SampleSpace& space, const Event& bra,
                          std::span<const Operator> ops, const Event& ket,
                          const DimDeclaration* dims) {
    require_event_in_space(space, bra);
    require_event_in_space(space, ket);
    for (const auto& op : ops) op.require_on(space);

    const double p_ket = event_prob(space, ket);
    if (p_ket <= 0.0) {
        throw Error(ErrorCode::ZeroProbabilityCondition,
                    "bracket conditions on an event of probability 0");
    }

    std::vector<double> terms;
    terms.reserve(ket.count());
    for (std::size_t i : ket.indices()) {
        if (!bra.contains(i)) continue;
        double factor = 1.0;
        for (const auto& op : ops) factor *= op.factor_at(i);
        terms.push_back(factor * space.weight(i));
    }

    BracketValue out;
    out.value = pairwise_sum(terms) / p_ket;
    if (dims) {
        for (const auto& op : ops) out.dimension = out.dimension * op.dimension(*dims);
    }
    return out;
}

double expectation(const SampleSpace& space, const Operator& op) {
    const Event full = Event::full(space);
    return eval_bracket(space, full, std::span<const Operator>(&op, 1), full).value;
}

double cond_expectation_event(const SampleSpace& space, const RandomVariable& x, const Event& h) {
    const Operator op = Operator::observable(x);
    return eval_bracket(space, Event::full(space), std::span<const Operator>(&op, 1), h).value;
}

namespace {

std::string op_display_name(const Operator& op) {
    switch (op.kind()) {
        case Operator::Kind::Observable: return op.rv().name;
        case Operator::Kind::Indicator: return "I";
        case Operator::Kind::ScalarFn:
            return std::string(scalar_fn_name(op.fn())) + "(" + op.rv().name + ")";
        case Operator::Kind::Identity: return "1";
    }
    return "?";
}

// Atom-wise average of the operator's diagonal factors; the workhorse
// behind both conditional-expectation forms.
RandomVariable atom_averages(const SampleSpace& space, const Operator& op, const Partition& part,
                             const std::string& name, ErrorCode zero_mass_code) {
    op.require_on(space);
    require_partition_on_space(space, part);

    std::vector<double> atom_value(part.atom_count());
    for (std::size_t a = 0; a < part.atom_count(); ++a) {
        const Event& atom = part.atoms()[a];
        std::vector<double> num;
        std::vector<double> den;
        num.reserve(atom.count());
        den.reserve(atom.count());
        for (std::size_t i : atom.indices()) {
            num.push_back(op.factor_at(i) * space.weight(i));
            den.push_back(space.weight(i));
        }
        const double mass = pairwise_sum(den);
        if (mass <= 0.0) {
            throw Error(zero_mass_code, "conditioning level set has probability 0");
        }
        atom_value[a] = pairwise_sum(num) / mass;
    }

    RandomVariable out;
    out.name = name;
    out.values.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        out.values[i] = atom_value[part.atom_of(i)];
    }
    return out;
}

double max_abs_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

// Row for a pointwise identity: lhs is the worst gap, target 0.
CheckRow gap_row(std::string property, std::string ref, double max_gap, double tol) {
    return exact_row(std::move(property), std::move(ref), max_gap, 0.0, tol);
}

}  // namespace

RandomVariable cond_expectation_given_rv(const SampleSpace& space, const Operator& g_of_x,
                                         const RandomVariable& y) {
    const Partition sigma_y = sigma_of_rv(space, y);
    const std::string name = "E[" + op_display_name(g_of_x) + "|" + y.name + "]";
    return atom_averages(space, g_of_x, sigma_y, name, ErrorCode::ZeroProbabilityCondition);
}

RandomVariable cond_expectation_given_partition(const SampleSpace& space, const RandomVariable& x,
                                                const Partition& b) {
    RandomVariable z = atom_averages(space, Operator::observable(x), b, "E[" + x.name + "|B]",
                                     ErrorCode::ZeroProbabilityAtom);

    // Defining property: X and Z have equal means against every atom.
    for (const auto& atom : b.atoms()) {
        std::vector<double> gap;
        gap.reserve(atom.count());
        for (std::size_t i : atom.indices()) {
            gap.push_back((x.values[i] - z.values[i]) * space.weight(i));
        }
        if (std::abs(pairwise_sum(gap)) > kExactTol) {
            throw std::logic_error("conditional expectation violated its defining identity");
        }
    }
    return z;
}

CheckReport indicator_identities(const SampleSpace& space, const RandomVariable& x, const Event& a,
                                 const Event& b, double tol) {
    require_event_in_space(space, a);
    require_event_in_space(space, b);
    require_rv_on_space(space, x);

    CheckReport report;
    const Event full = Event::full(space);

    const Operator ind_a = Operator::indicator(a);
    const Operator ind_b = Operator::indicator(b);

    report.add(exact_row("mean of indicator equals event probability", "indicator.mean-is-prob",
                         expectation(space, ind_a), event_prob(space, a), tol));

    const Operator ops_xb[] = {Operator::observable(x), ind_b};
    const double lhs_weighted = eval_bracket(space, full, ops_xb, full).value;
    const double rhs_weighted = event_prob(space, b) * cond_expectation_event(space, x, b);
    report.add(exact_row("mean of X restricted by indicator factors through the condition",
                         "indicator.restricted-mean", lhs_weighted, rhs_weighted, tol));

    const double lhs_ce = eval_bracket(space, full, std::span<const Operator>(&ind_a, 1), b).value;
    const double rhs_ce = event_prob(space, a.intersect(b)) / event_prob(space, b);
    report.add(exact_row("conditional mean of indicator equals conditional probability",
                         "indicator.ce-is-cond-prob", lhs_ce, rhs_ce, tol));

    report.add(exact_row("unit mean on its own condition", "indicator.self-condition",
                         eval_bracket(space, full, std::span<const Operator>(&ind_b, 1), b).value,
                         1.0, tol));

    const Operator ind_not_a = Operator::indicator(a.complement(space));
    report.add(exact_row("indicator and complement means sum to one", "indicator.complement",
                         expectation(space, ind_a) + expectation(space, ind_not_a), 1.0, tol));

    return report;
}

std::complex<double> characteristic_function(const SampleSpace& space, const RandomVariable& x,
                                             double k) {
    require_rv_on_space(space, x);
    std::vector<double> re(space.size());
    std::vector<double> im(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        re[i] = std::cos(k * x.values[i]) * space.weight(i);
        im[i] = std::sin(k * x.values[i]) * space.weight(i);
    }
    return {pairwise_sum(re), pairwise_sum(im)};
}

double commutator_check(const SampleSpace& space, const RandomVariable& x,
                        const RandomVariable& y) {
    require_rv_on_space(space, x);
    require_rv_on_space(space, y);
    double worst = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double xy = x.values[i] * y.values[i];
        const double yx = y.values[i] * x.values[i];
        worst = std::max(worst, std::abs(xy - yx));
    }
    return worst;
}

CeInputs make_ce_inputs(const SampleSpace& space, std::uint64_t seed) {
    corpus::Rng rng(seed);
    const std::size_t n = space.size();

    CeInputs inputs;
    inputs.x = corpus::random_rv(rng, n, "X");
    inputs.w = corpus::random_rv(rng, n, "W");
    inputs.y = corpus::random_coarse_rv(rng, n, 2 + rng.next_below(3), "Y");
    inputs.coarse = sigma_of_rv(space, inputs.y);

    // Refine each coarse atom by an independent coin per outcome; an atom
    // whose members all land on one side stays whole.
    std::vector<Event> fine_atoms;
    for (const auto& atom : inputs.coarse.atoms()) {
        std::vector<std::size_t> heads;
        std::vector<std::size_t> tails;
        for (std::size_t i : atom.indices()) {
            (rng.next_u64() & 1 ? heads : tails).push_back(i);
        }
        if (!heads.empty()) fine_atoms.emplace_back(std::move(heads));
        if (!tails.empty()) fine_atoms.emplace_back(std::move(tails));
    }
    inputs.fine = Partition(space, std::move(fine_atoms));
    return inputs;
}

CheckReport verify_ce_properties(const SampleSpace& space, const CeInputs& inputs,
                                 std::uint64_t seed, double tol) {
    CheckReport report;
    const std::size_t n = space.size();
    const RandomVariable& x = inputs.x;
    const RandomVariable& w = inputs.w;
    const RandomVariable& y = inputs.y;

    auto combine = [&](const std::string& name, auto&& f) {
        RandomVariable rv;
        rv.name = name;
        rv.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) rv.values[i] = f(i);
        return rv;
    };

    // Positivity: a nonnegative integrand has a nonnegative conditional mean.
    {
        const auto ce = cond_expectation_given_rv(space, Operator::scalar_fn(ScalarFnKind::Abs, x),
                                                  y);
        double min_value = ce.values[0];
        for (double v : ce.values) min_value = std::min(min_value, v);
        CheckRow row;
        row.property = "nonnegative integrand keeps nonnegative conditional mean";
        row.ref = "ce.positivity";
        row.lhs = min_value;
        row.rhs = 0.0;
        row.residual = std::max(0.0, -min_value);
        row.pass = min_value >= 0.0;
        report.add(row);
    }

    // Linearity against the conditioning variable.
    {
        const auto lin = combine("2X-W", [&](std::size_t i) {
            return 2.0 * x.values[i] - w.values[i];
        });
        const auto lhs = cond_expectation_given_rv(space, Operator::observable(lin), y);
        const auto ce_x = cond_expectation_given_rv(space, Operator::observable(x), y);
        const auto ce_w = cond_expectation_given_rv(space, Operator::observable(w), y);
        const auto rhs = combine("2E[X|Y]-E[W|Y]", [&](std::size_t i) {
            return 2.0 * ce_x.values[i] - ce_w.values[i];
        });
        report.add(gap_row("conditional mean is linear in the integrand", "ce.linearity.rv",
                           max_abs_gap(lhs.values, rhs.values), tol));
    }

    // Independence: conditioning on an independent factor changes nothing.
    {
        corpus::Rng aux_rng(seed ^ 0xabcdef1234567890ull);
        const SampleSpace aux = corpus::random_space(aux_rng, 3 + aux_rng.next_below(3));
        const ProductSpace prod(space, aux);
        const auto x1 = prod.lift_rv_1(x);
        const auto y2 = prod.lift_rv_2(corpus::random_coarse_rv(aux_rng, aux.size(), 2, "Y2"));
        const auto ce = cond_expectation_given_rv(prod.space(), Operator::observable(x1), y2);
        const double mean = expectation(prod.space(), Operator::observable(x1));
        double worst = 0.0;
        for (double v : ce.values) worst = std::max(worst, std::abs(v - mean));
        report.add(gap_row("conditioning on an independent variable returns the plain mean",
                           "ce.independence", worst, tol));
    }

    // Partial averaging: <E[X|Y] h(Y)> = <X h(Y)>.
    {
        const auto ce_x = cond_expectation_given_rv(space, Operator::observable(x), y);
        const auto lhs_rv = combine("E[X|Y]h(Y)", [&](std::size_t i) {
            return ce_x.values[i] * apply_scalar_fn(ScalarFnKind::Square, y.values[i]);
        });
        const auto rhs_rv = combine("Xh(Y)", [&](std::size_t i) {
            return x.values[i] * apply_scalar_fn(ScalarFnKind::Square, y.values[i]);
        });
        report.add(exact_row("conditional mean averages correctly against any function of the "
                             "conditioner",
                             "ce.partial-averaging",
                             expectation(space, Operator::observable(lhs_rv)),
                             expectation(space, Operator::observable(rhs_rv)), tol));
    }

    // Total expectation through the conditioning variable.
    {
        const auto ce_x = cond_expectation_given_rv(space, Operator::observable(x), y);
        report.add(exact_row("mean of the conditional mean is the plain mean",
                             "ce.total-expectation.rv",
                             expectation(space, Operator::observable(ce_x)),
                             expectation(space, Operator::observable(x)), tol));
    }

    // Take out what is known: E[X·Y|Y] = Y·E[X|Y].
    {
        const auto xy = combine("XY", [&](std::size_t i) { return x.values[i] * y.values[i]; });
        const auto lhs = cond_expectation_given_rv(space, Operator::observable(xy), y);
        const auto ce_x = cond_expectation_given_rv(space, Operator::observable(x), y);
        const auto rhs = combine("YE[X|Y]", [&](std::size_t i) {
            return y.values[i] * ce_x.values[i];
        });
        report.add(gap_row("measurable factors pull out of the conditional mean",
                           "ce.take-out-known.rv", max_abs_gap(lhs.values, rhs.values), tol));
    }

    // Conditioning a function of Y on Y returns it unchanged.
    {
        const auto hy = combine("h(Y)", [&](std::size_t i) {
            return apply_scalar_fn(ScalarFnKind::Square, y.values[i]);
        });
        const auto lhs = cond_expectation_given_rv(space, Operator::observable(hy), y);
        report.add(gap_row("function of the conditioner is its own conditional mean", "ce.self",
                           max_abs_gap(lhs.values, hy.values), tol));
    }

    // Conditioning twice on the same variable is a no-op.
    {
        const auto once = cond_expectation_given_rv(space, Operator::observable(x), y);
        const auto twice = cond_expectation_given_rv(space, Operator::observable(once), y);
        report.add(gap_row("repeated conditioning is idempotent", "ce.redundant-conditioning",
                           max_abs_gap(once.values, twice.values), tol));
    }

    const Partition& coarse = inputs.coarse;
    const Partition& fine = inputs.fine;

    // Trivial field: single atom returns the constant mean.
    {
        const auto z = cond_expectation_given_partition(space, x, Partition::trivial(space));
        const double mean = expectation(space, Operator::observable(x));
        double worst = 0.0;
        for (double v : z.values) worst = std::max(worst, std::abs(v - mean));
        report.add(gap_row("trivial field collapses to the plain mean", "ce.sigma.trivial", worst,
                           tol));
    }

    // Finest field: singleton atoms return the variable itself.
    {
        const auto z = cond_expectation_given_partition(space, x, Partition::singletons(space));
        report.add(gap_row("finest field returns the variable", "ce.sigma.finest",
                           max_abs_gap(z.values, x.values), tol));
    }

    // Linearity in the partition form.
    {
        const auto lin = combine("2X-W", [&](std::size_t i) {
            return 2.0 * x.values[i] - w.values[i];
        });
        const auto lhs = cond_expectation_given_partition(space, lin, coarse);
        const auto zx = cond_expectation_given_partition(space, x, coarse);
        const auto zw = cond_expectation_given_partition(space, w, coarse);
        const auto rhs = combine("2Z_X-Z_W", [&](std::size_t i) {
            return 2.0 * zx.values[i] - zw.values[i];
        });
        report.add(gap_row("atom-wise conditional mean is linear", "ce.sigma.linearity",
                           max_abs_gap(lhs.values, rhs.values), tol));
    }

    // Take out what is known, partition form, with a field-measurable factor.
    {
        const auto z0 = cond_expectation_given_partition(space, w, coarse);
        const auto z0x = combine("Z0·X", [&](std::size_t i) {
            return z0.values[i] * x.values[i];
        });
        const auto lhs = cond_expectation_given_partition(space, z0x, coarse);
        const auto zx = cond_expectation_given_partition(space, x, coarse);
        const auto rhs = combine("Z0·Z_X", [&](std::size_t i) {
            return z0.values[i] * zx.values[i];
        });
        report.add(gap_row("field-measurable factors pull out", "ce.sigma.take-out-known",
                           max_abs_gap(lhs.values, rhs.values), tol));
    }

    // Tower in both orders across a refinement pair.
    {
        const auto via_fine = cond_expectation_given_partition(
            space, cond_expectation_given_partition(space, x, fine), coarse);
        const auto direct = cond_expectation_given_partition(space, x, coarse);
        report.add(gap_row("coarse conditioning after fine equals coarse alone",
                           "ce.sigma.tower.coarse-after-fine",
                           max_abs_gap(via_fine.values, direct.values), tol));

        const auto via_coarse = cond_expectation_given_partition(
            space, cond_expectation_given_partition(space, x, coarse), fine);
        report.add(gap_row("fine conditioning after coarse equals coarse alone",
                           "ce.sigma.tower.fine-after-coarse",
                           max_abs_gap(via_coarse.values, direct.values), tol));
    }

    // Total expectation, partition form.
    {
        const auto z = cond_expectation_given_partition(space, x, coarse);
        report.add(exact_row("mean is preserved by atom-wise conditioning",
                             "ce.sigma.total-expectation",
                             expectation(space, Operator::observable(z)),
                             expectation(space, Operator::observable(x)), tol));
    }

    // Orthogonality of the residual against atoms and random atom unions.
    {
        const auto z = cond_expectation_given_partition(space, x, coarse);
        const auto residual_rv = combine("X-Z", [&](std::size_t i) {
            return x.values[i] - z.values[i];
        });
        double worst_atom = 0.0;
        for (const auto& atom : coarse.atoms()) {
            const Operator ops[] = {Operator::observable(residual_rv), Operator::indicator(atom)};
            const Event full = Event::full(space);
            worst_atom = std::max(worst_atom,
                                  std::abs(eval_bracket(space, full, ops, full).value));
        }
        report.add(gap_row("residual is orthogonal to every atom", "ce.sigma.orthogonality.atoms",
                           worst_atom, tol));

        corpus::Rng union_rng(seed ^ 0x5bd1e995u);
        double worst_union = 0.0;
        for (int rep = 0; rep < 4; ++rep) {
            Event u;
            for (const auto& atom : coarse.atoms()) {
                if (union_rng.next_u64() & 1) u = u.unite(atom);
            }
            if (u.empty()) continue;
            const Operator ops[] = {Operator::observable(residual_rv), Operator::indicator(u)};
            const Event full = Event::full(space);
            worst_union = std::max(worst_union,
                                   std::abs(eval_bracket(space, full, ops, full).value));
        }
        report.add(gap_row("residual is orthogonal to unions of atoms",
                           "ce.sigma.orthogonality.unions", worst_union, tol));
    }

    return report;
}

}  // namespace pbn
