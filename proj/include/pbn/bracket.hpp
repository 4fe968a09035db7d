#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "pbn/dims.hpp"
#include "pbn/report.hpp"
#include "pbn/space.hpp"

namespace pbn {

// Fixed library of scalar transforms applicable to an observable.
enum class ScalarFnKind { Id, Square, Exp, Abs };

double apply_scalar_fn(ScalarFnKind fn, double v);
const char* scalar_fn_name(ScalarFnKind fn);
std::optional<ScalarFnKind> scalar_fn_by_name(const std::string& name);

// Diagonal operator on the outcome base: acting on the base ket of outcome i
// scales it by factor_at(i). Observables scale by their value, indicators by
// membership, scalar transforms by g(value), the identity by 1.
class Operator {
  public:
    enum class Kind { Observable, Indicator, ScalarFn, Identity };

    static Operator observable(RandomVariable rv);
    static Operator indicator(Event event);
    static Operator scalar_fn(ScalarFnKind fn, RandomVariable rv);
    static Operator identity();

    Kind kind() const { return kind_; }
    const RandomVariable& rv() const { return rv_; }
    const Event& event() const { return event_; }
    ScalarFnKind fn() const { return fn_; }

    double factor_at(std::size_t outcome) const;

    // Observable/ScalarFn operands must match the space size; indicator
    // indices must be in bounds.
    void require_on(const SampleSpace& space) const;

    // Dimension contributed to a bracket value, given declarations for the
    // operand names. Indicators, the identity, and exp-transforms are
    // dimensionless; square doubles the operand dimension.
    Dimension dimension(const DimDeclaration& decl) const;

  private:
    Kind kind_ = Kind::Identity;
    RandomVariable rv_;
    Event event_;
    ScalarFnKind fn_ = ScalarFnKind::Id;
};

struct BracketValue {
    double value = 0.0;
    Dimension dimension;  // dimensionless unless declarations say otherwise
};

// P(bra | op_1 ... op_k | ket) = sum over outcomes in bra∩ket of the product
// of diagonal factors times m(x)/P(ket). With no operators this is the
// conditional probability P(bra ∩ ket)/P(ket).
BracketValue eval_bracket(const SampleSpace& space, const Event& bra,
                          std::span<const Operator> ops, const Event& ket,
                          const DimDeclaration* dims = nullptr);

// <op> = P(Omega|op|Omega). Delegates to eval_bracket, so the two agree
// exactly.
double expectation(const SampleSpace& space, const Operator& op);

// E[X|H] = sum over H of x m(x) / P(H).
double cond_expectation_event(const SampleSpace& space, const RandomVariable& x, const Event& h);

// E[g(X)|Y]: the random variable constant on each level set of Y, valued at
// the level-set average of the operator's diagonal factors.
RandomVariable cond_expectation_given_rv(const SampleSpace& space, const Operator& g_of_x,
                                         const RandomVariable& y);

// E[X|B] for a partition B: atom-wise averages. Checks the defining
// orthogonality <X I_A> = <Z I_A> on every atom at construction.
RandomVariable cond_expectation_given_partition(const SampleSpace& space, const RandomVariable& x,
                                                const Partition& b);

// Identities tying indicators to probabilities and conditional means.
CheckReport indicator_identities(const SampleSpace& space, const RandomVariable& x, const Event& a,
                                 const Event& b, double tol = kExactTol);

// phi(k) = <e^{ikX}>.
std::complex<double> characteristic_function(const SampleSpace& space, const RandomVariable& x,
                                             double k);

// Max over outcomes of |(XY - YX) diagonal action|; identically 0 because
// all operators here are diagonal.
double commutator_check(const SampleSpace& space, const RandomVariable& x,
                        const RandomVariable& y);

// Inputs for the conditional-expectation property suite. `fine` must refine
// `coarse`; `y` is the conditioning variable, `x`/`w` are integrands.
struct CeInputs {
    RandomVariable x;
    RandomVariable w;
    RandomVariable y;
    Partition coarse;
    Partition fine;
};

// Seeded random inputs on `space`: a conditioning variable with few levels
// plus a refinement pair built from joint level sets.
CeInputs make_ce_inputs(const SampleSpace& space, std::uint64_t seed);

// Evaluates both sides of every conditional-expectation identity (positivity,
// linearity, independence on a product construction, partial averaging,
// total expectation, take-out-known, self-conditioning, tower in both
// orders, orthogonality) on the given inputs.
CheckReport verify_ce_properties(const SampleSpace& space, const CeInputs& inputs,
                                 std::uint64_t seed, double tol = kExactTol);

}  // namespace pbn
