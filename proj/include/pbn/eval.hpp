#pragma once

#include <complex>

#include "pbn/ast.hpp"
#include "pbn/dims.hpp"
#include "pbn/model.hpp"

namespace pbn::lang {

// Evaluated expression: complex because characteristic functions appear as
// expression atoms; plain brackets have zero imaginary part.
struct EvalResult {
    std::complex<double> value;
    Dimension dimension;

    double real() const { return value.real(); }
    double imag() const { return value.imag(); }
};

// Resolves every name against the model and delegates to the bracket engine.
// Name resolution failures are UnboundName; category mistakes (an observable
// where an event is needed, arithmetic over mismatched dimensions, rv-list
// conditioning as a scalar) are TypeMismatch.
EvalResult bind_and_eval(const BracketExpr& expr, const Model& model);

// Event expression -> engine event on the model's space.
Event bind_event(const EventExpr& event, const Model& model);

// Operator expression -> engine operator on the model's space.
Operator bind_op(const OpExpr& op, const Model& model);

}  // namespace pbn::lang
