#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "pbn/bracket.hpp"

namespace pbn::lang {

// 1-based position of a token in the source text.
struct SourceSpan {
    std::size_t line = 1;
    std::size_t column = 1;
};

struct EventExpr;
using EventPtr = std::shared_ptr<EventExpr>;

// Set-level expression naming an event of the bound space.
struct EventExpr {
    enum class Kind {
        Omega,
        Name,        // declared event
        Assign,      // X = v, the level set of a random variable
        ChainAssign, // X@t = v, a chain's state value at a fixed time
        Intersect,
        Union,
        Complement,
    };

    Kind kind = Kind::Omega;
    std::string name;
    double value = 0.0;
    std::size_t time = 0;      // ChainAssign only
    EventPtr lhs, rhs;         // set operations; Complement uses lhs
    SourceSpan span;
};

// One element of a bracket's operator chain.
struct OpExpr {
    enum class Kind {
        Rv,        // observable by name
        Indicator, // I_<event name>
        ScalarFn,  // square(X), exp(X), abs(X), id(X)
        Identity,  // literal 1, a completeness insertion
    };

    Kind kind = Kind::Rv;
    std::string name;  // rv name, or the indicator's event name
    ScalarFnKind fn = ScalarFnKind::Id;
    SourceSpan span;
};

struct BracketExpr;
using ExprPtr = std::shared_ptr<BracketExpr>;

// Top-level expression: arithmetic over bracket values. "E[...]" and
// "Var[...]" are desugared to brackets while parsing; an Expect node
// survives only for the rv-list conditioning form, which has no scalar
// bracket equivalent.
struct BracketExpr {
    enum class Kind {
        Scalar,
        Bracket,  // P(bra | ops | ket)
        Expect,   // E[op | Y1, Y2, ...]
        CharFn,   // phi(X, k)
        BinOp,    // +, -, *, /
    };

    Kind kind = Kind::Scalar;
    double scalar = 0.0;

    EventPtr bra, ket;
    std::vector<OpExpr> ops;

    OpExpr inner;                       // Expect
    std::vector<std::string> given_rvs; // Expect

    std::string rv_name;  // CharFn
    double k = 0.0;       // CharFn

    char op = '+';        // BinOp
    ExprPtr lhs, rhs;

    SourceSpan span;
};

// Structural equality, ignoring source spans.
bool equals(const EventExpr& a, const EventExpr& b);
bool equals(const OpExpr& a, const OpExpr& b);
bool equals(const BracketExpr& a, const BracketExpr& b);

}  // namespace pbn::lang
