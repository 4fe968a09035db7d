#pragma once

// Random well-formed expression ASTs over the full surface grammar, for
// round-trip checks. Printing one of these and re-parsing must reproduce the
// AST structurally, so the generator stays inside the printable fragment:
// finite values only, and rv-list conditioning with at least two names (one
// name reads back as event conditioning).

#include <memory>
#include <string>
#include <vector>

#include "pbn/ast.hpp"
#include "pbn/corpus.hpp"

namespace pbn::corpus {

struct ExprGenConfig {
    std::vector<std::string> event_names{"A", "B", "H_even", "Rain"};
    std::vector<std::string> rv_names{"X", "Y", "Z"};
    std::vector<std::string> chain_names{"C"};
    bool chain_events = true;  // X@t = v atoms
    bool expect_lists = true;  // E[op | Y1, Y2] nodes
    int max_depth = 3;
};

inline const std::string& pick_name(Rng& rng, const std::vector<std::string>& pool) {
    return pool[rng.next_below(pool.size())];
}

// Mix of small integers, halves, and arbitrary doubles; the latter exercise
// shortest-round-trip number formatting.
inline double random_literal(Rng& rng) {
    switch (rng.next_below(3)) {
        case 0: return static_cast<double>(rng.next_below(7)) - 3.0;
        case 1: return 0.5 * static_cast<double>(rng.next_below(13)) - 3.0;
        default: return -4.0 + 8.0 * rng.next_double();
    }
}

inline lang::EventPtr random_event_expr(Rng& rng, const ExprGenConfig& cfg, int depth) {
    auto node = std::make_shared<lang::EventExpr>();
    switch (rng.next_below(depth > 0 ? 7 : 4)) {
        case 0: node->kind = lang::EventExpr::Kind::Omega; break;
        case 1:
            node->kind = lang::EventExpr::Kind::Name;
            node->name = pick_name(rng, cfg.event_names);
            break;
        case 2:
            node->kind = lang::EventExpr::Kind::Assign;
            node->name = pick_name(rng, cfg.rv_names);
            node->value = random_literal(rng);
            break;
        case 3:
            if (cfg.chain_events) {
                node->kind = lang::EventExpr::Kind::ChainAssign;
                node->name = pick_name(rng, cfg.chain_names);
                node->time = rng.next_below(6);
                node->value = random_literal(rng);
            } else {
                node->kind = lang::EventExpr::Kind::Name;
                node->name = pick_name(rng, cfg.event_names);
            }
            break;
        case 4:
        case 5:
            node->kind = rng.next_u64() & 1 ? lang::EventExpr::Kind::Intersect
                                            : lang::EventExpr::Kind::Union;
            node->lhs = random_event_expr(rng, cfg, depth - 1);
            node->rhs = random_event_expr(rng, cfg, depth - 1);
            break;
        default:
            node->kind = lang::EventExpr::Kind::Complement;
            node->lhs = random_event_expr(rng, cfg, depth - 1);
            break;
    }
    return node;
}

inline lang::OpExpr random_op_expr(Rng& rng, const ExprGenConfig& cfg) {
    lang::OpExpr op;
    switch (rng.next_below(4)) {
        case 0:
            op.kind = lang::OpExpr::Kind::Rv;
            op.name = pick_name(rng, cfg.rv_names);
            break;
        case 1:
            op.kind = lang::OpExpr::Kind::Indicator;
            op.name = pick_name(rng, cfg.event_names);
            break;
        case 2: {
            static constexpr ScalarFnKind kFns[] = {ScalarFnKind::Id, ScalarFnKind::Square,
                                                    ScalarFnKind::Exp, ScalarFnKind::Abs};
            op.kind = lang::OpExpr::Kind::ScalarFn;
            op.fn = kFns[rng.next_below(4)];
            op.name = pick_name(rng, cfg.rv_names);
            break;
        }
        default: op.kind = lang::OpExpr::Kind::Identity; break;
    }
    return op;
}

inline lang::ExprPtr random_expr_at(Rng& rng, const ExprGenConfig& cfg, int depth) {
    auto node = std::make_shared<lang::BracketExpr>();
    switch (rng.next_below(depth > 0 ? 6 : 4)) {
        case 0:
            node->kind = lang::BracketExpr::Kind::Scalar;
            node->scalar = random_literal(rng);
            break;
        case 1:
        case 4: {
            node->kind = lang::BracketExpr::Kind::Bracket;
            node->bra = random_event_expr(rng, cfg, 2);
            node->ket = random_event_expr(rng, cfg, 2);
            const std::size_t n_ops = rng.next_below(4);
            for (std::size_t i = 0; i < n_ops; ++i) node->ops.push_back(random_op_expr(rng, cfg));
            break;
        }
        case 2:
            if (cfg.expect_lists && cfg.rv_names.size() >= 2) {
                node->kind = lang::BracketExpr::Kind::Expect;
                node->inner = random_op_expr(rng, cfg);
                const std::size_t n = 2 + rng.next_below(2);
                for (std::size_t i = 0; i < n; ++i) {
                    node->given_rvs.push_back(pick_name(rng, cfg.rv_names));
                }
            } else {
                node->kind = lang::BracketExpr::Kind::Scalar;
                node->scalar = random_literal(rng);
            }
            break;
        case 3:
            node->kind = lang::BracketExpr::Kind::CharFn;
            node->rv_name = pick_name(rng, cfg.rv_names);
            node->k = random_literal(rng);
            break;
        default: {
            static constexpr char kOps[] = {'+', '-', '*', '/'};
            node->kind = lang::BracketExpr::Kind::BinOp;
            node->op = kOps[rng.next_below(4)];
            node->lhs = random_expr_at(rng, cfg, depth - 1);
            node->rhs = random_expr_at(rng, cfg, depth - 1);
            break;
        }
    }
    return node;
}

inline lang::ExprPtr random_expr(Rng& rng, const ExprGenConfig& cfg = {}) {
    return random_expr_at(rng, cfg, cfg.max_depth);
}

}  // namespace pbn::corpus
