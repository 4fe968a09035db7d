#include "pbn/eval.hpp"

#include <algorithm>
#include <set>

#include "pbn/bracket.hpp"

namespace pbn::lang {

namespace {

[[noreturn]] void unbound(const std::string& name, const char* wanted) {
    throw Error(ErrorCode::UnboundName,
                "'" + name + "' does not name a declared " + wanted);
}

const SampleSpace& require_space(const Model& model) {
    if (!model.has_space()) {
        throw Error(ErrorCode::TypeMismatch,
                    "expression needs a sample space, but the model declares none");
    }
    return model.space;
}

// Chain references force a bracket onto a path space; collect them so the
// bracket evaluator can pick the right space.
void collect_chain_refs(const EventExpr& e, std::set<std::string>& names,
                        std::size_t& max_time) {
    switch (e.kind) {
        case EventExpr::Kind::ChainAssign:
            names.insert(e.name);
            max_time = std::max(max_time, e.time);
            break;
        case EventExpr::Kind::Intersect:
        case EventExpr::Kind::Union:
            collect_chain_refs(*e.lhs, names, max_time);
            collect_chain_refs(*e.rhs, names, max_time);
            break;
        case EventExpr::Kind::Complement: collect_chain_refs(*e.lhs, names, max_time); break;
        default: break;
    }
}

// Event binding against an explicit space; `paths` supplies the chain
// unrolling when the bracket lives on a path space.
Event bind_event_on(const EventExpr& e, const Model& model, const SampleSpace& space,
                    const PathSpace* paths, const MarkovChain* chain) {
    switch (e.kind) {
        case EventExpr::Kind::Omega: return Event::full(space);
        case EventExpr::Kind::Name: {
            const auto it = model.events.find(e.name);
            if (it == model.events.end()) {
                if (model.rvs.count(e.name) != 0) {
                    throw Error(ErrorCode::TypeMismatch,
                                "'" + e.name + "' is an observable, not an event");
                }
                unbound(e.name, "event");
            }
            if (paths != nullptr) {
                throw Error(ErrorCode::TypeMismatch,
                            "declared events cannot mix with chain-state events");
            }
            return it->second;
        }
        case EventExpr::Kind::Assign: {
            if (paths != nullptr) {
                throw Error(ErrorCode::TypeMismatch,
                            "level-set events cannot mix with chain-state events");
            }
            const auto it = model.rvs.find(e.name);
            if (it == model.rvs.end()) {
                if (model.events.count(e.name) != 0) {
                    throw Error(ErrorCode::TypeMismatch,
                                "'" + e.name + "' is an event; level sets need an observable");
                }
                unbound(e.name, "observable");
            }
            std::vector<std::size_t> indices;
            for (std::size_t i = 0; i < it->second.values.size(); ++i) {
                if (it->second.values[i] == e.value) indices.push_back(i);
            }
            return Event(std::move(indices));
        }
        case EventExpr::Kind::ChainAssign:
            if (paths == nullptr) {
                throw Error(ErrorCode::TypeMismatch,
                            "chain-state events are only meaningful inside a bracket");
            }
            return paths->value_event(*chain, e.time, e.value);
        case EventExpr::Kind::Intersect:
            return bind_event_on(*e.lhs, model, space, paths, chain)
                .intersect(bind_event_on(*e.rhs, model, space, paths, chain));
        case EventExpr::Kind::Union:
            return bind_event_on(*e.lhs, model, space, paths, chain)
                .unite(bind_event_on(*e.rhs, model, space, paths, chain));
        case EventExpr::Kind::Complement:
            return bind_event_on(*e.lhs, model, space, paths, chain).complement(space);
    }
    throw Error(ErrorCode::TypeMismatch, "unreachable event kind");
}

EvalResult eval_node(const BracketExpr& e, const Model& model);

EvalResult eval_bracket_node(const BracketExpr& e, const Model& model) {
    std::set<std::string> chain_names;
    std::size_t horizon = 0;
    collect_chain_refs(*e.bra, chain_names, horizon);
    collect_chain_refs(*e.ket, chain_names, horizon);

    if (!chain_names.empty()) {
        if (chain_names.size() > 1) {
            throw Error(ErrorCode::TypeMismatch,
                        "a bracket may reference at most one chain");
        }
        if (!e.ops.empty()) {
            throw Error(ErrorCode::TypeMismatch,
                        "operator chains are not supported over chain-state events");
        }
        const std::string& name = *chain_names.begin();
        const auto it = model.chains.find(name);
        if (it == model.chains.end()) unbound(name, "chain");
        const PathSpace paths = make_path_space(it->second, horizon);
        const Event bra = bind_event_on(*e.bra, model, paths.space, &paths, &it->second);
        const Event ket = bind_event_on(*e.ket, model, paths.space, &paths, &it->second);
        const BracketValue v = eval_bracket(paths.space, bra, {}, ket);
        return {std::complex<double>(v.value, 0.0), v.dimension};
    }

    const SampleSpace& space = require_space(model);
    const Event bra = bind_event_on(*e.bra, model, space, nullptr, nullptr);
    const Event ket = bind_event_on(*e.ket, model, space, nullptr, nullptr);
    std::vector<Operator> ops;
    ops.reserve(e.ops.size());
    for (const OpExpr& op : e.ops) ops.push_back(bind_op(op, model));
    const BracketValue v = eval_bracket(space, bra, ops, ket, &model.dims);
    return {std::complex<double>(v.value, 0.0), v.dimension};
}

EvalResult eval_node(const BracketExpr& e, const Model& model) {
    switch (e.kind) {
        case BracketExpr::Kind::Scalar:
            return {std::complex<double>(e.scalar, 0.0), Dimension::dimensionless()};
        case BracketExpr::Kind::Bracket: return eval_bracket_node(e, model);
        case BracketExpr::Kind::Expect:
            throw Error(ErrorCode::TypeMismatch,
                        "conditioning on observables yields an observable, not a scalar; "
                        "condition on an event instead");
        case BracketExpr::Kind::CharFn: {
            const SampleSpace& space = require_space(model);
            const auto it = model.rvs.find(e.rv_name);
            if (it == model.rvs.end()) unbound(e.rv_name, "observable");
            return {characteristic_function(space, it->second, e.k),
                    Dimension::dimensionless()};
        }
        case BracketExpr::Kind::BinOp: {
            const EvalResult lhs = eval_node(*e.lhs, model);
            const EvalResult rhs = eval_node(*e.rhs, model);
            switch (e.op) {
                case '+':
                case '-':
                    if (!(lhs.dimension == rhs.dimension)) {
                        throw Error(ErrorCode::TypeMismatch,
                                    "cannot add [" + lhs.dimension.to_string() + "] to [" +
                                        rhs.dimension.to_string() + "]");
                    }
                    return {e.op == '+' ? lhs.value + rhs.value : lhs.value - rhs.value,
                            lhs.dimension};
                case '*': return {lhs.value * rhs.value, lhs.dimension * rhs.dimension};
                default: return {lhs.value / rhs.value, lhs.dimension / rhs.dimension};
            }
        }
    }
    throw Error(ErrorCode::TypeMismatch, "unreachable expression kind");
}

}  // namespace

Event bind_event(const EventExpr& event, const Model& model) {
    return bind_event_on(event, model, require_space(model), nullptr, nullptr);
}

Operator bind_op(const OpExpr& op, const Model& model) {
    switch (op.kind) {
        case OpExpr::Kind::Identity: return Operator::identity();
        case OpExpr::Kind::Rv: {
            const auto it = model.rvs.find(op.name);
            if (it == model.rvs.end()) {
                if (model.events.count(op.name) != 0) {
                    throw Error(ErrorCode::TypeMismatch,
                                "'" + op.name + "' is an event; write I_" + op.name +
                                    " for its indicator");
                }
                unbound(op.name, "observable");
            }
            return Operator::observable(it->second);
        }
        case OpExpr::Kind::Indicator: {
            const auto it = model.events.find(op.name);
            if (it == model.events.end()) {
                if (model.rvs.count(op.name) != 0) {
                    throw Error(ErrorCode::TypeMismatch,
                                "indicators take events; '" + op.name + "' is an observable");
                }
                unbound(op.name, "event");
            }
            return Operator::indicator(it->second);
        }
        case OpExpr::Kind::ScalarFn: {
            const auto it = model.rvs.find(op.name);
            if (it == model.rvs.end()) unbound(op.name, "observable");
            return Operator::scalar_fn(op.fn, it->second);
        }
    }
    throw Error(ErrorCode::TypeMismatch, "unreachable operator kind");
}

EvalResult bind_and_eval(const BracketExpr& expr, const Model& model) {
    return eval_node(expr, model);
}

}  // namespace pbn::lang
