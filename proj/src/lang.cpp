#include "pbn/lang.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace pbn::lang {

namespace {

std::string position_message(std::size_t line, std::size_t column, const std::string& expected,
                             const std::string& found) {
    std::ostringstream os;
    os << "line " << line << ", column " << column << ": expected " << expected << ", found "
       << found;
    return os.str();
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& expected,
                       const std::string& found)
    : Error(ErrorCode::SyntaxError, position_message(line, column, expected, found)),
      line_(line),
      column_(column),
      expected_(expected) {}

namespace {

struct Token {
    enum class Type {
        Ident,
        Number,
        LParen,
        RParen,
        LBrack,
        RBrack,
        Bar,
        Amp,
        Tilde,
        Plus,
        Minus,
        Star,
        Slash,
        Assign,
        At,
        Comma,
        End,
    };

    Type type = Type::End;
    std::string text;
    double number = 0.0;
    std::size_t line = 1;
    std::size_t column = 1;

    SourceSpan span() const { return {line, column}; }

    std::string describe() const {
        switch (type) {
            case Type::Ident: return "'" + text + "'";
            case Type::Number: return "number '" + text + "'";
            case Type::End: return "end of input";
            default: return "'" + text + "'";
        }
    }
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t i = 0;

    const auto push = [&](Token::Type type, std::size_t start, std::size_t end) {
        Token token;
        token.type = type;
        token.text = text.substr(start, end - start);
        token.line = line;
        token.column = column;
        out.push_back(std::move(token));
    };

    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            column = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++column;
            ++i;
            continue;
        }

        const std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                                       text[i] == '_')) {
                ++i;
            }
            push(Token::Type::Ident, start, i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (i < text.size() && text[i] == '.') {
                ++i;
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            }
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
                    i = j;
                    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
                        ++i;
                    }
                }
            }
            push(Token::Type::Number, start, i);
            out.back().number = std::strtod(out.back().text.c_str(), nullptr);
        } else {
            Token::Type type;
            switch (c) {
                case '(': type = Token::Type::LParen; break;
                case ')': type = Token::Type::RParen; break;
                case '[': type = Token::Type::LBrack; break;
                case ']': type = Token::Type::RBrack; break;
                case '|': type = Token::Type::Bar; break;
                case '&': type = Token::Type::Amp; break;
                case '~': type = Token::Type::Tilde; break;
                case '+': type = Token::Type::Plus; break;
                case '-': type = Token::Type::Minus; break;
                case '*': type = Token::Type::Star; break;
                case '/': type = Token::Type::Slash; break;
                case '=': type = Token::Type::Assign; break;
                case '@': type = Token::Type::At; break;
                case ',': type = Token::Type::Comma; break;
                default:
                    throw ParseError(line, column, "a token", std::string("'") + c + "'");
            }
            ++i;
            push(type, start, i);
        }
        column += i - start;
    }

    Token end;
    end.type = Token::Type::End;
    end.line = line;
    end.column = column;
    out.push_back(end);
    return out;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : tokens_(tokenize(text)) {}

    ExprPtr run() {
        ExprPtr expr = parse_expr();
        expect(Token::Type::End, "end of input");
        return expr;
    }

  private:
    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t at = pos_ + ahead;
        return at < tokens_.size() ? tokens_[at] : tokens_.back();
    }

    const Token& advance() { return tokens_[pos_++]; }

    bool at(Token::Type type) const { return peek().type == type; }

    bool at_ident(const char* word) const {
        return peek().type == Token::Type::Ident && peek().text == word;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        throw ParseError(peek().line, peek().column, expected, peek().describe());
    }

    const Token& expect(Token::Type type, const std::string& expected) {
        if (!at(type)) fail(expected);
        return advance();
    }

    double signed_number(const std::string& what) {
        bool negative = false;
        if (at(Token::Type::Minus)) {
            advance();
            negative = true;
        }
        const Token& token = expect(Token::Type::Number, what);
        return negative ? -token.number : token.number;
    }

    // ---- expression level ----

    ExprPtr parse_expr() {
        ExprPtr left = parse_term();
        while (at(Token::Type::Plus) || at(Token::Type::Minus)) {
            const Token& op = advance();
            ExprPtr right = parse_term();
            left = binop(op.type == Token::Type::Plus ? '+' : '-', left, right, op.span());
        }
        return left;
    }

    ExprPtr parse_term() {
        ExprPtr left = parse_unary();
        while (at(Token::Type::Star) || at(Token::Type::Slash)) {
            const Token& op = advance();
            ExprPtr right = parse_unary();
            left = binop(op.type == Token::Type::Star ? '*' : '/', left, right, op.span());
        }
        return left;
    }

    ExprPtr parse_unary() {
        if (at(Token::Type::Minus)) {
            const Token& minus = advance();
            if (at(Token::Type::Number)) {  // negative literal, not 0 - x
                const Token& num = advance();
                auto node = std::make_shared<BracketExpr>();
                node->kind = BracketExpr::Kind::Scalar;
                node->scalar = -num.number;
                node->span = minus.span();
                return node;
            }
            auto zero = std::make_shared<BracketExpr>();
            zero->kind = BracketExpr::Kind::Scalar;
            zero->scalar = 0.0;
            zero->span = minus.span();
            return binop('-', zero, parse_unary(), minus.span());
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        if (at(Token::Type::Number)) {
            const Token& num = advance();
            auto node = std::make_shared<BracketExpr>();
            node->kind = BracketExpr::Kind::Scalar;
            node->scalar = num.number;
            node->span = num.span();
            return node;
        }
        if (at(Token::Type::LParen)) {
            advance();
            ExprPtr inner = parse_expr();
            expect(Token::Type::RParen, "')'");
            return inner;
        }
        if (at_ident("P")) return parse_bracket();
        if (at_ident("E")) return parse_expect();
        if (at_ident("Var")) return parse_variance();
        if (at_ident("phi")) return parse_charfn();
        fail("a number, 'P(', 'E[', 'Var[', 'phi(', or '('");
    }

    // P(bra | ket) or P(bra | ops | ket)
    ExprPtr parse_bracket() {
        const Token& head = advance();  // P
        expect(Token::Type::LParen, "'('");

        auto node = std::make_shared<BracketExpr>();
        node->kind = BracketExpr::Kind::Bracket;
        node->span = head.span();
        node->bra = parse_event();
        expect(Token::Type::Bar, "'|'");
        if (second_bar_before_close()) {
            node->ops = parse_op_chain();
            expect(Token::Type::Bar, "'|'");
        }
        node->ket = parse_event();
        expect(Token::Type::RParen, "')'");
        return node;
    }

    // E[op], E[op | event], E[op | Y1, Y2, ...]
    ExprPtr parse_expect() {
        const Token& head = advance();  // E
        expect(Token::Type::LBrack, "'['");
        OpExpr inner = parse_op();

        if (at(Token::Type::RBrack)) {
            advance();
            return bracket_omega(inner, nullptr, head.span());
        }
        expect(Token::Type::Bar, "'|'");

        if (comma_before_close()) {
            auto node = std::make_shared<BracketExpr>();
            node->kind = BracketExpr::Kind::Expect;
            node->span = head.span();
            node->inner = inner;
            node->given_rvs.push_back(expect(Token::Type::Ident, "a variable name").text);
            while (at(Token::Type::Comma)) {
                advance();
                node->given_rvs.push_back(expect(Token::Type::Ident, "a variable name").text);
            }
            expect(Token::Type::RBrack, "']'");
            return node;
        }

        EventPtr given = parse_event();
        expect(Token::Type::RBrack, "']'");
        return bracket_omega(inner, given, head.span());
    }

    // Var[X] and Var[X | event] expand to E[X^2] - E[X]^2.
    ExprPtr parse_variance() {
        const Token& head = advance();  // Var
        expect(Token::Type::LBrack, "'['");
        const Token& name = expect(Token::Type::Ident, "an observable name");
        OpExpr plain;
        plain.kind = OpExpr::Kind::Rv;
        plain.name = name.text;
        plain.span = name.span();

        EventPtr given;
        if (at(Token::Type::Bar)) {
            advance();
            given = parse_event();
        }
        expect(Token::Type::RBrack, "']'");

        OpExpr squared = plain;
        squared.kind = OpExpr::Kind::ScalarFn;
        squared.fn = ScalarFnKind::Square;

        ExprPtr mean = bracket_omega(plain, given, head.span());
        return binop('-', bracket_omega(squared, given, head.span()),
                     binop('*', mean, mean, head.span()), head.span());
    }

    ExprPtr parse_charfn() {
        const Token& head = advance();  // phi
        expect(Token::Type::LParen, "'('");
        auto node = std::make_shared<BracketExpr>();
        node->kind = BracketExpr::Kind::CharFn;
        node->span = head.span();
        node->rv_name = expect(Token::Type::Ident, "an observable name").text;
        expect(Token::Type::Comma, "','");
        node->k = signed_number("a frequency");
        expect(Token::Type::RParen, "')'");
        return node;
    }

    // ---- operator chains ----

    std::vector<OpExpr> parse_op_chain() {
        std::vector<OpExpr> ops;
        ops.push_back(parse_op());
        while (at(Token::Type::Ident) || at(Token::Type::Number)) ops.push_back(parse_op());
        return ops;
    }

    OpExpr parse_op() {
        OpExpr op;
        if (at(Token::Type::Number)) {
            const Token& num = advance();
            if (num.number != 1.0) {
                throw ParseError(num.line, num.column,
                                 "the literal 1 (the only numeric operator)", num.describe());
            }
            op.kind = OpExpr::Kind::Identity;
            op.span = num.span();
            return op;
        }
        const Token& name = expect(Token::Type::Ident, "an operator");
        op.span = name.span();
        if (at(Token::Type::LParen)) {
            const auto fn = scalar_fn_by_name(name.text);
            if (!fn) {
                throw ParseError(name.line, name.column,
                                 "a scalar function (id, square, exp, abs)", name.describe());
            }
            advance();
            op.kind = OpExpr::Kind::ScalarFn;
            op.fn = *fn;
            op.name = expect(Token::Type::Ident, "an observable name").text;
            expect(Token::Type::RParen, "')'");
            return op;
        }
        if (name.text.size() > 2 && name.text.rfind("I_", 0) == 0) {
            op.kind = OpExpr::Kind::Indicator;
            op.name = name.text.substr(2);
            return op;
        }
        op.kind = OpExpr::Kind::Rv;
        op.name = name.text;
        return op;
    }

    // ---- events ----

    EventPtr parse_event() {
        EventPtr left = parse_intersection();
        while (at_ident("union")) {
            const Token& op = advance();
            left = event_binop(EventExpr::Kind::Union, left, parse_intersection(), op.span());
        }
        return left;
    }

    EventPtr parse_intersection() {
        EventPtr left = parse_postfix();
        while (at(Token::Type::Amp)) {
            const Token& op = advance();
            left = event_binop(EventExpr::Kind::Intersect, left, parse_postfix(), op.span());
        }
        return left;
    }

    EventPtr parse_postfix() {
        if (at(Token::Type::Tilde)) {
            const Token& op = advance();
            auto node = std::make_shared<EventExpr>();
            node->kind = EventExpr::Kind::Complement;
            node->lhs = parse_postfix();
            node->span = op.span();
            return node;
        }
        return parse_event_atom();
    }

    EventPtr parse_event_atom() {
        if (at(Token::Type::LParen)) {
            advance();
            EventPtr inner = parse_event();
            expect(Token::Type::RParen, "')'");
            return inner;
        }
        const Token& name = expect(Token::Type::Ident, "an event");
        auto node = std::make_shared<EventExpr>();
        node->span = name.span();
        if (name.text == "Omega") {
            node->kind = EventExpr::Kind::Omega;
            return node;
        }
        if (name.text == "union") fail("an event");
        node->name = name.text;
        if (at(Token::Type::At)) {
            advance();
            const Token& time = expect(Token::Type::Number, "a step index");
            if (time.number < 0.0 || time.number != std::floor(time.number)) {
                throw ParseError(time.line, time.column, "a nonnegative integer step",
                                 time.describe());
            }
            node->kind = EventExpr::Kind::ChainAssign;
            node->time = static_cast<std::size_t>(time.number);
            expect(Token::Type::Assign, "'='");
            node->value = signed_number("a value");
            return node;
        }
        if (at(Token::Type::Assign)) {
            advance();
            node->kind = EventExpr::Kind::Assign;
            node->value = signed_number("a value");
            return node;
        }
        node->kind = EventExpr::Kind::Name;
        return node;
    }

    // ---- lookahead helpers ----

    // Is there a `what` token at nesting depth zero before the first
    // unmatched closer ends the current construct?
    bool token_before_close(Token::Type what) const {
        int depth = 0;
        for (std::size_t i = 0; pos_ + i < tokens_.size(); ++i) {
            const Token::Type type = tokens_[pos_ + i].type;
            if (type == Token::Type::LParen || type == Token::Type::LBrack) {
                ++depth;
            } else if (type == Token::Type::RParen || type == Token::Type::RBrack) {
                if (depth == 0) return false;  // the construct's own closer
                --depth;
            } else if (depth == 0 && type == what) {
                return true;
            } else if (type == Token::Type::End) {
                break;
            }
        }
        return false;
    }

    bool second_bar_before_close() const { return token_before_close(Token::Type::Bar); }
    bool comma_before_close() const { return token_before_close(Token::Type::Comma); }

    // ---- node builders ----

    static ExprPtr binop(char op, ExprPtr lhs, ExprPtr rhs, SourceSpan span) {
        auto node = std::make_shared<BracketExpr>();
        node->kind = BracketExpr::Kind::BinOp;
        node->op = op;
        node->lhs = std::move(lhs);
        node->rhs = std::move(rhs);
        node->span = span;
        return node;
    }

    static EventPtr event_binop(EventExpr::Kind kind, EventPtr lhs, EventPtr rhs,
                                SourceSpan span) {
        auto node = std::make_shared<EventExpr>();
        node->kind = kind;
        node->lhs = std::move(lhs);
        node->rhs = std::move(rhs);
        node->span = span;
        return node;
    }

    static ExprPtr bracket_omega(OpExpr op, EventPtr ket, SourceSpan span) {
        auto omega = std::make_shared<EventExpr>();
        omega->kind = EventExpr::Kind::Omega;
        omega->span = span;
        auto node = std::make_shared<BracketExpr>();
        node->kind = BracketExpr::Kind::Bracket;
        node->span = span;
        node->bra = omega;
        node->ops.push_back(std::move(op));
        node->ket = ket ? std::move(ket) : [&] {
            auto k = std::make_shared<EventExpr>();
            k->kind = EventExpr::Kind::Omega;
            k->span = span;
            return k;
        }();
        return node;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

std::string format_double(double v) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, result.ptr);
}

// Event precedence: union = 1, & = 2, ~ = 3, atoms = 4.
int event_prec(const EventExpr& e) {
    switch (e.kind) {
        case EventExpr::Kind::Union: return 1;
        case EventExpr::Kind::Intersect: return 2;
        case EventExpr::Kind::Complement: return 3;
        default: return 4;
    }
}

void print_event_into(const EventExpr& e, int min_prec, std::string& out) {
    const int prec = event_prec(e);
    const bool parens = prec < min_prec;
    if (parens) out += '(';
    switch (e.kind) {
        case EventExpr::Kind::Omega: out += "Omega"; break;
        case EventExpr::Kind::Name: out += e.name; break;
        case EventExpr::Kind::Assign:
            out += e.name;
            out += " = ";
            out += format_double(e.value);
            break;
        case EventExpr::Kind::ChainAssign:
            out += e.name;
            out += '@';
            out += std::to_string(e.time);
            out += " = ";
            out += format_double(e.value);
            break;
        case EventExpr::Kind::Intersect:
            print_event_into(*e.lhs, 2, out);
            out += " & ";
            print_event_into(*e.rhs, 3, out);
            break;
        case EventExpr::Kind::Union:
            print_event_into(*e.lhs, 1, out);
            out += " union ";
            print_event_into(*e.rhs, 2, out);
            break;
        case EventExpr::Kind::Complement:
            out += '~';
            print_event_into(*e.lhs, 3, out);
            break;
    }
    if (parens) out += ')';
}

void print_op_into(const OpExpr& op, std::string& out) {
    switch (op.kind) {
        case OpExpr::Kind::Rv: out += op.name; break;
        case OpExpr::Kind::Indicator:
            out += "I_";
            out += op.name;
            break;
        case OpExpr::Kind::ScalarFn:
            out += scalar_fn_name(op.fn);
            out += '(';
            out += op.name;
            out += ')';
            break;
        case OpExpr::Kind::Identity: out += '1'; break;
    }
}

// Expression precedence: +,- = 1; *,/ = 2; atoms = 3.
int expr_prec(const BracketExpr& e) {
    if (e.kind != BracketExpr::Kind::BinOp) return 3;
    return (e.op == '+' || e.op == '-') ? 1 : 2;
}

void print_expr_into(const BracketExpr& e, int min_prec, std::string& out) {
    const int prec = expr_prec(e);
    const bool parens = prec < min_prec;
    if (parens) out += '(';
    switch (e.kind) {
        case BracketExpr::Kind::Scalar: out += format_double(e.scalar); break;
        case BracketExpr::Kind::Bracket:
            out += "P(";
            print_event_into(*e.bra, 1, out);
            out += " | ";
            if (!e.ops.empty()) {
                for (std::size_t i = 0; i < e.ops.size(); ++i) {
                    if (i > 0) out += ' ';
                    print_op_into(e.ops[i], out);
                }
                out += " | ";
            }
            print_event_into(*e.ket, 1, out);
            out += ')';
            break;
        case BracketExpr::Kind::Expect:
            out += "E[";
            print_op_into(e.inner, out);
            out += " | ";
            for (std::size_t i = 0; i < e.given_rvs.size(); ++i) {
                if (i > 0) out += ", ";
                out += e.given_rvs[i];
            }
            out += ']';
            break;
        case BracketExpr::Kind::CharFn:
            out += "phi(";
            out += e.rv_name;
            out += ", ";
            out += format_double(e.k);
            out += ')';
            break;
        case BracketExpr::Kind::BinOp:
            print_expr_into(*e.lhs, prec, out);
            out += ' ';
            out += e.op;
            out += ' ';
            print_expr_into(*e.rhs, prec + 1, out);
            break;
    }
    if (parens) out += ')';
}

}  // namespace

ExprPtr parse(const std::string& text) { return Parser(text).run(); }

std::string print(const BracketExpr& expr) {
    std::string out;
    print_expr_into(expr, 1, out);
    return out;
}

std::string print(const EventExpr& event) {
    std::string out;
    print_event_into(event, 1, out);
    return out;
}

std::string print(const OpExpr& op) {
    std::string out;
    print_op_into(op, out);
    return out;
}

bool equals(const EventExpr& a, const EventExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case EventExpr::Kind::Omega: return true;
        case EventExpr::Kind::Name: return a.name == b.name;
        case EventExpr::Kind::Assign: return a.name == b.name && a.value == b.value;
        case EventExpr::Kind::ChainAssign:
            return a.name == b.name && a.time == b.time && a.value == b.value;
        case EventExpr::Kind::Intersect:
        case EventExpr::Kind::Union:
            return equals(*a.lhs, *b.lhs) && equals(*a.rhs, *b.rhs);
        case EventExpr::Kind::Complement: return equals(*a.lhs, *b.lhs);
    }
    return false;
}

bool equals(const OpExpr& a, const OpExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case OpExpr::Kind::Rv:
        case OpExpr::Kind::Indicator: return a.name == b.name;
        case OpExpr::Kind::ScalarFn: return a.fn == b.fn && a.name == b.name;
        case OpExpr::Kind::Identity: return true;
    }
    return false;
}

bool equals(const BracketExpr& a, const BracketExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case BracketExpr::Kind::Scalar: return a.scalar == b.scalar;
        case BracketExpr::Kind::Bracket: {
            if (a.ops.size() != b.ops.size()) return false;
            for (std::size_t i = 0; i < a.ops.size(); ++i) {
                if (!equals(a.ops[i], b.ops[i])) return false;
            }
            return equals(*a.bra, *b.bra) && equals(*a.ket, *b.ket);
        }
        case BracketExpr::Kind::Expect:
            return equals(a.inner, b.inner) && a.given_rvs == b.given_rvs;
        case BracketExpr::Kind::CharFn: return a.rv_name == b.rv_name && a.k == b.k;
        case BracketExpr::Kind::BinOp:
            return a.op == b.op && equals(*a.lhs, *b.lhs) && equals(*a.rhs, *b.rhs);
    }
    return false;
}

}  // namespace pbn::lang
