#include "pbn/dims.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace pbn {

std::string Dimension::to_string() const {
    if (is_dimensionless()) return "1";
    std::ostringstream os;
    bool first = true;
    auto emit = [&](const char* base, const Rational& e) {
        if (e.is_zero()) return;
        if (!first) os << " ";
        first = false;
        os << base;
        if (!(e == Rational(1))) os << "^" << e.to_string();
    };
    emit("L", L);
    emit("T", T);
    emit("M", M);
    return os.str();
}

Dimension DimDeclaration::require(const std::string& name) const {
    auto found = find(name);
    if (found) return *found;
    // The base symbols are always available unless shadowed by a declaration.
    if (name == "L") return Dimension::length();
    if (name == "T") return Dimension::time();
    if (name == "M") return Dimension::mass();
    if (name == "one") return Dimension::dimensionless();
    throw Error(ErrorCode::UndeclaredAxis, "'" + name + "' has no declared dimension");
}

namespace {

Dimension axis_product(const std::vector<std::string>& axes, const DimDeclaration& decl) {
    Dimension product = Dimension::dimensionless();
    for (const auto& axis : axes) product = product * decl.require(axis);
    return product;
}

}  // namespace

Dimension dim_of(const DimEntity& entity, const DimDeclaration& decl) {
    switch (entity.kind) {
        case EntityKind::BaseKet:
        case EntityKind::BaseBra:
        case EntityKind::SystemKet:
            return axis_product(entity.axes, decl).pow(Rational(-1, 2));
        case EntityKind::SystemBra:
            return axis_product(entity.axes, decl).pow(Rational(1, 2));
        case EntityKind::Density:
            return axis_product(entity.axes, decl).inverse();
        case EntityKind::Delta:
            if (entity.axes.size() != 1) {
                throw Error(ErrorCode::BadDimensionExpr, "delta takes exactly one axis");
            }
            return decl.require(entity.axes.front()).inverse();
        case EntityKind::MacroProbability:
        case EntityKind::DiscreteMass:
            return Dimension::dimensionless();
        case EntityKind::Named:
            return decl.require(entity.name);
    }
    throw Error(ErrorCode::BadDimensionExpr, "unknown entity kind");
}

namespace {

// Raised when the addends of a sum disagree; carries both sides so the
// check result can show the conflict instead of a bare parse error.
struct SumMismatch {
    Dimension left;
    Dimension right;
};

class DimExprParser {
  public:
    DimExprParser(const std::string& text, const DimDeclaration& decl)
        : text_(text), decl_(decl) {}

    Dimension parse() {
        Dimension d = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected trailing input");
        }
        return d;
    }

  private:
    [[noreturn]] void fail(const std::string& why) const {
        std::ostringstream os;
        os << why << " at offset " << pos_ << " in '" << text_ << "'";
        throw Error(ErrorCode::BadDimensionExpr, os.str());
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Dimension parse_sum() {
        Dimension first = parse_product();
        while (true) {
            const char op = peek();
            if (op == '+' || op == '-') {
                ++pos_;
                Dimension next = parse_product();
                if (!(next == first)) throw SumMismatch{first, next};
            } else {
                return first;
            }
        }
    }

    Dimension parse_product() {
        Dimension d = parse_power();
        while (true) {
            if (eat('*')) {
                d = d * parse_power();
            } else if (eat('/')) {
                d = d / parse_power();
            } else {
                return d;
            }
        }
    }

    Dimension parse_power() {
        Dimension base = parse_atom();
        if (eat('^')) return base.pow(parse_exponent());
        return base;
    }

    Rational parse_exponent() {
        skip_ws();
        if (eat('(')) {
            const Rational r = parse_rational();
            if (!eat(')')) fail("expected ')' after exponent");
            return r;
        }
        return parse_rational();
    }

    Rational parse_rational() {
        const long long num = parse_integer();
        if (eat('/')) {
            const long long den = parse_integer();
            return Rational(num, den);
        }
        return Rational(num);
    }

    long long parse_integer() {
        skip_ws();
        bool negative = false;
        if (eat('-')) negative = true;
        skip_ws();
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            fail("expected integer");
        }
        long long value = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            value = value * 10 + (text_[pos_] - '0');
            ++pos_;
        }
        return negative ? -value : value;
    }

    Dimension parse_atom() {
        skip_ws();
        if (eat('(')) {
            Dimension d = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return d;
        }
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            // Numeric literals are dimensionless scale factors.
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
                ++pos_;
            }
            return Dimension::dimensionless();
        }
        const std::string name = parse_name();
        if (name.empty()) fail("expected name, number, or '('");

        if (peek() == '(' &&
            (name == "ket" || name == "bra" || name == "density" || name == "delta")) {
            const std::vector<std::string> axes = parse_axis_list();
            DimEntity entity;
            entity.axes = axes;
            if (name == "ket") entity.kind = EntityKind::BaseKet;
            if (name == "bra") entity.kind = EntityKind::BaseBra;
            if (name == "density") entity.kind = EntityKind::Density;
            if (name == "delta") entity.kind = EntityKind::Delta;
            return dim_of(entity, decl_);
        }
        return decl_.require(name);
    }

    std::vector<std::string> parse_axis_list() {
        if (!eat('(')) fail("expected '('");
        std::vector<std::string> axes;
        do {
            skip_ws();
            const std::string axis = parse_name();
            if (axis.empty()) fail("expected axis name");
            axes.push_back(axis);
        } while (eat(','));
        if (!eat(')')) fail("expected ')' after axis list");
        return axes;
    }

    std::string parse_name() {
        skip_ws();
        std::string out;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
                if (out.empty() && std::isdigit(static_cast<unsigned char>(c))) break;
                out += c;
                ++pos_;
            } else {
                break;
            }
        }
        return out;
    }

    const std::string& text_;
    const DimDeclaration& decl_;
    std::size_t pos_ = 0;
};

std::string diff_detail(const Dimension& a, const Dimension& b) {
    const Dimension d = a / b;
    std::ostringstream os;
    bool first = true;
    auto emit = [&](const char* base, const Rational& e) {
        if (e.is_zero()) return;
        if (!first) os << ", ";
        first = false;
        os << "delta " << base << " = " << e.to_string();
    };
    emit("L", d.L);
    emit("T", d.T);
    emit("M", d.M);
    return os.str();
}

}  // namespace

Dimension eval_dim_expr(const std::string& text, const DimDeclaration& decl) {
    try {
        return DimExprParser(text, decl).parse();
    } catch (const SumMismatch& mismatch) {
        throw Error(ErrorCode::BadDimensionExpr,
                    "addends differ: " + mismatch.left.to_string() + " vs " +
                        mismatch.right.to_string() + " (" +
                        diff_detail(mismatch.left, mismatch.right) + ")");
    }
}

DimCheckResult check_formula(const std::string& lhs, const std::string& rhs,
                             const DimDeclaration& decl) {
    DimCheckResult result;
    try {
        result.lhs = DimExprParser(lhs, decl).parse();
    } catch (const SumMismatch& m) {
        result.detail = "lhs addends differ: " + diff_detail(m.left, m.right);
        return result;
    }
    try {
        result.rhs = DimExprParser(rhs, decl).parse();
    } catch (const SumMismatch& m) {
        result.detail = "rhs addends differ: " + diff_detail(m.left, m.right);
        return result;
    }
    result.pass = (*result.lhs == *result.rhs);
    if (!result.pass) result.detail = diff_detail(*result.lhs, *result.rhs);
    return result;
}

DimCheckResult check_equation(const std::string& equation, const DimDeclaration& decl) {
    const auto split = equation.find("==");
    if (split == std::string::npos) {
        throw Error(ErrorCode::BadDimensionExpr, "expected 'lhs == rhs' in '" + equation + "'");
    }
    return check_formula(equation.substr(0, split), equation.substr(split + 2), decl);
}

}  // namespace pbn
