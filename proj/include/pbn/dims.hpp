#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbn/rational.hpp"

namespace pbn {

// Physical dimension as an exact exponent triple over length, time, mass.
// Half-integer exponents occur (base kets scale as axis^{-1/2}), hence
// rational arithmetic rather than integers.
struct Dimension {
    Rational L;
    Rational T;
    Rational M;

    static Dimension dimensionless() { return {}; }
    static Dimension length() { return {1, 0, 0}; }
    static Dimension time() { return {0, 1, 0}; }
    static Dimension mass() { return {0, 0, 1}; }

    friend Dimension operator*(const Dimension& a, const Dimension& b) {
        return {a.L + b.L, a.T + b.T, a.M + b.M};
    }
    friend Dimension operator/(const Dimension& a, const Dimension& b) {
        return {a.L - b.L, a.T - b.T, a.M - b.M};
    }
    Dimension pow(const Rational& e) const { return {L * e, T * e, M * e}; }
    Dimension inverse() const { return {-L, -T, -M}; }

    friend bool operator==(const Dimension& a, const Dimension& b) {
        return a.L == b.L && a.T == b.T && a.M == b.M;
    }

    bool is_dimensionless() const { return L.is_zero() && T.is_zero() && M.is_zero(); }

    // "L T^-1/2", "M^-1 L^-1 T", or "1" when dimensionless.
    std::string to_string() const;
};

// Named dimension assignments for axes and model parameters. The checker
// never infers dimensions; everything is declared up front.
class DimDeclaration {
  public:
    void declare(const std::string& name, Dimension dim) { entries_[name] = dim; }

    std::optional<Dimension> find(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    // Lookup that fails loudly on missing names.
    Dimension require(const std::string& name) const;

    const std::map<std::string, Dimension>& entries() const { return entries_; }

  private:
    std::map<std::string, Dimension> entries_;
};

// Structural object kinds with fixed dimension rules. A base ket over axes
// (x, y) carries [dx dy]^{-1/2}; densities carry the inverse volume; the
// system bra/ket pair splits the volume symmetrically so (Omega|Omega) stays
// dimensionless. Discrete masses and macro-event probabilities carry nothing.
enum class EntityKind {
    BaseKet,
    BaseBra,
    SystemKet,
    SystemBra,
    Density,
    Delta,
    MacroProbability,
    DiscreteMass,
    Named,
};

struct DimEntity {
    EntityKind kind = EntityKind::Named;
    std::vector<std::string> axes;  // continuous axes the object spans
    std::string name;               // only for Named
};

Dimension dim_of(const DimEntity& entity, const DimDeclaration& decl);

// Dimension of a product/quotient expression over declared names and the
// structural forms ket(...), bra(...), density(...), delta(axis), with
// rational powers. A sum is well-formed only when all addends agree.
Dimension eval_dim_expr(const std::string& text, const DimDeclaration& decl);

struct DimCheckResult {
    bool pass = false;
    std::optional<Dimension> lhs;  // absent when the side itself is inconsistent
    std::optional<Dimension> rhs;
    std::string detail;  // per-base exponent differences, or the sum mismatch
};

DimCheckResult check_formula(const std::string& lhs, const std::string& rhs,
                             const DimDeclaration& decl);

// Splits "lhs == rhs" and delegates to check_formula.
DimCheckResult check_equation(const std::string& equation, const DimDeclaration& decl);

}  // namespace pbn
