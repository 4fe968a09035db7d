#pragma once

#include <string>

#include "pbn/ast.hpp"
#include "pbn/error.hpp"

namespace pbn::lang {

// Parse failure at a definite position; `expected` describes what the parser
// would have accepted there.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, std::size_t column, const std::string& expected,
               const std::string& found);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& expected() const { return expected_; }

  private:
    std::size_t line_;
    std::size_t column_;
    std::string expected_;
};

// Text -> AST. Whitespace-insensitive; "E[...]"/"Var[...]" expand to
// brackets here.
ExprPtr parse(const std::string& text);

// AST -> canonical text. parse(print(e)) is structurally equal to e.
std::string print(const BracketExpr& expr);
std::string print(const EventExpr& event);
std::string print(const OpExpr& op);

}  // namespace pbn::lang
