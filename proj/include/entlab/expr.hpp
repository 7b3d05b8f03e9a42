#pragma once

#include <memory>
#include <string>
#include <vector>

namespace entlab {
namespace expr {

// Small arithmetic-expression parser: operators + - * / ^, unary minus,
// functions sin, cos, sqrt, abs, pos (positive part), numeric literals,
// and a caller-declared variable list. Parsing errors throw
// std::invalid_argument with position information.
class Expression {
  public:
    Expression(const std::string& source, std::vector<std::string> variables);
    Expression(const Expression&) = delete;
    Expression(Expression&&) noexcept;
    ~Expression();

    double eval(const std::vector<double>& values) const;
    const std::string& source() const { return src_; }

    struct Node;

  private:
    std::unique_ptr<Node> root_;
    std::string src_;
    std::size_t nvars_;
};

}  // namespace expr
}  // namespace entlab
