#pragma once

#include <memory>
#include <string>

namespace mcflab {

namespace detail {
struct ExprNode;
}

// Arithmetic expression of the point coordinates, used for conformal
// exponents (metric.phi) and custom implicit shapes.  Supported syntax:
// numbers, x, y, r (= hypot(x,y)), pi, e, + - * / ^, parentheses, and the
// functions sin cos tan exp log sqrt abs sinh cosh tanh atanh atan hypot
// min max pow (the last three take two arguments).
class Expr {
public:
    explicit Expr(const std::string& text);  // throws ParseError
    Expr(const Expr&);
    Expr& operator=(const Expr&);
    Expr(Expr&&) noexcept;
    Expr& operator=(Expr&&) noexcept;
    ~Expr();

    double eval(double x, double y) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
    std::shared_ptr<const detail::ExprNode> root_;
};

}  // namespace mcflab
