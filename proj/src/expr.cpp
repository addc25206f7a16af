#include "mcflab/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

#include "mcflab/errors.hpp"

namespace mcflab {
namespace detail {

enum class Op {
    Const, VarX, VarY, VarR,
    Add, Sub, Mul, Div, Pow, Neg,
    Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Sinh, Cosh, Tanh, Atanh, Atan,
    Hypot, Min, Max
};

struct ExprNode {
    Op op;
    double value = 0.0;
    std::shared_ptr<const ExprNode> a, b;

    double eval(double x, double y) const {
        switch (op) {
            case Op::Const: return value;
            case Op::VarX: return x;
            case Op::VarY: return y;
            case Op::VarR: return std::hypot(x, y);
            case Op::Add: return a->eval(x, y) + b->eval(x, y);
            case Op::Sub: return a->eval(x, y) - b->eval(x, y);
            case Op::Mul: return a->eval(x, y) * b->eval(x, y);
            case Op::Div: return a->eval(x, y) / b->eval(x, y);
            case Op::Pow: return std::pow(a->eval(x, y), b->eval(x, y));
            case Op::Neg: return -a->eval(x, y);
            case Op::Sin: return std::sin(a->eval(x, y));
            case Op::Cos: return std::cos(a->eval(x, y));
            case Op::Tan: return std::tan(a->eval(x, y));
            case Op::Exp: return std::exp(a->eval(x, y));
            case Op::Log: return std::log(a->eval(x, y));
            case Op::Sqrt: return std::sqrt(a->eval(x, y));
            case Op::Abs: return std::abs(a->eval(x, y));
            case Op::Sinh: return std::sinh(a->eval(x, y));
            case Op::Cosh: return std::cosh(a->eval(x, y));
            case Op::Tanh: return std::tanh(a->eval(x, y));
            case Op::Atanh: return std::atanh(a->eval(x, y));
            case Op::Atan: return std::atan(a->eval(x, y));
            case Op::Hypot: return std::hypot(a->eval(x, y), b->eval(x, y));
            case Op::Min: return std::min(a->eval(x, y), b->eval(x, y));
            case Op::Max: return std::max(a->eval(x, y), b->eval(x, y));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    n->value = v;
    return n;
}

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw ParseError("expression \"" + s + "\" at offset " +
                         std::to_string(pos) + ": " + what);
    }

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos != s.size()) fail("trailing characters");
        return e;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) lhs = make(Op::Add, lhs, term());
            else if (eat('-')) lhs = make(Op::Sub, lhs, term());
            else return lhs;
        }
    }
    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (eat('*')) lhs = make(Op::Mul, lhs, factor());
            else if (eat('/')) lhs = make(Op::Div, lhs, factor());
            else return lhs;
        }
    }
    NodePtr factor() {
        NodePtr base = unary();
        if (eat('^')) return make(Op::Pow, base, factor());  // right associative
        return base;
    }
    NodePtr unary() {
        if (eat('-')) return make(Op::Neg, unary());
        if (eat('+')) return unary();
        return primary();
    }
    NodePtr primary() {
        skip();
        if (pos >= s.size()) fail("unexpected end of expression");
        char c = s[pos];
        if (std::isdigit((unsigned char)c) || c == '.') return number();
        if (std::isalpha((unsigned char)c) || c == '_') return ident();
        if (eat('(')) {
            NodePtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        fail("unexpected character");
    }
    NodePtr number() {
        size_t end = pos;
        while (end < s.size() &&
               (std::isdigit((unsigned char)s[end]) || s[end] == '.' ||
                s[end] == 'e' || s[end] == 'E' ||
                ((s[end] == '+' || s[end] == '-') && end > pos &&
                 (s[end - 1] == 'e' || s[end - 1] == 'E'))))
            ++end;
        double v;
        try {
            v = std::stod(s.substr(pos, end - pos));
        } catch (const std::exception&) {
            fail("bad number literal");
        }
        pos = end;
        return make(Op::Const, nullptr, nullptr, v);
    }
    NodePtr ident() {
        size_t end = pos;
        while (end < s.size() &&
               (std::isalnum((unsigned char)s[end]) || s[end] == '_'))
            ++end;
        std::string name = s.substr(pos, end - pos);
        pos = end;
        if (name == "x") return make(Op::VarX);
        if (name == "y") return make(Op::VarY);
        if (name == "r") return make(Op::VarR);
        if (name == "pi") return make(Op::Const, nullptr, nullptr, M_PI);
        if (name == "e") return make(Op::Const, nullptr, nullptr, M_E);

        static const std::vector<std::pair<std::string, Op>> unary_fns = {
            {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan},
            {"exp", Op::Exp},   {"log", Op::Log},   {"ln", Op::Log},
            {"sqrt", Op::Sqrt}, {"abs", Op::Abs},   {"sinh", Op::Sinh},
            {"cosh", Op::Cosh}, {"tanh", Op::Tanh}, {"atanh", Op::Atanh},
            {"artanh", Op::Atanh}, {"atan", Op::Atan}};
        static const std::vector<std::pair<std::string, Op>> binary_fns = {
            {"hypot", Op::Hypot}, {"min", Op::Min}, {"max", Op::Max},
            {"pow", Op::Pow}};

        for (const auto& [fname, op] : unary_fns) {
            if (name == fname) {
                if (!eat('(')) fail("expected '(' after " + name);
                NodePtr a = expr();
                if (!eat(')')) fail("expected ')'");
                return make(op, a);
            }
        }
        for (const auto& [fname, op] : binary_fns) {
            if (name == fname) {
                if (!eat('(')) fail("expected '(' after " + name);
                NodePtr a = expr();
                if (!eat(',')) fail("expected ','");
                NodePtr b = expr();
                if (!eat(')')) fail("expected ')'");
                return make(op, a, b);
            }
        }
        fail("unknown identifier '" + name + "'");
    }
};

}  // namespace
}  // namespace detail

Expr::Expr(const std::string& text) : text_(text) {
    detail::Parser p(text);
    root_ = p.parse();
}
Expr::Expr(const Expr&) = default;
Expr& Expr::operator=(const Expr&) = default;
Expr::Expr(Expr&&) noexcept = default;
Expr& Expr::operator=(Expr&&) noexcept = default;
Expr::~Expr() = default;

double Expr::eval(double x, double y) const { return root_->eval(x, y); }

}  // namespace mcflab
