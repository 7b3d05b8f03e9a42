#include "entlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace entlab {
namespace expr {

enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Sqrt, Abs, Pos };

struct Expression::Node {
    Kind kind;
    double value = 0.0;
    std::size_t var = 0;
    std::unique_ptr<Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

struct Parser {
    const std::string& s;
    const std::vector<std::string>& vars;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("expression error at position " +
                                    std::to_string(pos) + ": " + what);
    }

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }

    NodePtr make(Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
        auto n = std::make_unique<Node>();
        n->kind = k;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    NodePtr parse_expr() {
        auto n = parse_term();
        for (;;) {
            if (eat('+'))
                n = make(Kind::Add, std::move(n), parse_term());
            else if (eat('-'))
                n = make(Kind::Sub, std::move(n), parse_term());
            else
                return n;
        }
    }

    NodePtr parse_term() {
        auto n = parse_unary();
        for (;;) {
            if (eat('*'))
                n = make(Kind::Mul, std::move(n), parse_unary());
            else if (eat('/'))
                n = make(Kind::Div, std::move(n), parse_unary());
            else
                return n;
        }
    }

    NodePtr parse_unary() {
        if (eat('-')) return make(Kind::Neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        auto n = parse_primary();
        if (eat('^')) return make(Kind::Pow, std::move(n), parse_unary());
        return n;
    }

    NodePtr parse_primary() {
        skip();
        if (pos >= s.size()) fail("unexpected end of input");
        const char c = s[pos];
        if (c == '(') {
            ++pos;
            auto n = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const double v = std::strtod(s.c_str() + pos, &end);
            if (end == s.c_str() + pos) fail("bad number");
            pos = static_cast<std::size_t>(end - s.c_str());
            auto n = make(Kind::Const);
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            const std::string name = s.substr(start, pos - start);
            if (peek() == '(') {
                Kind k;
                if (name == "sin")
                    k = Kind::Sin;
                else if (name == "cos")
                    k = Kind::Cos;
                else if (name == "sqrt")
                    k = Kind::Sqrt;
                else if (name == "abs")
                    k = Kind::Abs;
                else if (name == "pos")
                    k = Kind::Pos;
                else
                    fail("unknown function '" + name + "'");
                eat('(');
                auto arg = parse_expr();
                if (!eat(')')) fail("expected ')' after function argument");
                return make(k, std::move(arg));
            }
            if (name == "pi") {
                auto n = make(Kind::Const);
                n->value = M_PI;
                return n;
            }
            for (std::size_t i = 0; i < vars.size(); ++i)
                if (vars[i] == name) {
                    auto n = make(Kind::Var);
                    n->var = i;
                    return n;
                }
            fail("unknown variable '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

double eval_node(const Node* n, const std::vector<double>& v) {
    switch (n->kind) {
        case Kind::Const: return n->value;
        case Kind::Var: return v[n->var];
        case Kind::Add: return eval_node(n->lhs.get(), v) + eval_node(n->rhs.get(), v);
        case Kind::Sub: return eval_node(n->lhs.get(), v) - eval_node(n->rhs.get(), v);
        case Kind::Mul: return eval_node(n->lhs.get(), v) * eval_node(n->rhs.get(), v);
        case Kind::Div: return eval_node(n->lhs.get(), v) / eval_node(n->rhs.get(), v);
        case Kind::Pow:
            return std::pow(eval_node(n->lhs.get(), v), eval_node(n->rhs.get(), v));
        case Kind::Neg: return -eval_node(n->lhs.get(), v);
        case Kind::Sin: return std::sin(eval_node(n->lhs.get(), v));
        case Kind::Cos: return std::cos(eval_node(n->lhs.get(), v));
        case Kind::Sqrt: return std::sqrt(eval_node(n->lhs.get(), v));
        case Kind::Abs: return std::abs(eval_node(n->lhs.get(), v));
        case Kind::Pos: return std::max(eval_node(n->lhs.get(), v), 0.0);
    }
    return 0.0;
}

}  // namespace

Expression::Expression(const std::string& source, std::vector<std::string> variables)
    : src_(source), nvars_(variables.size()) {
    Parser p{source, variables};
    root_ = p.parse_expr();
    p.skip();
    if (p.pos != source.size()) p.fail("trailing input");
}

Expression::Expression(Expression&&) noexcept = default;
Expression::~Expression() = default;

double Expression::eval(const std::vector<double>& values) const {
    if (values.size() != nvars_)
        throw std::invalid_argument("expression: wrong number of variable values");
    return eval_node(root_.get(), values);
}

}  // namespace expr
}  // namespace entlab
