#pragma once

// Arithmetic expressions of (x, y) used for coefficients and loads in run configs.
//
// Grammar (precedence high to low, ^ binds tighter than unary minus):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | ln | sqrt | abs

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dpgec/error.hpp"

namespace dpgec::expr {

enum class Op {
    number, var_x, var_y, pi,
    add, sub, mul, div, pow, neg,
    sin, cos, exp, ln, sqrt, abs,
};

struct Node {
    Op op{};
    double value{};  // literal value for Op::number
    int lhs{-1};
    int rhs{-1};
    std::size_t pos{};  // source offset of the token that produced the node
};

class ParseError : public Error {
public:
    ParseError(std::size_t pos, const std::string& what)
        : Error("expr_syntax", "syntax error at position " + std::to_string(pos) + ": " + what),
          pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

class DomainError : public Error {
public:
    DomainError(std::size_t pos, const std::string& what)
        : Error("expr_domain", "domain error at position " + std::to_string(pos) + ": " + what),
          pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

/// Immutable parsed expression tree stored as a flat node array.
class Expr {
public:
    Expr() = default;

    double eval(double x, double y) const { return eval_node(root_, x, y); }
    double operator()(double x, double y) const { return eval(x, y); }

    const std::vector<Node>& nodes() const { return nodes_; }
    int root() const { return root_; }
    const std::string& source() const { return source_; }

    bool depends_on_xy() const {
        for (const auto& n : nodes_)
            if (n.op == Op::var_x || n.op == Op::var_y) return true;
        return false;
    }

    friend Expr parse(std::string_view text);

private:
    double eval_node(int i, double x, double y) const {
        const Node& n = nodes_[i];
        switch (n.op) {
            case Op::number: return n.value;
            case Op::var_x: return x;
            case Op::var_y: return y;
            case Op::pi: return std::numbers::pi;
            case Op::add: return eval_node(n.lhs, x, y) + eval_node(n.rhs, x, y);
            case Op::sub: return eval_node(n.lhs, x, y) - eval_node(n.rhs, x, y);
            case Op::mul: return eval_node(n.lhs, x, y) * eval_node(n.rhs, x, y);
            case Op::div: {
                const double num = eval_node(n.lhs, x, y);
                const double den = eval_node(n.rhs, x, y);
                if (den == 0.0) throw DomainError(n.pos, "division by zero");
                return num / den;
            }
            case Op::pow: {
                const double b = eval_node(n.lhs, x, y);
                const double e = eval_node(n.rhs, x, y);
                if (b == 0.0 && e < 0.0) throw DomainError(n.pos, "zero to a negative power");
                if (b < 0.0 && e != std::floor(e))
                    throw DomainError(n.pos, "negative base with non-integer exponent");
                return std::pow(b, e);
            }
            case Op::neg: return -eval_node(n.lhs, x, y);
            case Op::sin: return std::sin(eval_node(n.lhs, x, y));
            case Op::cos: return std::cos(eval_node(n.lhs, x, y));
            case Op::exp: return std::exp(eval_node(n.lhs, x, y));
            case Op::ln: {
                const double a = eval_node(n.lhs, x, y);
                if (!(a > 0.0)) throw DomainError(n.pos, "ln of non-positive value");
                return std::log(a);
            }
            case Op::sqrt: {
                const double a = eval_node(n.lhs, x, y);
                if (a < 0.0) throw DomainError(n.pos, "sqrt of negative value");
                return std::sqrt(a);
            }
            case Op::abs: return std::abs(eval_node(n.lhs, x, y));
        }
        return 0.0;
    }

    std::vector<Node> nodes_;
    int root_{-1};
    std::string source_;
};

namespace detail {

struct Function {
    std::string_view name;
    Op op;
};

inline constexpr std::array<Function, 6> kFunctions{{
    {"sin", Op::sin}, {"cos", Op::cos}, {"exp", Op::exp},
    {"ln", Op::ln}, {"sqrt", Op::sqrt}, {"abs", Op::abs},
}};

class Parser {
public:
    Parser(std::string_view text, std::vector<Node>& nodes) : s_(text), nodes_(nodes) {}

    int parse_all() {
        skip();
        if (at_end()) throw ParseError(i_, "empty expression");
        int root = parse_expr();
        skip();
        if (!at_end()) throw ParseError(i_, std::string("unexpected '") + s_[i_] + "'");
        return root;
    }

private:
    bool at_end() const { return i_ >= s_.size(); }
    void skip() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool accept(char c) {
        skip();
        if (!at_end() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    int add(Op op, std::size_t pos, int lhs = -1, int rhs = -1, double value = 0.0) {
        nodes_.push_back({op, value, lhs, rhs, pos});
        return static_cast<int>(nodes_.size()) - 1;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            skip();
            const std::size_t pos = i_;
            if (accept('+')) lhs = add(Op::add, pos, lhs, parse_term());
            else if (accept('-')) lhs = add(Op::sub, pos, lhs, parse_term());
            else return lhs;
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            skip();
            const std::size_t pos = i_;
            if (accept('*')) lhs = add(Op::mul, pos, lhs, parse_unary());
            else if (accept('/')) lhs = add(Op::div, pos, lhs, parse_unary());
            else return lhs;
        }
    }

    int parse_unary() {
        skip();
        const std::size_t pos = i_;
        if (accept('-')) return add(Op::neg, pos, parse_unary());
        return parse_power();
    }

    int parse_power() {
        int base = parse_primary();
        skip();
        const std::size_t pos = i_;
        if (accept('^')) return add(Op::pow, pos, base, parse_unary());
        return base;
    }

    int parse_primary() {
        skip();
        if (at_end()) throw ParseError(i_, "unexpected end of input");
        const std::size_t pos = i_;
        const char c = s_[i_];
        if (c == '(') {
            ++i_;
            int inner = parse_expr();
            if (!accept(')')) throw ParseError(i_, "expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            while (j < s_.size() && std::isalnum(static_cast<unsigned char>(s_[j]))) ++j;
            const std::string_view id = s_.substr(i_, j - i_);
            i_ = j;
            if (id == "x") return add(Op::var_x, pos);
            if (id == "y") return add(Op::var_y, pos);
            if (id == "pi") return add(Op::pi, pos);
            for (const auto& f : kFunctions) {
                if (id != f.name) continue;
                if (!accept('(')) throw ParseError(i_, "expected '(' after " + std::string(id));
                int arg = parse_expr();
                if (!accept(')')) throw ParseError(i_, "expected ')'");
                return add(f.op, pos, arg);
            }
            throw ParseError(pos, "unknown identifier '" + std::string(id) + "'");
        }
        throw ParseError(pos, std::string("unexpected '") + c + "'");
    }

    int parse_number() {
        const std::size_t pos = i_;
        // Scan the maximal numeric token: digits, one '.', optional exponent.
        std::size_t j = i_;
        while (j < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[j])) || s_[j] == '.')) ++j;
        if (j < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
            std::size_t k = j + 1;
            if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
            if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
                while (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) ++k;
                j = k;
            }
        }
        double v = 0.0;
        const char* first = s_.data() + i_;
        const char* last = s_.data() + j;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) throw ParseError(pos, "malformed number");
        i_ = j;
        return add(Op::number, pos, -1, -1, v);
    }

    std::string_view s_;
    std::vector<Node>& nodes_;
    std::size_t i_{0};
};

}  // namespace detail

inline Expr parse(std::string_view text) {
    Expr e;
    e.source_ = std::string(text);
    detail::Parser p(e.source_, e.nodes_);
    e.root_ = p.parse_all();
    return e;
}

namespace detail {

inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

inline const char* function_name(Op op) {
    for (const auto& f : kFunctions)
        if (f.op == op) return f.name.data();
    return "?";
}

inline void unparse_node(const Expr& e, int i, std::string& out) {
    const Node& n = e.nodes()[i];
    auto binary = [&](const char* sym) {
        out += '(';
        unparse_node(e, n.lhs, out);
        out += sym;
        unparse_node(e, n.rhs, out);
        out += ')';
    };
    switch (n.op) {
        case Op::number: out += format_number(n.value); break;
        case Op::var_x: out += 'x'; break;
        case Op::var_y: out += 'y'; break;
        case Op::pi: out += "pi"; break;
        case Op::add: binary(" + "); break;
        case Op::sub: binary(" - "); break;
        case Op::mul: binary(" * "); break;
        case Op::div: binary(" / "); break;
        case Op::pow: binary(" ^ "); break;
        case Op::neg:
            out += "(-";
            unparse_node(e, n.lhs, out);
            out += ')';
            break;
        default:
            out += function_name(n.op);
            out += '(';
            unparse_node(e, n.lhs, out);
            out += ')';
            break;
    }
}

inline bool same_tree(const Expr& a, int i, const Expr& b, int j) {
    const Node& x = a.nodes()[i];
    const Node& y = b.nodes()[j];
    if (x.op != y.op) return false;
    if (x.op == Op::number) return x.value == y.value;
    if ((x.lhs < 0) != (y.lhs < 0) || (x.rhs < 0) != (y.rhs < 0)) return false;
    if (x.lhs >= 0 && !same_tree(a, x.lhs, b, y.lhs)) return false;
    if (x.rhs >= 0 && !same_tree(a, x.rhs, b, y.rhs)) return false;
    return true;
}

}  // namespace detail

/// Fully parenthesized text that parses back to the same tree.
inline std::string unparse(const Expr& e) {
    std::string out;
    detail::unparse_node(e, e.root(), out);
    return out;
}

/// Structural equality (source positions ignored).
inline bool equivalent(const Expr& a, const Expr& b) {
    return detail::same_tree(a, a.root(), b, b.root());
}

inline double eval(const Expr& e, double x, double y) { return e.eval(x, y); }

}  // namespace dpgec::expr
