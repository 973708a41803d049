#include "varipade/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "varipade/error.hpp"

namespace varipade {

IntegrandExpr::IntegrandExpr(std::vector<Node> nodes, int root)
    : nodes_(std::make_shared<const std::vector<Node>>(std::move(nodes))), root_(root) {}

namespace {

using Op = IntegrandExpr::Op;
using Node = IntegrandExpr::Node;

bool is_unary(Op op) {
    return op == Op::neg || op == Op::sqrt || op == Op::sin || op == Op::cos || op == Op::exp;
}

const char* function_name(Op op) {
    switch (op) {
        case Op::sqrt: return "sqrt";
        case Op::sin: return "sin";
        case Op::cos: return "cos";
        case Op::exp: return "exp";
        default: return "?";
    }
}

char binary_symbol(Op op) {
    switch (op) {
        case Op::add: return '+';
        case Op::sub: return '-';
        case Op::mul: return '*';
        case Op::div: return '/';
        case Op::pow: return '^';
        default: return '?';
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    IntegrandExpr parse() {
        int root = parse_expr();
        skip_space();
        if (pos_ != text_.size()) throw SyntaxError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
        return IntegrandExpr(std::move(nodes_), root);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<Node> nodes_;

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) throw SyntaxError(std::string("expected '") + c + "' but input ended", pos_);
            throw SyntaxError(std::string("expected '") + c + "'", pos_);
        }
    }

    int push(Node n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    int make_unary(Op op, int operand) {
        Node n;
        n.op = op;
        n.lhs = operand;
        n.has_variables = nodes_[static_cast<std::size_t>(operand)].has_variables;
        return push(n);
    }

    int make_binary(Op op, int lhs, int rhs) {
        Node n;
        n.op = op;
        n.lhs = lhs;
        n.rhs = rhs;
        n.has_variables = nodes_[static_cast<std::size_t>(lhs)].has_variables ||
                          nodes_[static_cast<std::size_t>(rhs)].has_variables;
        return push(n);
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = make_binary(Op::add, lhs, parse_term());
            else if (accept('-')) lhs = make_binary(Op::sub, lhs, parse_term());
            else return lhs;
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make_binary(Op::mul, lhs, parse_unary());
            else if (accept('/')) lhs = make_binary(Op::div, lhs, parse_unary());
            else return lhs;
        }
    }

    int parse_unary() {
        if (accept('-')) return make_unary(Op::neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    int parse_power() {
        int base = parse_primary();
        if (accept('^')) return make_binary(Op::pow, base, parse_unary());
        return base;
    }

    int parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (accept('(')) {
            int inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw SyntaxError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    int parse_number() {
        const std::size_t start = pos_;
        // strtod needs a terminated buffer; copy the longest numeric-looking run.
        std::size_t end = pos_;
        while (end < text_.size()) {
            const char c = text_[end];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                ++end;
            } else if ((c == 'e' || c == 'E') && end + 1 < text_.size()) {
                std::size_t k = end + 1;
                if (text_[k] == '+' || text_[k] == '-') ++k;
                if (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) end = k;
                else break;
            } else {
                break;
            }
        }
        const std::string literal(text_.substr(start, end - start));
        char* stop = nullptr;
        const double value = std::strtod(literal.c_str(), &stop);
        if (stop != literal.c_str() + literal.size() || !std::isfinite(value))
            throw SyntaxError("malformed number '" + literal + "'", start);
        pos_ = end;
        Node n;
        n.op = Op::constant;
        n.value = value;
        return push(n);
    }

    int parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));

        Node n;
        if (name == "x" || name == "y" || name == "dy") {
            n.op = Op::variable;
            n.var = name == "x" ? Variable::x : name == "y" ? Variable::y : Variable::dy;
            n.has_variables = true;
            return push(n);
        }
        if (name == "pi") {
            n.op = Op::pi;
            return push(n);
        }
        Op fn;
        if (name == "sqrt") fn = Op::sqrt;
        else if (name == "sin") fn = Op::sin;
        else if (name == "cos") fn = Op::cos;
        else if (name == "exp") fn = Op::exp;
        else throw UnknownIdentifier(name, start);

        expect('(');
        int arg = parse_expr();
        expect(')');
        return make_unary(fn, arg);
    }
};

void render(const IntegrandExpr& e, int index, std::ostringstream& out) {
    const Node& n = e.node(index);
    switch (n.op) {
        case Op::constant: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out << buf;
            return;
        }
        case Op::pi: out << "pi"; return;
        case Op::variable:
            out << (n.var == Variable::x ? "x" : n.var == Variable::y ? "y" : "dy");
            return;
        case Op::neg:
            out << "(-";
            render(e, n.lhs, out);
            out << ')';
            return;
        case Op::sqrt:
        case Op::sin:
        case Op::cos:
        case Op::exp:
            out << function_name(n.op) << '(';
            render(e, n.lhs, out);
            out << ')';
            return;
        default:
            out << '(';
            render(e, n.lhs, out);
            out << ' ' << binary_symbol(n.op) << ' ';
            render(e, n.rhs, out);
            out << ')';
            return;
    }
}

bool same_tree(const IntegrandExpr& a, int ia, const IntegrandExpr& b, int ib) {
    const Node& na = a.node(ia);
    const Node& nb = b.node(ib);
    if (na.op != nb.op) return false;
    switch (na.op) {
        case Op::constant: return na.value == nb.value;
        case Op::pi: return true;
        case Op::variable: return na.var == nb.var;
        default: break;
    }
    if (!same_tree(a, na.lhs, b, nb.lhs)) return false;
    return is_unary(na.op) || same_tree(a, na.rhs, b, nb.rhs);
}

// Value with partials in (y, dy).
struct Partials {
    double v;
    double dy;
    double ddy;
};

struct Evaluator {
    const IntegrandExpr& e;
    double x, y, dy;

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream msg;
        msg << what << " (x=" << x << ", y=" << y << ", dy=" << dy << ")";
        throw DomainError(msg.str());
    }

    Partials eval(int index) const {
        const Node& n = e.node(index);
        switch (n.op) {
            case Op::constant: return {n.value, 0.0, 0.0};
            case Op::pi: return {std::numbers::pi, 0.0, 0.0};
            case Op::variable:
                switch (n.var) {
                    case Variable::x: return {x, 0.0, 0.0};
                    case Variable::y: return {y, 1.0, 0.0};
                    case Variable::dy: return {dy, 0.0, 1.0};
                }
                break;
            case Op::neg: {
                const Partials a = eval(n.lhs);
                return {-a.v, -a.dy, -a.ddy};
            }
            case Op::add: {
                const Partials a = eval(n.lhs), b = eval(n.rhs);
                return {a.v + b.v, a.dy + b.dy, a.ddy + b.ddy};
            }
            case Op::sub: {
                const Partials a = eval(n.lhs), b = eval(n.rhs);
                return {a.v - b.v, a.dy - b.dy, a.ddy - b.ddy};
            }
            case Op::mul: {
                const Partials a = eval(n.lhs), b = eval(n.rhs);
                return {a.v * b.v, a.dy * b.v + a.v * b.dy, a.ddy * b.v + a.v * b.ddy};
            }
            case Op::div: {
                const Partials a = eval(n.lhs), b = eval(n.rhs);
                if (std::abs(b.v) < 1e-300) fail("division by zero");
                const double q = a.v / b.v;
                return {q, (a.dy - q * b.dy) / b.v, (a.ddy - q * b.ddy) / b.v};
            }
            case Op::pow: return power(n);
            case Op::sqrt: {
                const Partials a = eval(n.lhs);
                if (a.v < 0.0) fail("sqrt of negative value");
                const double s = std::sqrt(a.v);
                if (a.dy == 0.0 && a.ddy == 0.0) return {s, 0.0, 0.0};
                if (s == 0.0) fail("sqrt derivative singular at zero");
                return {s, a.dy / (2.0 * s), a.ddy / (2.0 * s)};
            }
            case Op::sin: {
                const Partials a = eval(n.lhs);
                const double c = std::cos(a.v);
                return {std::sin(a.v), c * a.dy, c * a.ddy};
            }
            case Op::cos: {
                const Partials a = eval(n.lhs);
                const double s = -std::sin(a.v);
                return {std::cos(a.v), s * a.dy, s * a.ddy};
            }
            case Op::exp: {
                const Partials a = eval(n.lhs);
                const double v = std::exp(a.v);
                if (!std::isfinite(v)) fail("exp overflow");
                return {v, v * a.dy, v * a.ddy};
            }
        }
        fail("corrupt expression node");
    }

    Partials power(const Node& n) const {
        const Partials a = eval(n.lhs);
        const Partials b = eval(n.rhs);
        Partials r{};
        if (!e.node(n.rhs).has_variables) {
            // Constant exponent: a^b with the power rule.
            const double p = b.v;
            const bool integral = std::trunc(p) == p;
            if (a.v < 0.0 && !integral) fail("non-integer power of negative base");
            r.v = std::pow(a.v, p);
            if (a.dy != 0.0 || a.ddy != 0.0) {
                const double slope = p == 0.0 ? 0.0 : p * std::pow(a.v, p - 1.0);
                r.dy = slope * a.dy;
                r.ddy = slope * a.ddy;
            }
        } else {
            if (a.v <= 0.0) fail("variable exponent requires a positive base");
            r.v = std::pow(a.v, b.v);
            const double log_a = std::log(a.v);
            r.dy = r.v * (b.dy * log_a + b.v * a.dy / a.v);
            r.ddy = r.v * (b.ddy * log_a + b.v * a.ddy / a.v);
        }
        if (!std::isfinite(r.v) || !std::isfinite(r.dy) || !std::isfinite(r.ddy)) fail("power out of range");
        return r;
    }
};

}  // namespace

std::string IntegrandExpr::to_string() const {
    std::ostringstream out;
    render(*this, root_, out);
    return out.str();
}

bool operator==(const IntegrandExpr& a, const IntegrandExpr& b) {
    return same_tree(a, a.root_, b, b.root_);
}

IntegrandExpr parse_integrand(std::string_view text) { return Parser(text).parse(); }

IntegrandEval eval_integrand(const IntegrandExpr& expr, double x, double y, double dy) {
    const Partials p = Evaluator{expr, x, y, dy}.eval(expr.root());
    return {p.v, p.dy, p.ddy};
}

}  // namespace varipade
