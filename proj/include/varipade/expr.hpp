#pragma once

// Integrand expressions F(x, y, dy) with exact first partials in y and dy.
//
// Grammar (whitespace is ignored):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?            right associative
//   primary := number | 'x' | 'y' | 'dy' | 'pi'
//            | ('sqrt' | 'sin' | 'cos' | 'exp') '(' expr ')'
//            | '(' expr ')'
//
// `-a^b` parses as `-(a^b)`.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace varipade {

enum class Variable { x, y, dy };

struct IntegrandEval {
    double value = 0.0;
    double dF_dy = 0.0;
    double dF_ddy = 0.0;
};

class IntegrandExpr {
public:
    enum class Op { constant, pi, variable, neg, add, sub, mul, div, pow, sqrt, sin, cos, exp };

    struct Node {
        Op op = Op::constant;
        double value = 0.0;          // Op::constant
        Variable var = Variable::x;  // Op::variable
        int lhs = -1;                // operand of unary ops, left operand otherwise
        int rhs = -1;
        bool has_variables = false;  // subtree references x, y or dy
    };

    IntegrandExpr(std::vector<Node> nodes, int root);

    const Node& node(int index) const { return (*nodes_)[static_cast<std::size_t>(index)]; }
    int root() const noexcept { return root_; }
    std::size_t size() const noexcept { return nodes_->size(); }

    /// Fully parenthesized rendering; parse_integrand(to_string()) == *this.
    std::string to_string() const;

    /// Structural equality of the trees (not of the node storage).
    friend bool operator==(const IntegrandExpr& a, const IntegrandExpr& b);

private:
    std::shared_ptr<const std::vector<Node>> nodes_;
    int root_;
};

IntegrandExpr parse_integrand(std::string_view text);

/// Evaluates F and its partials in y and dy by forward propagation over the
/// tree. Throws DomainError (naming the failing operation and the inputs) when
/// a sub-expression leaves its natural domain.
IntegrandEval eval_integrand(const IntegrandExpr& expr, double x, double y, double dy);

}  // namespace varipade
