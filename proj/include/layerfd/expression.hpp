#pragma once

#include <initializer_list>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace layerfd {

/// Parse failure with the 0-based offset of the offending character
/// (offset == source length means "unexpected end of input").
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& message);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation failure: missing binding, domain error (ln of a
/// non-positive value, division by zero, ...) or a non-finite result.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Builtin { Exp, Ln, Sqrt, Sin, Cos, Abs };

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Constant, Variable, Unary, Binary, Call };
    Kind kind;
    double number = 0.0;   // Constant
    std::string name;      // Variable
    char op = 0;           // Binary: + - * / ^ ; Unary: -
    Builtin fn = Builtin::Exp;
    ExprNodePtr lhs;       // operand / left operand / call argument
    ExprNodePtr rhs;       // right operand (Binary only)
};

/// Variable bindings for evaluation. Holds at most a handful of
/// (name, value) pairs; lookup is a linear scan.
class Bindings {
public:
    Bindings() = default;
    Bindings(std::initializer_list<std::pair<std::string_view, double>> init);

    Bindings& set(std::string_view name, double value);
    std::optional<double> lookup(std::string_view name) const;

private:
    std::vector<std::pair<std::string, double>> entries_;
};

/// Immutable arithmetic expression over the variables {x, u, eps}.
///
/// Supports literals, binary + - * / ^, unary minus and the functions
/// exp, ln, sqrt, sin, cos, abs.  Precedence: ^ binds tighter than
/// unary minus, which binds tighter than * and /, which bind tighter
/// than + and -.  Binary operators of equal precedence associate left;
/// ^ associates right.
///
/// Expressions are immutable after parse and safe to evaluate from
/// multiple threads concurrently.
class Expression {
public:
    static Expression parse(std::string_view source);

    double evaluate(const Bindings& bindings) const;

    /// Central finite-difference derivative with step
    /// h = max(1e-6, 1e-6*|value of var|).  Approximate; used for
    /// sampling-based assumption checks, never inside the schemes
    /// themselves.
    double derivative_at(std::string_view var, const Bindings& bindings) const;

    const std::set<std::string>& free_vars() const { return free_vars_; }
    bool depends_on(std::string_view var) const;

    /// Unparse.  The printed text reparses to a structurally identical
    /// tree (same operations in the same order).
    std::string pretty() const;

    const ExprNodePtr& root() const { return root_; }

private:
    explicit Expression(ExprNodePtr root);

    ExprNodePtr root_;
    std::set<std::string> free_vars_;
};

}  // namespace layerfd
