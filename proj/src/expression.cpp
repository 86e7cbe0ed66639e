#include "layerfd/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace layerfd {

namespace {

const char* builtin_name(Builtin fn) {
    switch (fn) {
        case Builtin::Exp: return "exp";
        case Builtin::Ln: return "ln";
        case Builtin::Sqrt: return "sqrt";
        case Builtin::Sin: return "sin";
        case Builtin::Cos: return "cos";
        case Builtin::Abs: return "abs";
    }
    return "?";
}

std::optional<Builtin> builtin_from_name(std::string_view name) {
    if (name == "exp") return Builtin::Exp;
    if (name == "ln") return Builtin::Ln;
    if (name == "sqrt") return Builtin::Sqrt;
    if (name == "sin") return Builtin::Sin;
    if (name == "cos") return Builtin::Cos;
    if (name == "abs") return Builtin::Abs;
    return std::nullopt;
}

bool known_variable(std::string_view name) {
    return name == "x" || name == "u" || name == "eps";
}

ExprNodePtr make_constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Constant;
    n->number = v;
    return n;
}

ExprNodePtr make_variable(std::string name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Variable;
    n->name = std::move(name);
    return n;
}

ExprNodePtr make_unary(ExprNodePtr operand) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Unary;
    n->op = '-';
    n->lhs = std::move(operand);
    return n;
}

ExprNodePtr make_binary(char op, ExprNodePtr lhs, ExprNodePtr rhs) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

ExprNodePtr make_call(Builtin fn, ExprNodePtr arg) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Call;
    n->fn = fn;
    n->lhs = std::move(arg);
    return n;
}

// Recursive-descent parser over a character cursor.  The grammar is
// tiny, so tokens are consumed in place:
//
//   sum    := product (('+'|'-') product)*
//   product:= unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          (right-associative)
//   atom   := number | variable | func '(' sum ')' | '(' sum ')'
class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprNodePtr run() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError(pos_, "empty expression");
        ExprNodePtr e = parse_sum();
        skip_ws();
        if (pos_ < src_.size())
            throw ParseError(pos_, std::string("unexpected character '") + src_[pos_] + "'");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    ExprNodePtr parse_sum() {
        ExprNodePtr lhs = parse_product();
        for (;;) {
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            lhs = make_binary(c, std::move(lhs), parse_product());
        }
    }

    ExprNodePtr parse_product() {
        ExprNodePtr lhs = parse_unary();
        for (;;) {
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            lhs = make_binary(c, std::move(lhs), parse_unary());
        }
    }

    ExprNodePtr parse_unary() {
        if (peek() == '-') {
            ++pos_;
            return make_unary(parse_unary());
        }
        return parse_power();
    }

    ExprNodePtr parse_power() {
        ExprNodePtr base = parse_atom();
        if (peek() == '^') {
            ++pos_;
            // exponent may itself carry a unary minus: x^-2
            return make_binary('^', std::move(base), parse_unary());
        }
        return base;
    }

    ExprNodePtr parse_atom() {
        char c = peek();
        if (pos_ >= src_.size()) throw ParseError(pos_, "expected operand, found end of input");
        if (c == '(') {
            ++pos_;
            ExprNodePtr inner = parse_sum();
            if (peek() != ')') throw ParseError(pos_, "expected ')'");
            ++pos_;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }

    ExprNodePtr parse_number() {
        std::size_t start = pos_;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + src_.size(), value);
        if (ec != std::errc()) throw ParseError(start, "malformed number");
        pos_ = static_cast<std::size_t>(ptr - src_.data());
        return make_constant(value);
    }

    ExprNodePtr parse_identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name(src_.substr(start, pos_ - start));
        if (peek() == '(') {
            auto fn = builtin_from_name(name);
            if (!fn) throw ParseError(start, "unknown function '" + name + "'");
            ++pos_;  // consume '('
            ExprNodePtr arg = parse_sum();
            if (peek() != ')') throw ParseError(pos_, "expected ')'");
            ++pos_;
            return make_call(*fn, std::move(arg));
        }
        if (!known_variable(name))
            throw ParseError(start, "unknown identifier '" + name + "'");
        return make_variable(std::move(name));
    }
};

void collect_vars(const ExprNodePtr& node, std::set<std::string>& out) {
    if (!node) return;
    if (node->kind == ExprNode::Kind::Variable) out.insert(node->name);
    collect_vars(node->lhs, out);
    collect_vars(node->rhs, out);
}

double eval_node(const ExprNode& node, const Bindings& bindings) {
    switch (node.kind) {
        case ExprNode::Kind::Constant:
            return node.number;
        case ExprNode::Kind::Variable: {
            auto v = bindings.lookup(node.name);
            if (!v) throw EvalError("missing binding for variable '" + node.name + "'");
            return *v;
        }
        case ExprNode::Kind::Unary:
            return -eval_node(*node.lhs, bindings);
        case ExprNode::Kind::Binary: {
            double a = eval_node(*node.lhs, bindings);
            double b = eval_node(*node.rhs, bindings);
            switch (node.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/':
                    if (b == 0.0) throw EvalError("division by zero");
                    return a / b;
                case '^': {
                    if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power");
                    double r = std::pow(a, b);
                    if (!std::isfinite(r))
                        throw EvalError("non-finite result of power");
                    return r;
                }
            }
            throw EvalError("corrupt expression node");
        }
        case ExprNode::Kind::Call: {
            double a = eval_node(*node.lhs, bindings);
            double r = 0.0;
            switch (node.fn) {
                case Builtin::Exp: r = std::exp(a); break;
                case Builtin::Ln:
                    if (a <= 0.0) throw EvalError("ln of a non-positive value");
                    r = std::log(a);
                    break;
                case Builtin::Sqrt:
                    if (a < 0.0) throw EvalError("sqrt of a negative value");
                    r = std::sqrt(a);
                    break;
                case Builtin::Sin: r = std::sin(a); break;
                case Builtin::Cos: r = std::cos(a); break;
                case Builtin::Abs: r = std::fabs(a); break;
            }
            if (!std::isfinite(r))
                throw EvalError(std::string("non-finite result of ") + builtin_name(node.fn));
            return r;
        }
    }
    throw EvalError("corrupt expression node");
}

int precedence_level(const ExprNode& n) {
    switch (n.kind) {
        case ExprNode::Kind::Binary:
            if (n.op == '+' || n.op == '-') return 1;
            if (n.op == '*' || n.op == '/') return 2;
            return 4;  // ^
        case ExprNode::Kind::Unary:
            return 3;
        default:
            return 5;  // atoms
    }
}

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, int min_level, std::string& out) {
    if (precedence_level(child) < min_level) {
        out += '(';
        print_node(child, out);
        out += ')';
    } else {
        print_node(child, out);
    }
}

void print_node(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case ExprNode::Kind::Constant: {
            char buf[32];
            auto res = std::to_chars(buf, buf + sizeof(buf), n.number);
            out.append(buf, res.ptr);
            return;
        }
        case ExprNode::Kind::Variable:
            out += n.name;
            return;
        case ExprNode::Kind::Unary:
            out += '-';
            // operand must bind at least as tightly as unary minus,
            // except a nested unary which prints fine as --x ... avoid
            // that by parenthesizing anything below '^' level.
            print_child(*n.lhs, 3, out);
            return;
        case ExprNode::Kind::Binary: {
            int level = precedence_level(n);
            if (n.op == '^') {
                // left operand of ^ must be an atom; right may be unary/power.
                print_child(*n.lhs, 5, out);
                out += '^';
                print_child(*n.rhs, 3, out);
                return;
            }
            print_child(*n.lhs, level, out);
            out += n.op;
            // left associativity: the right child needs strictly
            // higher level unless it is a plain atom.
            print_child(*n.rhs, level + 1, out);
            return;
        }
        case ExprNode::Kind::Call:
            out += builtin_name(n.fn);
            out += '(';
            print_node(*n.lhs, out);
            out += ')';
            return;
    }
}

}  // namespace

ParseError::ParseError(std::size_t offset, const std::string& message)
    : std::runtime_error("parse error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

Bindings::Bindings(std::initializer_list<std::pair<std::string_view, double>> init) {
    for (const auto& [name, value] : init) set(name, value);
}

Bindings& Bindings::set(std::string_view name, double value) {
    for (auto& [n, v] : entries_) {
        if (n == name) {
            v = value;
            return *this;
        }
    }
    entries_.emplace_back(std::string(name), value);
    return *this;
}

std::optional<double> Bindings::lookup(std::string_view name) const {
    for (const auto& [n, v] : entries_)
        if (n == name) return v;
    return std::nullopt;
}

Expression::Expression(ExprNodePtr root) : root_(std::move(root)) {
    collect_vars(root_, free_vars_);
}

Expression Expression::parse(std::string_view source) {
    Parser p(source);
    return Expression(p.run());
}

double Expression::evaluate(const Bindings& bindings) const {
    return eval_node(*root_, bindings);
}

double Expression::derivative_at(std::string_view var, const Bindings& bindings) const {
    if (!depends_on(var)) return 0.0;
    auto center = bindings.lookup(var);
    if (!center) throw EvalError("missing binding for variable '" + std::string(var) + "'");
    double h = std::max(1e-6, 1e-6 * std::fabs(*center));
    Bindings shifted = bindings;
    shifted.set(var, *center + h);
    double fp = evaluate(shifted);
    shifted.set(var, *center - h);
    double fm = evaluate(shifted);
    return (fp - fm) / (2.0 * h);
}

bool Expression::depends_on(std::string_view var) const {
    return free_vars_.count(std::string(var)) > 0;
}

std::string Expression::pretty() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

}  // namespace layerfd
