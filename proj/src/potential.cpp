#include "hartree/potential.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "hartree/errors.hpp"

namespace hartree {

ParseError::ParseError(const std::string& msg, std::size_t offset, int line, int column)
    : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
      offset_(offset),
      line_(line),
      column_(column) {}

// ---- jets ----

Jet2 Jet2::constant(double c, int n) {
    return {c, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
}

Jet2 Jet2::variable(double x, int i, int n) {
    Jet2 j = constant(x, n);
    j.g(i) = 1.0;
    return j;
}

Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.v + b.v, a.g + b.g, a.h + b.h}; }
Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.v - b.v, a.g - b.g, a.h - b.h}; }
Jet2 operator-(const Jet2& a) { return {-a.v, -a.g, -a.h}; }
Jet2 operator*(double c, const Jet2& a) { return {c * a.v, c * a.g, c * a.h}; }

Jet2 operator*(const Jet2& a, const Jet2& b) {
    Eigen::MatrixXd cross = a.g * b.g.transpose();
    return {a.v * b.v, a.v * b.g + b.v * a.g, a.v * b.h + b.v * a.h + cross + cross.transpose()};
}

namespace {

// f(a) given f, f', f'' at a.v
Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
    return {f0, f1 * a.g, f1 * a.h + f2 * (a.g * a.g.transpose())};
}

}  // namespace

Jet2 operator/(const Jet2& a, const Jet2& b) {
    if (b.v == 0.0) throw DomainError("potential: division by zero");
    const double inv = 1.0 / b.v;
    return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}

Jet2 log(const Jet2& a) {
    if (!(a.v > 0.0)) throw DomainError("potential: log of a non-positive value");
    return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}

Jet2 pow(const Jet2& a, double c) {
    if (c == 0.0) return Jet2::constant(1.0, static_cast<int>(a.g.size()));
    if (c == 1.0) return a;
    if (a.v == 0.0 && c < 2.0 && c != 1.0) throw DomainError("potential: power not differentiable at 0");
    if (a.v < 0.0 && c != std::round(c)) throw DomainError("potential: non-integer power of a negative value");
    const double f0 = std::pow(a.v, c);
    const double f1 = c * std::pow(a.v, c - 1.0);
    const double f2 = c * (c - 1.0) * std::pow(a.v, c - 2.0);
    return chain(a, f0, f1, f2);
}

Jet2 pow(const Jet2& a, const Jet2& b) {
    if (b.g.isZero(0.0) && b.h.isZero(0.0)) return pow(a, b.v);
    return exp(b * log(a));
}

// ---- syntax tree ----

struct ExprNode {
    enum class Kind { number, variable, neg, add, sub, mul, div, pow, exp } kind;
    double number = 0.0;
    int var = 0;
    std::shared_ptr<const ExprNode> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(ExprNode::Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

class Parser {
public:
    Parser(const std::string& s, int N) : s_(s), N_(N) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    const std::string& s_;
    int N_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }

    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
        int line = 1, col = 1;
        for (std::size_t i = 0; i < at && i < s_.size(); ++i) {
            if (s_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(msg, at, line, col);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expr() {
        NodePtr e = term();
        for (;;) {
            if (accept('+')) e = make(ExprNode::Kind::add, e, term());
            else if (accept('-')) e = make(ExprNode::Kind::sub, e, term());
            else return e;
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        for (;;) {
            if (accept('*')) e = make(ExprNode::Kind::mul, e, unary());
            else if (accept('/')) e = make(ExprNode::Kind::div, e, unary());
            else return e;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(ExprNode::Kind::neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(ExprNode::Kind::pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        if (accept('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::number;
        n->number = v;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        if (name == "exp") {
            expect('(');
            NodePtr e = expr();
            expect(')');
            return make(ExprNode::Kind::exp, e);
        }
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::variable;
        if (name == "r") {
            n->var = 0;
            return n;
        }
        if (name.size() >= 2 && name[0] == 'x' && name.find_first_not_of("0123456789", 1) == std::string::npos &&
            name[1] != '0') {
            const int idx = std::atoi(name.c_str() + 1);
            if (idx >= 3 && idx <= N_) {
                n->var = idx - 2;
                return n;
            }
        }
        fail_at("unknown identifier '" + name + "'", start);
    }
};

Jet2 eval_jet(const ExprNode& n, const Eigen::VectorXd& z) {
    const int dim = static_cast<int>(z.size());
    switch (n.kind) {
        case ExprNode::Kind::number: return Jet2::constant(n.number, dim);
        case ExprNode::Kind::variable: return Jet2::variable(z(n.var), n.var, dim);
        case ExprNode::Kind::neg: return -eval_jet(*n.lhs, z);
        case ExprNode::Kind::add: return eval_jet(*n.lhs, z) + eval_jet(*n.rhs, z);
        case ExprNode::Kind::sub: return eval_jet(*n.lhs, z) - eval_jet(*n.rhs, z);
        case ExprNode::Kind::mul: return eval_jet(*n.lhs, z) * eval_jet(*n.rhs, z);
        case ExprNode::Kind::div: return eval_jet(*n.lhs, z) / eval_jet(*n.rhs, z);
        case ExprNode::Kind::pow: return pow(eval_jet(*n.lhs, z), eval_jet(*n.rhs, z));
        case ExprNode::Kind::exp: return exp(eval_jet(*n.lhs, z));
    }
    throw DomainError("potential: corrupt expression tree");
}

double eval_value(const ExprNode& n, const Eigen::VectorXd& z) {
    switch (n.kind) {
        case ExprNode::Kind::number: return n.number;
        case ExprNode::Kind::variable: return z(n.var);
        case ExprNode::Kind::neg: return -eval_value(*n.lhs, z);
        case ExprNode::Kind::add: return eval_value(*n.lhs, z) + eval_value(*n.rhs, z);
        case ExprNode::Kind::sub: return eval_value(*n.lhs, z) - eval_value(*n.rhs, z);
        case ExprNode::Kind::mul: return eval_value(*n.lhs, z) * eval_value(*n.rhs, z);
        case ExprNode::Kind::div: {
            const double d = eval_value(*n.rhs, z);
            if (d == 0.0) throw DomainError("potential: division by zero");
            return eval_value(*n.lhs, z) / d;
        }
        case ExprNode::Kind::pow: return std::pow(eval_value(*n.lhs, z), eval_value(*n.rhs, z));
        case ExprNode::Kind::exp: return std::exp(eval_value(*n.lhs, z));
    }
    throw DomainError("potential: corrupt expression tree");
}

}  // namespace

PotentialModel::PotentialModel(std::string source, int N) : source_(std::move(source)), N_(N) {
    if (N < 9) throw DomainError("potential: N must be >= 9");
    root_ = Parser(source_, N_).parse();
}

double PotentialModel::value(const Eigen::VectorXd& z) const {
    if (z.size() != dim()) throw DomainError("potential: point must have N-1 coordinates");
    const double v = eval_value(*root_, z);
    if (!std::isfinite(v)) throw DomainError("potential: non-finite value");
    return v;
}

Jet2 PotentialModel::jet(const Eigen::VectorXd& z) const {
    if (z.size() != dim()) throw DomainError("potential: point must have N-1 coordinates");
    Jet2 j = eval_jet(*root_, z);
    if (!std::isfinite(j.v) || !j.g.allFinite() || !j.h.allFinite())
        throw DomainError("potential: non-finite value or derivative");
    return j;
}

Jet2 PotentialModel::r4_jet(const Eigen::VectorXd& z) const {
    return pow(Jet2::variable(z(0), 0, dim()), 4.0) * jet(z);
}

PotentialModel parse_potential(const std::string& source, int N) { return PotentialModel(source, N); }

}  // namespace hartree
