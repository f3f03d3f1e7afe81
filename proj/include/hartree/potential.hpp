#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hartree {

/// Syntax or name error with a 0-based offset and 1-based line/column.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t offset, int line, int column);
    std::size_t offset() const { return offset_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    std::size_t offset_;
    int line_;
    int column_;
};

/// Value, gradient and Hessian carried through arithmetic (forward mode).
struct Jet2 {
    double v = 0.0;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;

    static Jet2 constant(double c, int n);
    static Jet2 variable(double x, int i, int n);
};

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);
Jet2 operator*(double c, const Jet2& a);
Jet2 exp(const Jet2& a);
Jet2 log(const Jet2& a);
Jet2 pow(const Jet2& a, double c);
Jet2 pow(const Jet2& a, const Jet2& b);

struct ExprNode;

/// Parsed V(r, x3, ..., xN). Variables are ordered (r, x3, ..., xN), so an
/// evaluation point has N-1 coordinates. Immutable after parse.
class PotentialModel {
public:
    PotentialModel(std::string source, int N);

    const std::string& source() const { return source_; }
    int N() const { return N_; }
    int dim() const { return N_ - 1; }

    /// Throws DomainError on division by zero or a non-finite result.
    double value(const Eigen::VectorXd& z) const;
    Jet2 jet(const Eigen::VectorXd& z) const;
    /// Jet of r^4 V(r, x'').
    Jet2 r4_jet(const Eigen::VectorXd& z) const;

private:
    std::string source_;
    int N_;
    std::shared_ptr<const ExprNode> root_;
};

PotentialModel parse_potential(const std::string& source, int N = 9);

}  // namespace hartree
