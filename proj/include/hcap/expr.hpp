#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hcap/jet.hpp"

namespace hcap {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree over variables x1..x3 with rational operations,
/// sqrt, exp, log and integer powers. Division, sqrt and log carry their
/// domain constraints (denominator != 0, argument > 0), checked when the
/// tree is evaluated.
class Expr {
  public:
    enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Sqrt, Exp, Log, Pow };

    static ExprPtr constant(double c);
    static ExprPtr variable(int i);  // 0-based; prints as x1, x2, x3
    static ExprPtr add(ExprPtr a, ExprPtr b);
    static ExprPtr sub(ExprPtr a, ExprPtr b);
    static ExprPtr mul(ExprPtr a, ExprPtr b);
    static ExprPtr div(ExprPtr a, ExprPtr b);
    static ExprPtr sqrt(ExprPtr a);
    static ExprPtr exp(ExprPtr a);
    static ExprPtr log(ExprPtr a);
    static ExprPtr pow(ExprPtr a, int k);

    Kind kind() const { return kind_; }
    /// Number of variables: one past the highest variable index in the tree.
    int arity() const { return arity_; }

    double eval(std::span<const double> x) const;

    /// Taylor-expand at `point` up to `order`; the jet's dimension is
    /// max(point.size(), arity). Exact to roundoff.
    Jet lift(std::span<const double> point, int order) const;

    /// Prefix s-expression form, e.g. (add 2 (mul x1 x2)). Round-trips
    /// through parse().
    std::string str() const;
    static ExprPtr parse(const std::string& text);

    /// Tree with every variable x_i replaced by subs[i].
    ExprPtr substituted(const std::vector<ExprPtr>& subs) const;

  private:
    Expr() = default;
    static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b);
    static ExprPtr unary(Kind k, ExprPtr a);
    Kind kind_ = Kind::Constant;
    double cval_ = 0.0;
    int var_ = -1;
    int expo_ = 0;
    int arity_ = 0;
    ExprPtr lhs_, rhs_;

    template <class T>
    T eval_impl(std::span<const T> vars) const;
};

// Builder sugar used by the surface families.
ExprPtr operator+(ExprPtr a, ExprPtr b);
ExprPtr operator-(ExprPtr a, ExprPtr b);
ExprPtr operator*(ExprPtr a, ExprPtr b);
ExprPtr operator/(ExprPtr a, ExprPtr b);
ExprPtr operator+(ExprPtr a, double b);
ExprPtr operator+(double a, ExprPtr b);
ExprPtr operator-(ExprPtr a, double b);
ExprPtr operator-(double a, ExprPtr b);
ExprPtr operator*(ExprPtr a, double b);
ExprPtr operator*(double a, ExprPtr b);
ExprPtr operator/(ExprPtr a, double b);
ExprPtr operator/(double a, ExprPtr b);
ExprPtr operator-(ExprPtr a);

/// Tree with variables remapped through the affine change x -> A x + b,
/// i.e. variable i becomes sum_j A(i,j) x_j + b(i). A is row-major dim x dim.
ExprPtr compose_affine(const ExprPtr& e, std::span<const double> A, std::span<const double> b,
                       int dim);

}  // namespace hcap
