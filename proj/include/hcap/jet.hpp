#pragma once

#include <array>
#include <vector>

#include "hcap/errors.hpp"

namespace hcap {

/// Multi-index for partial derivatives, padded with zeros beyond the jet's
/// dimension. idx(1,2) means d^3/dx1 dx2^2.
using MultiIndex = std::array<int, 3>;

inline constexpr int kMaxJetDim = 3;
inline constexpr int kMaxJetOrder = 5;

inline int mi_degree(const MultiIndex& a) { return a[0] + a[1] + a[2]; }

MultiIndex mi(int a0, int a1 = 0, int a2 = 0);

/// Dense enumeration of all multi-indices of total degree <= order in `dim`
/// variables, in graded order. Shared, immutable, cached per (dim, order).
class JetLayout {
  public:
    static const JetLayout& get(int dim, int order);

    int dim() const { return dim_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(indices_.size()); }
    const MultiIndex& index(int pos) const { return indices_[pos]; }
    /// Position of a multi-index; throws JetError when |a| exceeds order or
    /// a component runs outside the dimension.
    int pos(const MultiIndex& a) const;

  private:
    JetLayout(int dim, int order);
    int dim_, order_;
    std::vector<MultiIndex> indices_;
    std::array<int, (kMaxJetOrder + 1) * (kMaxJetOrder + 1) * (kMaxJetOrder + 1)> pos_;
};

/// Truncated multivariate Taylor expansion of a scalar quantity at a point.
/// Coefficients are stored as partial-derivative values (not divided by the
/// factorials), so partial() reads off u_ijk... directly.
class Jet {
  public:
    Jet() : layout_(&JetLayout::get(1, 0)), c_(1, 0.0) {}
    Jet(int dim, int order) : layout_(&JetLayout::get(dim, order)), c_(layout_->size(), 0.0) {}

    static Jet constant(int dim, int order, double v);
    /// Seed jet of the coordinate function x_i at value x: d/dx_i = 1.
    static Jet variable(int dim, int order, int i, double x);

    int dim() const { return layout_->dim(); }
    int order() const { return layout_->order(); }

    double value() const { return c_[0]; }
    double partial(const MultiIndex& a) const { return c_[layout_->pos(a)]; }
    double& at(const MultiIndex& a) { return c_[layout_->pos(a)]; }

    /// The jet of the partial derivative d/dx_i, one order lower.
    Jet derivative(int i) const;

    /// Copy truncated to a lower order.
    Jet truncated(int order) const;

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);

    friend Jet operator+(const Jet& a, const Jet& b);
    friend Jet operator-(const Jet& a, const Jet& b);
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);

    friend Jet operator+(const Jet& a, double s);
    friend Jet operator+(double s, const Jet& a);
    friend Jet operator-(const Jet& a, double s);
    friend Jet operator-(double s, const Jet& a);
    friend Jet operator*(const Jet& a, double s);
    friend Jet operator*(double s, const Jet& a);
    friend Jet operator/(const Jet& a, double s);
    friend Jet operator/(double s, const Jet& a);

    friend Jet sqrt(const Jet& f);
    friend Jet exp(const Jet& f);
    friend Jet log(const Jet& f);

  private:
    const JetLayout* layout_;
    std::vector<double> c_;
};

/// f^k for integer k (negative via reciprocal).
Jet powi(const Jet& f, int k);

}  // namespace hcap
