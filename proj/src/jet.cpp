#include "hcap/jet.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace hcap {

MultiIndex mi(int a0, int a1, int a2) { return MultiIndex{a0, a1, a2}; }

namespace {

// binomial(n, k) for n <= kMaxJetOrder
constexpr int kBinom[kMaxJetOrder + 1][kMaxJetOrder + 1] = {
    {1, 0, 0, 0, 0, 0},       {1, 1, 0, 0, 0, 0},       {1, 2, 1, 0, 0, 0},
    {1, 3, 3, 1, 0, 0},       {1, 4, 6, 4, 1, 0},       {1, 5, 10, 10, 5, 1},
};

double mi_binom(const MultiIndex& a, const MultiIndex& b) {
    return double(kBinom[a[0]][b[0]]) * kBinom[a[1]][b[1]] * kBinom[a[2]][b[2]];
}

int flat(const MultiIndex& a) {
    constexpr int s = kMaxJetOrder + 1;
    return (a[0] * s + a[1]) * s + a[2];
}

}  // namespace

JetLayout::JetLayout(int dim, int order) : dim_(dim), order_(order) {
    pos_.fill(-1);
    // graded enumeration: total degree 0, 1, ..., order
    for (int d = 0; d <= order; ++d) {
        for (int a0 = d; a0 >= 0; --a0) {
            if (dim == 1) {
                if (a0 != d) continue;
                MultiIndex a{a0, 0, 0};
                pos_[flat(a)] = static_cast<int>(indices_.size());
                indices_.push_back(a);
            } else if (dim == 2) {
                MultiIndex a{a0, d - a0, 0};
                pos_[flat(a)] = static_cast<int>(indices_.size());
                indices_.push_back(a);
            } else {
                for (int a1 = d - a0; a1 >= 0; --a1) {
                    MultiIndex a{a0, a1, d - a0 - a1};
                    pos_[flat(a)] = static_cast<int>(indices_.size());
                    indices_.push_back(a);
                }
            }
        }
    }
}

const JetLayout& JetLayout::get(int dim, int order) {
    if (dim < 1 || dim > kMaxJetDim)
        throw JetError("jet dimension must be in [1, " + std::to_string(kMaxJetDim) + "], got " +
                       std::to_string(dim));
    if (order < 0 || order > kMaxJetOrder)
        throw JetError("jet order must be in [0, " + std::to_string(kMaxJetOrder) + "], got " +
                       std::to_string(order));
    static std::mutex m;
    static std::map<std::pair<int, int>, JetLayout> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find({dim, order});
    if (it == cache.end())
        it = cache.emplace(std::make_pair(dim, order), JetLayout(dim, order)).first;
    return it->second;
}

int JetLayout::pos(const MultiIndex& a) const {
    for (int k = 0; k < 3; ++k) {
        if (a[k] < 0 || (k >= dim_ && a[k] != 0))
            throw JetError("multi-index uses variables beyond the jet dimension");
    }
    if (mi_degree(a) > order_)
        throw JetError("partial of order " + std::to_string(mi_degree(a)) +
                       " requested from a jet of order " + std::to_string(order_));
    return pos_[flat(a)];
}

Jet Jet::constant(int dim, int order, double v) {
    Jet j(dim, order);
    j.c_[0] = v;
    return j;
}

Jet Jet::variable(int dim, int order, int i, double x) {
    if (i < 0 || i >= dim) throw JetError("variable index out of range");
    Jet j(dim, order);
    j.c_[0] = x;
    if (order >= 1) {
        MultiIndex a{0, 0, 0};
        a[i] = 1;
        j.c_[j.layout_->pos(a)] = 1.0;
    }
    return j;
}

Jet Jet::derivative(int i) const {
    if (i < 0 || i >= dim()) throw JetError("derivative index out of range");
    if (order() == 0) throw JetError("derivative of an order-0 jet");
    Jet r(dim(), order() - 1);
    for (int p = 0; p < r.layout_->size(); ++p) {
        MultiIndex a = r.layout_->index(p);
        ++a[i];
        r.c_[p] = c_[layout_->pos(a)];
    }
    return r;
}

Jet Jet::truncated(int order) const {
    if (order >= this->order()) return *this;
    Jet r(dim(), order);
    for (int p = 0; p < r.layout_->size(); ++p) r.c_[p] = c_[p];
    return r;
}

namespace {

// Align two jets: equal dim required, orders truncated to the smaller.
void align(const Jet& a, const Jet& b, Jet& ta, Jet& tb) {
    if (a.dim() != b.dim()) throw JetError("combining jets of different dimensions");
    const int ord = std::min(a.order(), b.order());
    ta = a.truncated(ord);
    tb = b.truncated(ord);
}

}  // namespace

Jet Jet::operator-() const {
    Jet r = *this;
    for (double& v : r.c_) v = -v;
    return r;
}

Jet& Jet::operator+=(const Jet& o) { return *this = *this + o; }
Jet& Jet::operator-=(const Jet& o) { return *this = *this - o; }

Jet operator+(const Jet& a, const Jet& b) {
    Jet x, y;
    align(a, b, x, y);
    for (size_t p = 0; p < x.c_.size(); ++p) x.c_[p] += y.c_[p];
    return x;
}

Jet operator-(const Jet& a, const Jet& b) {
    Jet x, y;
    align(a, b, x, y);
    for (size_t p = 0; p < x.c_.size(); ++p) x.c_[p] -= y.c_[p];
    return x;
}

// General Leibniz rule in derivative-value convention:
//   d^a(fg) = sum_{b <= a} binom(a,b) d^b f d^{a-b} g
Jet operator*(const Jet& a, const Jet& b) {
    Jet x, y;
    align(a, b, x, y);
    const JetLayout& L = JetLayout::get(x.dim(), x.order());
    Jet r(x.dim(), x.order());
    for (int p = 0; p < L.size(); ++p) {
        const MultiIndex al = L.index(p);
        double acc = 0.0;
        MultiIndex be;
        for (be[0] = 0; be[0] <= al[0]; ++be[0])
            for (be[1] = 0; be[1] <= al[1]; ++be[1])
                for (be[2] = 0; be[2] <= al[2]; ++be[2]) {
                    const MultiIndex ga{al[0] - be[0], al[1] - be[1], al[2] - be[2]};
                    acc += mi_binom(al, be) * x.c_[L.pos(be)] * y.c_[L.pos(ga)];
                }
        r.c_[p] = acc;
    }
    return r;
}

// h = f/g solved coefficient by coefficient in graded order from f = h*g.
Jet operator/(const Jet& a, const Jet& b) {
    Jet f, g;
    align(a, b, f, g);
    if (g.c_[0] == 0.0) throw JetError("division by a jet with zero constant term");
    const JetLayout& L = JetLayout::get(f.dim(), f.order());
    Jet h(f.dim(), f.order());
    for (int p = 0; p < L.size(); ++p) {
        const MultiIndex al = L.index(p);
        double acc = f.c_[p];
        MultiIndex be;
        for (be[0] = 0; be[0] <= al[0]; ++be[0])
            for (be[1] = 0; be[1] <= al[1]; ++be[1])
                for (be[2] = 0; be[2] <= al[2]; ++be[2]) {
                    if (be == al) continue;
                    const MultiIndex ga{al[0] - be[0], al[1] - be[1], al[2] - be[2]};
                    acc -= mi_binom(al, be) * h.c_[L.pos(be)] * g.c_[L.pos(ga)];
                }
        h.c_[p] = acc / g.c_[0];
    }
    return h;
}

Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.c_[0] += s;
    return r;
}
Jet operator+(double s, const Jet& a) { return a + s; }
Jet operator-(const Jet& a, double s) { return a + (-s); }
Jet operator-(double s, const Jet& a) {
    Jet r = -a;
    r.c_[0] += s;
    return r;
}
Jet operator*(const Jet& a, double s) {
    Jet r = a;
    for (double& v : r.c_) v *= s;
    return r;
}
Jet operator*(double s, const Jet& a) { return a * s; }
Jet operator/(const Jet& a, double s) {
    if (s == 0.0) throw JetError("division of a jet by zero");
    return a * (1.0 / s);
}
Jet operator/(double s, const Jet& a) { return Jet::constant(a.dim(), a.order(), s) / a; }

// s*s = f, solved in graded order.
Jet sqrt(const Jet& f) {
    if (f.c_[0] <= 0.0) throw JetError("sqrt of a jet with nonpositive constant term");
    const JetLayout& L = *f.layout_;
    Jet s(f.dim(), f.order());
    s.c_[0] = std::sqrt(f.c_[0]);
    for (int p = 1; p < L.size(); ++p) {
        const MultiIndex al = L.index(p);
        double acc = f.c_[p];
        MultiIndex be;
        for (be[0] = 0; be[0] <= al[0]; ++be[0])
            for (be[1] = 0; be[1] <= al[1]; ++be[1])
                for (be[2] = 0; be[2] <= al[2]; ++be[2]) {
                    if (mi_degree(be) == 0 || be == al) continue;
                    const MultiIndex ga{al[0] - be[0], al[1] - be[1], al[2] - be[2]};
                    acc -= mi_binom(al, be) * s.c_[L.pos(be)] * s.c_[L.pos(ga)];
                }
        s.c_[p] = acc / (2.0 * s.c_[0]);
    }
    return s;
}

// d^(a'+e_i) E = sum_{b <= a'} binom(a',b) d^b E d^(a'-b+e_i) f
Jet exp(const Jet& f) {
    const JetLayout& L = *f.layout_;
    Jet e(f.dim(), f.order());
    e.c_[0] = std::exp(f.c_[0]);
    for (int p = 1; p < L.size(); ++p) {
        const MultiIndex al = L.index(p);
        int i = 0;
        while (al[i] == 0) ++i;
        MultiIndex ap = al;
        --ap[i];
        double acc = 0.0;
        MultiIndex be;
        for (be[0] = 0; be[0] <= ap[0]; ++be[0])
            for (be[1] = 0; be[1] <= ap[1]; ++be[1])
                for (be[2] = 0; be[2] <= ap[2]; ++be[2]) {
                    MultiIndex ga{ap[0] - be[0], ap[1] - be[1], ap[2] - be[2]};
                    ++ga[i];
                    acc += mi_binom(ap, be) * e.c_[L.pos(be)] * f.c_[L.pos(ga)];
                }
        e.c_[p] = acc;
    }
    return e;
}

// f * d_i G = d_i f, expanded by Leibniz and solved for the top coefficient.
Jet log(const Jet& f) {
    if (f.c_[0] <= 0.0) throw JetError("log of a jet with nonpositive constant term");
    const JetLayout& L = *f.layout_;
    Jet g(f.dim(), f.order());
    g.c_[0] = std::log(f.c_[0]);
    for (int p = 1; p < L.size(); ++p) {
        const MultiIndex al = L.index(p);
        int i = 0;
        while (al[i] == 0) ++i;
        MultiIndex ap = al;
        --ap[i];
        double acc = f.c_[p];
        MultiIndex be;
        for (be[0] = 0; be[0] <= ap[0]; ++be[0])
            for (be[1] = 0; be[1] <= ap[1]; ++be[1])
                for (be[2] = 0; be[2] <= ap[2]; ++be[2]) {
                    if (be == ap) continue;
                    MultiIndex bi = be;
                    ++bi[i];
                    const MultiIndex ga{ap[0] - be[0], ap[1] - be[1], ap[2] - be[2]};
                    acc -= mi_binom(ap, be) * f.c_[L.pos(ga)] * g.c_[L.pos(bi)];
                }
        g.c_[p] = acc / f.c_[0];
    }
    return g;
}

Jet powi(const Jet& f, int k) {
    if (k < 0) return Jet::constant(f.dim(), f.order(), 1.0) / powi(f, -k);
    Jet r = Jet::constant(f.dim(), f.order(), 1.0);
    Jet base = f;
    int e = k;
    while (e > 0) {
        if (e & 1) r = r * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return r;
}

}  // namespace hcap
