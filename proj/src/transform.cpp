#include "hcap/transform.hpp"

#include <cmath>

namespace hcap {

namespace {

double norm2(const std::array<double, 3>& p) {
    return p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
}

constexpr double kPoleEps = 1e-14;

}  // namespace

std::array<double, 3> CayleyMap::map_point(const std::array<double, 3>& p) const {
    if (direction == Direction::BallToHalfspace) {
        if (norm2(p) >= 1.0)
            throw DomainError("point is on or outside the unit sphere");
    } else {
        if (p[2] <= 0.0) throw DomainError("point is not in the open upper half-space");
    }
    const double denom = p[0] * p[0] + p[1] * p[1] + (p[2] + 1.0) * (p[2] + 1.0);
    if (denom < kPoleEps)
        throw DomainError("point at the pole (0,0,-1) of the model map");
    return cayley_involution<double>(p);
}

double isometry_residual(const CayleyMap& m, const std::array<double, 3>& p,
                         const std::array<double, 3>& v1, const std::array<double, 3>& v2) {
    if (m.direction == CayleyMap::Direction::BallToHalfspace) {
        if (norm2(p) >= 1.0) throw DomainError("point is on or outside the unit sphere");
    } else if (p[2] <= 0.0) {
        throw DomainError("point is not in the open upper half-space");
    }
    std::array<Jet, 3> seeds{Jet::variable(3, 1, 0, p[0]), Jet::variable(3, 1, 1, p[1]),
                             Jet::variable(3, 1, 2, p[2])};
    std::array<Jet, 3> img = cayley_involution<Jet>(seeds);
    Eigen::Matrix3d J;
    for (int i = 0; i < 3; ++i) {
        J(i, 0) = img[i].partial(mi(1, 0, 0));
        J(i, 1) = img[i].partial(mi(0, 1, 0));
        J(i, 2) = img[i].partial(mi(0, 0, 1));
    }
    const Eigen::Vector3d w1 = J * Eigen::Vector3d(v1[0], v1[1], v1[2]);
    const Eigen::Vector3d w2 = J * Eigen::Vector3d(v2[0], v2[1], v2[2]);
    const std::array<double, 3> q{img[0].value(), img[1].value(), img[2].value()};

    auto ball_pair = [](const std::array<double, 3>& at, const Eigen::Vector3d& a,
                        const Eigen::Vector3d& b) {
        const double lam = 2.0 / (1.0 - norm2(at));
        return lam * lam * a.dot(b);
    };
    auto half_pair = [](const std::array<double, 3>& at, const Eigen::Vector3d& a,
                        const Eigen::Vector3d& b) { return a.dot(b) / (at[2] * at[2]); };

    const Eigen::Vector3d e1(v1[0], v1[1], v1[2]), e2(v2[0], v2[1], v2[2]);
    if (m.direction == CayleyMap::Direction::BallToHalfspace)
        return std::abs(half_pair(q, w1, w2) - ball_pair(p, e1, e2));
    return std::abs(ball_pair(q, w1, w2) - half_pair(p, e1, e2));
}

double ball_distance(const std::array<double, 3>& p, const std::array<double, 3>& q) {
    const double d2 = (p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) +
                      (p[2] - q[2]) * (p[2] - q[2]);
    const double arg = 1.0 + 2.0 * d2 / ((1.0 - norm2(p)) * (1.0 - norm2(q)));
    return std::acosh(arg);
}

double halfspace_distance(const std::array<double, 3>& p, const std::array<double, 3>& q) {
    const double d2 = (p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) +
                      (p[2] - q[2]) * (p[2] - q[2]);
    return std::acosh(1.0 + d2 / (2.0 * p[2] * q[2]));
}

std::array<double, 3> geodesic(const std::array<double, 3>& p, const std::array<double, 3>& dir,
                               double t) {
    if (norm2(p) >= 1.0) throw DomainError("geodesic base point outside the ball");
    const double dn = std::sqrt(norm2(dir));
    if (dn == 0.0) throw DomainError("geodesic direction is zero");
    const double s = std::tanh(t / 2.0);
    if (std::abs(s) > 1.0 - 1e-12)
        throw DomainError("geodesic parameter numerically touches the boundary");
    const std::array<double, 3> step{s * dir[0] / dn, s * dir[1] / dn, s * dir[2] / dn};
    return mobius_translate<double>(p, step);
}

namespace {

Eigen::Matrix3d rotation_between(const Eigen::Vector3d& a_in, const Eigen::Vector3d& b_in) {
    const Eigen::Vector3d a = a_in.normalized(), b = b_in.normalized();
    const double c = a.dot(b);
    if (c < -1.0 + 1e-12) {
        // antipodal: rotate pi about any axis orthogonal to a
        Eigen::Vector3d axis = a.unitOrthogonal();
        return Eigen::AngleAxisd(M_PI, axis).toRotationMatrix();
    }
    const Eigen::Vector3d v = a.cross(b);
    Eigen::Matrix3d vx;
    vx << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return Eigen::Matrix3d::Identity() + vx + vx * vx / (1.0 + c);
}

}  // namespace

Jet invert_graph_jet(const Jet& y1, const Jet& y2, const Jet& y3) {
    const int order = std::min({y1.order(), y2.order(), y3.order()});
    const JetLayout& L = JetLayout::get(2, order);

    auto factorial = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    auto taylor_of = [&](const Jet& j) {
        std::vector<double> c(L.size());
        for (int p = 0; p < L.size(); ++p) {
            const MultiIndex a = L.index(p);
            c[p] = j.partial(a) / (factorial(a[0]) * factorial(a[1]));
        }
        return c;
    };
    auto series_mul = [&](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> c(L.size(), 0.0);
        for (int p = 0; p < L.size(); ++p) {
            const MultiIndex ga = L.index(p);
            double acc = 0.0;
            for (int b0 = 0; b0 <= ga[0]; ++b0)
                for (int b1 = 0; b1 <= ga[1]; ++b1)
                    acc += a[L.pos(mi(b0, b1))] * b[L.pos(mi(ga[0] - b0, ga[1] - b1))];
            c[p] = acc;
        }
        return c;
    };

    std::vector<double> p1 = taylor_of(y1), p2 = taylor_of(y2), f = taylor_of(y3);
    p1[0] = 0.0;  // expand about the image point
    p2[0] = 0.0;

    // powers of the offset series, p1^i * p2^j for i + j <= order
    std::vector<std::vector<double>> pow1(order + 1), pow2(order + 1);
    pow1[0] = pow2[0] = std::vector<double>(L.size(), 0.0);
    pow1[0][0] = pow2[0][0] = 1.0;
    for (int k = 1; k <= order; ++k) {
        pow1[k] = series_mul(pow1[k - 1], p1);
        pow2[k] = series_mul(pow2[k - 1], p2);
    }
    auto monomial = [&](int i, int j) { return series_mul(pow1[i], pow2[j]); };

    // linear parts only, for the order-k solve matrices
    std::vector<double> l1(L.size(), 0.0), l2(L.size(), 0.0);
    l1[L.pos(mi(1, 0))] = p1[L.pos(mi(1, 0))];
    l1[L.pos(mi(0, 1))] = p1[L.pos(mi(0, 1))];
    l2[L.pos(mi(1, 0))] = p2[L.pos(mi(1, 0))];
    l2[L.pos(mi(0, 1))] = p2[L.pos(mi(0, 1))];
    const double jac_det = l1[L.pos(mi(1, 0))] * l2[L.pos(mi(0, 1))] -
                           l1[L.pos(mi(0, 1))] * l2[L.pos(mi(1, 0))];
    if (std::abs(jac_det) < 1e-14)
        throw GeometryError("graph transfer: horizontal projection is singular");
    std::vector<std::vector<double>> lpow1(order + 1), lpow2(order + 1);
    lpow1[0] = lpow2[0] = pow1[0];
    for (int k = 1; k <= order; ++k) {
        lpow1[k] = series_mul(lpow1[k - 1], l1);
        lpow2[k] = series_mul(lpow2[k - 1], l2);
    }

    std::vector<double> U(L.size(), 0.0);
    U[0] = f[0];
    for (int k = 1; k <= order; ++k) {
        // composition with the coefficients known so far
        std::vector<double> comp(L.size(), 0.0);
        for (int p = 0; p < L.size(); ++p) {
            const MultiIndex a = L.index(p);
            if (mi_degree(a) >= k || U[p] == 0.0) continue;
            const std::vector<double> mono = monomial(a[0], a[1]);
            for (int q = 0; q < L.size(); ++q) comp[q] += U[p] * mono[q];
        }
        // unknowns: alpha = (k,0), (k-1,1), ..., (0,k); equations over the
        // order-k multi-indices of the chart variables
        Eigen::MatrixXd A(k + 1, k + 1);
        Eigen::VectorXd rhs(k + 1);
        for (int row = 0; row <= k; ++row) {
            const MultiIndex beta = mi(k - row, row);
            rhs[row] = f[L.pos(beta)] - comp[L.pos(beta)];
            for (int col = 0; col <= k; ++col) {
                const std::vector<double> lm = series_mul(lpow1[k - col], lpow2[col]);
                A(row, col) = lm[L.pos(beta)];
            }
        }
        const Eigen::VectorXd sol = A.fullPivLu().solve(rhs);
        for (int col = 0; col <= k; ++col) U[L.pos(mi(k - col, col))] = sol[col];
    }

    Jet out(2, order);
    for (int p = 0; p < L.size(); ++p) {
        const MultiIndex a = L.index(p);
        out.at(a) = U[p] * factorial(a[0]) * factorial(a[1]);
    }
    return out;
}

TransferHeight::TransferHeight(BallPatch patch, NormalizationMotion motion,
                               std::array<double, 2> center_param)
    : patch_(std::move(patch)), motion_(std::move(motion)), p0_(center_param) {}

std::array<Jet, 3> TransferHeight::image_jets(double s, double t, int order) const {
    const std::vector<double> pt{s, t};
    std::array<Jet, 3> X{patch_.chart[0]->lift(pt, order), patch_.chart[1]->lift(pt, order),
                         patch_.chart[2]->lift(pt, order)};
    return motion_.apply_components<Jet>(X);
}

std::array<double, 2> TransferHeight::solve_param(std::span<const double> x) const {
    double s = p0_[0], t = p0_[1];
    for (int it = 0; it < 80; ++it) {
        std::array<Jet, 3> Y = image_jets(s, t, 1);
        const double f1 = Y[0].value() - x[0];
        const double f2 = Y[1].value() - x[1];
        if (std::abs(f1) + std::abs(f2) < 1e-14) return {s, t};
        const double a = Y[0].partial(mi(1, 0)), b = Y[0].partial(mi(0, 1));
        const double c = Y[1].partial(mi(1, 0)), d = Y[1].partial(mi(0, 1));
        const double det = a * d - b * c;
        if (std::abs(det) < 1e-16)
            throw GeometryError("graph transfer: singular projection during parameter solve");
        double ds = (-d * f1 + b * f2) / det;
        double dt = (c * f1 - a * f2) / det;
        // keep the iterate inside the chart rectangle
        s = std::clamp(s + ds, patch_.s_range[0], patch_.s_range[1]);
        t = std::clamp(t + dt, patch_.t_range[0], patch_.t_range[1]);
    }
    std::array<Jet, 3> Y = image_jets(s, t, 0);
    if (std::abs(Y[0].value() - x[0]) + std::abs(Y[1].value() - x[1]) > 1e-10)
        throw GeometryError("graph transfer: parameter solve did not converge");
    return {s, t};
}

Jet TransferHeight::jet(std::span<const double> x, int order) const {
    const std::array<double, 2> st = solve_param(x);
    // the inversion needs the horizontal Jacobian even for a value read
    std::array<Jet, 3> Y = image_jets(st[0], st[1], std::max(order, 1));
    return invert_graph_jet(Y[0], Y[1], Y[2]).truncated(order);
}

std::pair<NormalizationMotion, HalfspaceGraph> normalize_neighborhood(const BallPatch& patch,
                                                                      double s, double t,
                                                                      double target_height) {
    if (target_height <= 0.0)
        throw GeometryError("normalization target height must be positive");

    detail::BallJets b;
    try {
        b = detail::ball_jets(patch, s, t, 2);
    } catch (const GeometryError& e) {
        throw NonGraphicalError(std::string("normalization failed at the base point: ") +
                                    e.what(),
                                0.0);
    }
    const std::array<double, 3> P{b.X[0].value(), b.X[1].value(), b.X[2].value()};
    const Eigen::Vector3d normal(b.normal[0].value(), b.normal[1].value(), b.normal[2].value());

    NormalizationMotion motion;
    motion.base_point = P;
    motion.geodesic_shift = std::log(target_height);

    // direction of the normal after the translation to the origin
    {
        std::array<Jet, 3> seeds{Jet::variable(3, 1, 0, P[0]), Jet::variable(3, 1, 1, P[1]),
                                 Jet::variable(3, 1, 2, P[2])};
        const std::array<double, 3> neg{-P[0], -P[1], -P[2]};
        std::array<Jet, 3> img = mobius_translate<Jet>(neg, seeds);
        Eigen::Matrix3d J;
        for (int i = 0; i < 3; ++i) {
            J(i, 0) = img[i].partial(mi(1, 0, 0));
            J(i, 1) = img[i].partial(mi(0, 1, 0));
            J(i, 2) = img[i].partial(mi(0, 0, 1));
        }
        motion.rotation = rotation_between(J * normal, Eigen::Vector3d::UnitZ());
    }

    TransferHeight probe(patch, motion, {s, t});

    // shrink the parameter radius until the mapped ring passes the vertical
    // graph test and the normal-component admissibility bound
    const double margin = std::min(
        {s - patch.s_range[0], patch.s_range[1] - s, t - patch.t_range[0], patch.t_range[1] - t});
    double rp = std::max(margin * 0.9, 1e-6);
    double best_radius = 0.0;
    for (; rp > 1e-5; rp *= 0.5) {
        bool ok = true;
        double min_u = 1e300, max_u = 0.0, min_nu2 = 1.0, min_horiz = 1e300;
        for (int k = 0; k < 16 && ok; ++k) {
            const double ang = 2.0 * M_PI * k / 16.0;
            for (double frac : {1.0, 0.6}) {
                const double ss = s + frac * rp * std::cos(ang);
                const double tt = t + frac * rp * std::sin(ang);
                std::array<Jet, 3> Y;
                try {
                    const std::vector<double> pq{ss, tt};
                    std::array<Jet, 3> X{patch.chart[0]->lift(pq, 1),
                                         patch.chart[1]->lift(pq, 1),
                                         patch.chart[2]->lift(pq, 1)};
                    Y = motion.apply_components<Jet>(X);
                } catch (const Error&) {
                    ok = false;
                    break;
                }
                Eigen::Vector3d Ys(Y[0].partial(mi(1, 0)), Y[1].partial(mi(1, 0)),
                                   Y[2].partial(mi(1, 0)));
                Eigen::Vector3d Yt(Y[0].partial(mi(0, 1)), Y[1].partial(mi(0, 1)),
                                   Y[2].partial(mi(0, 1)));
                Eigen::Vector3d nrm = Ys.cross(Yt);
                const double nn = nrm.norm();
                if (nn < 1e-14 || std::abs(nrm.z()) / nn < 0.05) {
                    ok = false;
                    break;
                }
                const double u = Y[2].value();
                if (u <= 0.0) {
                    ok = false;
                    break;
                }
                min_u = std::min(min_u, u);
                max_u = std::max(max_u, u);
                min_nu2 = std::min(min_nu2, nrm.z() * nrm.z() / (nn * nn));
                if (frac == 1.0)
                    min_horiz = std::min(
                        min_horiz, std::hypot(Y[0].value(), Y[1].value()));
            }
        }
        if (ok) {
            const double bound = min_u / (4.0 * max_u);
            if (min_nu2 > 1.0 - bound * bound) {
                best_radius = rp;
                // the model map reverses the vertical axis, so the
                // transported surface normal is the graph's downward normal
                HalfspaceGraph graph(std::make_shared<TransferHeight>(patch, motion,
                                                                      std::array<double, 2>{s, t}),
                                     Domain::disc(0.8 * min_horiz), Orientation::Downward);
                return {motion, graph};
            }
        }
    }
    throw NonGraphicalError(
        "neighborhood is not a vertical graph at any tested radius", best_radius);
}

}  // namespace hcap
