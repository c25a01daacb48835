#pragma once

#include <Eigen/Dense>
#include <array>

#include "hcap/ball.hpp"
#include "hcap/halfspace.hpp"

namespace hcap {

/// The ball <-> upper half-space coordinate change. The raw rational map
/// sends the ball interior to the lower half-space; composing with the
/// reflection z -> -z (recorded in reflection_applied) lands in the upper
/// half-space and makes the map its own inverse:
///   (x,y,z) -> (2x, 2y, 1-|p|^2) / (x^2 + y^2 + (z+1)^2).
template <class T>
std::array<T, 3> cayley_involution(const std::array<T, 3>& p) {
    T denom = p[0] * p[0] + p[1] * p[1] + (p[2] + 1.0) * (p[2] + 1.0);
    T nrm2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    return {2.0 * p[0] / denom, 2.0 * p[1] / denom, (1.0 - nrm2) / denom};
}

struct CayleyMap {
    enum class Direction { BallToHalfspace, HalfspaceToBall };
    Direction direction = Direction::BallToHalfspace;
    bool reflection_applied = true;  // orientation fix, see above

    static CayleyMap ball_to_halfspace() { return {Direction::BallToHalfspace, true}; }
    static CayleyMap halfspace_to_ball() { return {Direction::HalfspaceToBall, true}; }

    /// Maps a point, checking the source domain and the pole (0,0,-1).
    std::array<double, 3> map_point(const std::array<double, 3>& p) const;
};

/// | <dphi v1, dphi v2>_target - <v1, v2>_source | with the differential
/// computed by jets; the numerical certificate that the map is an isometry.
double isometry_residual(const CayleyMap& m, const std::array<double, 3>& p,
                         const std::array<double, 3>& v1, const std::array<double, 3>& v2);

/// Hyperbolic distances in each model.
double ball_distance(const std::array<double, 3>& p, const std::array<double, 3>& q);
double halfspace_distance(const std::array<double, 3>& p, const std::array<double, 3>& q);

/// Mobius translation of the ball taking the origin to `a`; a hyperbolic
/// isometry fixing the geodesic through 0 and a.
template <class T>
std::array<T, 3> mobius_translate(const std::array<double, 3>& a, const std::array<T, 3>& x) {
    const double na2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    T ax = a[0] * x[0] + a[1] * x[1] + a[2] * x[2];
    T nx2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    T denom = 1.0 + 2.0 * ax + na2 * nx2;
    T ca = 1.0 + 2.0 * ax + nx2;
    const double cx = 1.0 - na2;
    return {(ca * a[0] + cx * x[0]) / denom, (ca * a[1] + cx * x[1]) / denom,
            (ca * a[2] + cx * x[2]) / denom};
}

/// Unit-speed geodesic of the ball model from p with initial tangent
/// direction dir (normalized internally in the ball metric); returns
/// gamma(t).
std::array<double, 3> geodesic(const std::array<double, 3>& p, const std::array<double, 3>& dir,
                               double t);

/// The three-step normalization: Mobius-translate the surface point to the
/// origin, rotate its normal onto the z-axis, push it down the axis by the
/// geodesic shift, then apply the Cayley map. Sends the point to
/// (0, 0, e^shift) in the upper half-space with a vertical normal.
struct NormalizationMotion {
    std::array<double, 3> base_point{0, 0, 0};  // pre-translated to the origin
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    double geodesic_shift = 0.0;

    /// Full motion, ball -> upper half-space.
    template <class T>
    std::array<T, 3> apply_components(const std::array<T, 3>& q) const {
        const std::array<double, 3> neg{-base_point[0], -base_point[1], -base_point[2]};
        std::array<T, 3> c = mobius_translate<T>(neg, q);
        std::array<T, 3> r{rotation(0, 0) * c[0] + rotation(0, 1) * c[1] + rotation(0, 2) * c[2],
                           rotation(1, 0) * c[0] + rotation(1, 1) * c[1] + rotation(1, 2) * c[2],
                           rotation(2, 0) * c[0] + rotation(2, 1) * c[1] + rotation(2, 2) * c[2]};
        const double s = std::tanh(geodesic_shift / 2.0);
        std::array<T, 3> shifted = mobius_translate<T>({0.0, 0.0, -s}, r);
        return cayley_involution<T>(shifted);
    }

    std::array<double, 3> apply(const std::array<double, 3>& q) const {
        return apply_components<double>(q);
    }
};

/// Height field of a normalized neighborhood: solves the chart parameters
/// for each horizontal position by Newton iteration and transfers the full
/// jet of the image surface through truncated-series inversion, so the
/// returned derivatives are exact to roundoff.
class TransferHeight final : public HeightField {
  public:
    TransferHeight(BallPatch patch, NormalizationMotion motion, std::array<double, 2> center_param);

    int dim() const override { return 2; }
    int max_order() const override { return kMaxJetOrder; }
    Jet jet(std::span<const double> x, int order) const override;

    /// Chart parameters (s,t) whose image lies above x; Newton from the
    /// center parameter.
    std::array<double, 2> solve_param(std::span<const double> x) const;

    const NormalizationMotion& motion() const { return motion_; }
    const BallPatch& patch() const { return patch_; }

  private:
    std::array<Jet, 3> image_jets(double s, double t, int order) const;
    BallPatch patch_;
    NormalizationMotion motion_;
    std::array<double, 2> p0_;
};

/// Normalize a neighborhood of patch point p into a vertical graph with
/// u(0) = target_height and vanishing gradient at the new origin. The patch
/// radius shrinks by halving until the neighborhood passes the vertical
/// graph test and the normal-component admissibility bound; failure raises
/// NonGraphicalError carrying the last radius tried.
std::pair<NormalizationMotion, HalfspaceGraph> normalize_neighborhood(const BallPatch& patch,
                                                                      double s, double t,
                                                                      double target_height);

/// Solve U(P1, P2) = F for the jet of U where (P1, P2) has invertible linear
/// part at the expansion point; the engine behind TransferHeight.
Jet invert_graph_jet(const Jet& y1, const Jet& y2, const Jet& y3);

}  // namespace hcap
