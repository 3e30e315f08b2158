#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "pacstl/interval.hpp"

#include <json.hpp>

namespace pacstl {

// Convex set representations used for reachable-set estimates. Both are
// immutable after construction; every operation returns a new value.

// {x : ||A x - b||_2 <= 1} with A symmetric positive definite.
// center = A^{-1} b. Validation tolerance 1e-10 (relative) on symmetry and
// positive definiteness.
class Ellipsoid {
  public:
    Ellipsoid(Eigen::MatrixXd A, Eigen::VectorXd b);

    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::VectorXd& b() const { return b_; }
    int dim() const { return static_cast<int>(b_.size()); }

    Eigen::VectorXd center() const;
    // Solves A y = x (A is SPD, cached Cholesky factorization).
    Eigen::VectorXd solve(const Eigen::VectorXd& x) const;
    double condition() const { return cond_; }

  private:
    Eigen::MatrixXd A_;
    Eigen::VectorXd b_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double cond_ = 1.0;
};

// {c + G a : ||a||_inf <= 1}. Membership testing uses the cached pseudoinverse
// (singular values below 1e-10 * sigma_max dropped), which is conservative for
// g > n: a pass guarantees membership, a fail is inconclusive.
class Zonotope {
  public:
    Zonotope(Eigen::VectorXd c, Eigen::MatrixXd G);

    const Eigen::VectorXd& c() const { return c_; }
    const Eigen::MatrixXd& G() const { return G_; }
    const Eigen::MatrixXd& Gpinv() const { return Gpinv_; }
    int dim() const { return static_cast<int>(c_.size()); }
    int generators() const { return static_cast<int>(G_.cols()); }

  private:
    Eigen::VectorXd c_;
    Eigen::MatrixXd G_;
    Eigen::MatrixXd Gpinv_;
};

using ConvexSet = std::variant<Ellipsoid, Zonotope>;

int set_dim(const ConvexSet& s);

// Membership. Ellipsoid: exact up to roundoff. Zonotope: conservative
// pseudoinverse test, never an exact infinity-norm program.
bool contains(const Ellipsoid& e, const Eigen::VectorXd& x);
bool contains(const Zonotope& z, const Eigen::VectorXd& x);
bool contains(const ConvexSet& s, const Eigen::VectorXd& x);

// Support function max_{x in S} a^T x (exact for both representations).
double support(const Ellipsoid& e, const Eigen::VectorXd& a);
double support(const Zonotope& z, const Eigen::VectorXd& a);
double support(const ConvexSet& s, const Eigen::VectorXd& a);

// Exact coordinate range [-support(-e_i), support(e_i)].
Interval project_coord(const ConvexSet& s, int axis);

// Planar shadows used by distance computations.
// Ellipse {y : (y - c)^T Shape^{-1} (y - c) <= 1}; Shape PSD, possibly singular
// (degenerates to a segment or point).
struct PlanarEllipse {
    Eigen::Vector2d center;
    Eigen::Matrix2d shape;
};

// Counterclockwise vertex list; 2 vertices = segment, 1 = point.
struct PlanarPolygon {
    std::vector<Eigen::Vector2d> verts;
};

using PlanarSet = std::variant<PlanarEllipse, PlanarPolygon>;

// Exact projection onto the (axis_x, axis_y) coordinate plane. An ellipsoid
// projects to an ellipse, a zonotope to a polygon with at most 2g vertices.
PlanarSet project_plane(const ConvexSet& s, int axis_x, int axis_y);

// [min, max] of ||p - y|| over the planar set. Ellipse extremes are found by
// root-finding the Lagrange-multiplier secular equation (safeguarded Newton
// with bisection fallback, tolerance 1e-10 on the multiplier); polygon max is
// over vertices, min over edges (zero if p is inside).
Interval norm_range(const PlanarSet& ps, const Eigen::Vector2d& p);

// Image of the set under y = R x + t with R orthogonal (exact for both
// representations; the ellipsoid matrix stays SPD via R A R^T).
ConvexSet affine_transport(const ConvexSet& s, const Eigen::MatrixXd& R,
                           const Eigen::VectorXd& t);

// Volume (Lebesgue measure) of the set; zonotope volume sums |det| over all
// n-subsets of generators.
double volume(const Ellipsoid& e);
double volume(const Zonotope& z);
double volume(const ConvexSet& s);

// JSON round-trip: {"type":"ellipsoid","A":[[..]],"b":[..]} or
// {"type":"zonotope","G":[[..]],"c":[..]} with row-major matrices.
nlohmann::json set_to_json(const ConvexSet& s);
ConvexSet set_from_json(const nlohmann::json& j);

}  // namespace pacstl
