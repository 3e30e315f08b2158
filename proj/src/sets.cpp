#include "pacstl/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace pacstl {

namespace {

constexpr double kSymTol = 1e-10;
constexpr double kPinvCutoff = 1e-10;

double unit_ball_volume(int n) {
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

}  // namespace

Ellipsoid::Ellipsoid(Eigen::MatrixXd A, Eigen::VectorXd b) : A_(std::move(A)), b_(std::move(b)) {
    if (A_.rows() != A_.cols())
        throw std::invalid_argument("Ellipsoid: A must be square");
    if (A_.rows() != b_.size())
        throw std::invalid_argument("Ellipsoid: A and b dimensions disagree");
    if (!A_.allFinite() || !b_.allFinite())
        throw std::invalid_argument("Ellipsoid: non-finite entries");
    const double scale = A_.cwiseAbs().maxCoeff();
    if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > kSymTol * std::max(1.0, scale))
        throw std::invalid_argument("Ellipsoid: A must be symmetric");
    A_ = 0.5 * (A_ + A_.transpose().eval());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A_);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > kSymTol * std::max(1.0, lmax)))
        throw std::invalid_argument("Ellipsoid: A must be positive definite (min eigenvalue " +
                                    std::to_string(lmin) + ")");
    cond_ = lmax / lmin;
    llt_.compute(A_);
    if (llt_.info() != Eigen::Success)
        throw std::runtime_error("Ellipsoid: Cholesky factorization failed, condition number " +
                                 std::to_string(cond_));
}

Eigen::VectorXd Ellipsoid::center() const { return llt_.solve(b_); }

Eigen::VectorXd Ellipsoid::solve(const Eigen::VectorXd& x) const { return llt_.solve(x); }

Zonotope::Zonotope(Eigen::VectorXd c, Eigen::MatrixXd G) : c_(std::move(c)), G_(std::move(G)) {
    if (G_.rows() != c_.size())
        throw std::invalid_argument("Zonotope: G and c dimensions disagree");
    if (G_.cols() < 1)
        throw std::invalid_argument("Zonotope: at least one generator required");
    if (!G_.allFinite() || !c_.allFinite())
        throw std::invalid_argument("Zonotope: non-finite entries");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = kPinvCutoff * sv.maxCoeff();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    Gpinv_ = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

int set_dim(const ConvexSet& s) {
    return std::visit([](const auto& v) { return v.dim(); }, s);
}

bool contains(const Ellipsoid& e, const Eigen::VectorXd& x) {
    if (x.size() != e.dim()) throw std::invalid_argument("contains: dimension mismatch");
    return (e.A() * x - e.b()).norm() <= 1.0 + 1e-12;
}

bool contains(const Zonotope& z, const Eigen::VectorXd& x) {
    if (x.size() != z.dim()) throw std::invalid_argument("contains: dimension mismatch");
    const Eigen::VectorXd d = x - z.c();
    const Eigen::VectorXd alpha = z.Gpinv() * d;
    if (alpha.lpNorm<Eigen::Infinity>() > 1.0 + 1e-12) return false;
    // Guard against rank-deficient G: the coefficient must actually reproduce x.
    return (z.G() * alpha - d).norm() <= 1e-9 * (1.0 + d.norm());
}

bool contains(const ConvexSet& s, const Eigen::VectorXd& x) {
    return std::visit([&](const auto& v) { return contains(v, x); }, s);
}

double support(const Ellipsoid& e, const Eigen::VectorXd& a) {
    if (a.size() != e.dim()) throw std::invalid_argument("support: dimension mismatch");
    return a.dot(e.center()) + e.solve(a).norm();
}

double support(const Zonotope& z, const Eigen::VectorXd& a) {
    if (a.size() != z.dim()) throw std::invalid_argument("support: dimension mismatch");
    return a.dot(z.c()) + (z.G().transpose() * a).cwiseAbs().sum();
}

double support(const ConvexSet& s, const Eigen::VectorXd& a) {
    return std::visit([&](const auto& v) { return support(v, a); }, s);
}

Interval project_coord(const ConvexSet& s, int axis) {
    const int n = set_dim(s);
    if (axis < 0 || axis >= n) throw std::invalid_argument("project_coord: axis out of range");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(axis) = 1.0;
    const double hi = support(s, e);
    e(axis) = -1.0;
    const double lo = -support(s, e);
    return Interval(lo, hi);
}

namespace {

Eigen::MatrixXd plane_selector(int n, int ax, int ay) {
    if (ax < 0 || ay < 0 || ax >= n || ay >= n || ax == ay)
        throw std::invalid_argument("project_plane: invalid axis pair");
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2, n);
    P(0, ax) = 1.0;
    P(1, ay) = 1.0;
    return P;
}

// Walks the boundary of a 2-D zonotope: generators flipped into the upper
// half-plane and sorted by angle trace one chain, the other chain is the point
// reflection through the center. At most 2g vertices, counterclockwise.
PlanarPolygon zonotope_shadow(const Eigen::Vector2d& c, const Eigen::Matrix2Xd& G) {
    std::vector<Eigen::Vector2d> gens;
    double scale = 0.0;
    for (int j = 0; j < G.cols(); ++j) scale = std::max(scale, G.col(j).norm());
    for (int j = 0; j < G.cols(); ++j) {
        Eigen::Vector2d g = G.col(j);
        if (g.norm() <= 1e-12 * std::max(1.0, scale)) continue;
        if (g.y() < 0.0 || (g.y() == 0.0 && g.x() < 0.0)) g = -g;
        gens.push_back(g);
    }
    if (gens.empty()) return PlanarPolygon{{c}};

    bool all_parallel = true;
    for (std::size_t j = 1; j < gens.size(); ++j) {
        const double cross = gens[0].x() * gens[j].y() - gens[0].y() * gens[j].x();
        if (std::abs(cross) > 1e-12 * gens[0].norm() * gens[j].norm()) {
            all_parallel = false;
            break;
        }
    }
    if (all_parallel) {
        const Eigen::Vector2d d = gens[0].normalized();
        double half = 0.0;
        for (const auto& g : gens) half += std::abs(d.dot(g));
        return PlanarPolygon{{c - half * d, c + half * d}};
    }

    std::sort(gens.begin(), gens.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
    });

    Eigen::Vector2d v = c;
    for (const auto& g : gens) v -= g;
    std::vector<Eigen::Vector2d> chain{v};
    for (const auto& g : gens) {
        v += 2.0 * g;
        chain.push_back(v);
    }
    PlanarPolygon poly;
    poly.verts = chain;
    for (std::size_t i = chain.size() - 2; i >= 1; --i) poly.verts.push_back(2.0 * c - chain[i]);
    return poly;
}

}  // namespace

PlanarSet project_plane(const ConvexSet& s, int axis_x, int axis_y) {
    const int n = set_dim(s);
    const Eigen::MatrixXd P = plane_selector(n, axis_x, axis_y);
    if (const auto* e = std::get_if<Ellipsoid>(&s)) {
        // {x : (x - m)^T A^2 (x - m) <= 1} projects to shape P A^{-2} P^T,
        // assembled as M^T M with M = A^{-1} P^T solved column by column.
        Eigen::MatrixXd m(n, 2);
        m.col(0) = e->solve(P.row(0).transpose());
        m.col(1) = e->solve(P.row(1).transpose());
        PlanarEllipse pe;
        pe.center = P * e->center();
        pe.shape = m.transpose() * m;
        pe.shape = 0.5 * (pe.shape + pe.shape.transpose().eval());
        return pe;
    }
    const auto& z = std::get<Zonotope>(s);
    const Eigen::Vector2d c2 = P * z.c();
    const Eigen::Matrix2Xd G2 = P * z.G();
    return zonotope_shadow(c2, G2);
}

namespace {

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

bool point_in_polygon(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& v) {
    // Crossing-number test; boundary points are resolved by the edge-distance
    // minimum anyway, so ties here are harmless.
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const bool straddles = (v[i].y() > p.y()) != (v[j].y() > p.y());
        if (straddles) {
            const double x_at =
                v[j].x() + (v[i].x() - v[j].x()) * (p.y() - v[j].y()) / (v[i].y() - v[j].y());
            if (p.x() < x_at) inside = !inside;
        }
    }
    return inside;
}

// Monotone root of f(mu) = sum_i q_i^2 l_i / (l_i - mu)^2 = 1 between a and b
// (f(a) and f(b) bracket 1). Newton iteration safeguarded by bisection,
// tolerance 1e-10 on the multiplier.
double secular_root(const Eigen::Vector2d& q, const Eigen::Vector2d& l, double a, double b) {
    auto f = [&](double mu) {
        double val = 0.0, dval = 0.0;
        for (int i = 0; i < 2; ++i) {
            if (q(i) == 0.0 || l(i) == 0.0) continue;
            const double d = l(i) - mu;
            val += q(i) * q(i) * l(i) / (d * d);
            dval += 2.0 * q(i) * q(i) * l(i) / (d * d * d);
        }
        return std::make_pair(val - 1.0, dval);
    };
    if (a > b) std::swap(a, b);
    double fa = f(a).first;
    double mu = 0.5 * (a + b);
    const double tol = 1e-10;
    for (int it = 0; it < 200; ++it) {
        auto [val, dval] = f(mu);
        if ((val > 0.0) == (fa > 0.0)) {
            a = mu;
            fa = val;
        } else {
            b = mu;
        }
        double next = mu;
        if (dval != 0.0) next = mu - val / dval;
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::abs(next - mu) <= tol * std::max(1.0, std::abs(next))) return next;
        mu = next;
    }
    if (b - a <= 1e-8 * std::max(1.0, std::abs(mu))) return mu;
    throw std::runtime_error("norm_range: secular-equation solver did not converge");
}

Interval ellipse_norm_range(const PlanarEllipse& pe, const Eigen::Vector2d& p) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(pe.shape);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("norm_range: eigendecomposition of ellipse shape failed");
    // Eigenvalues ascending: l(0) = minor^2, l(1) = major^2.
    const Eigen::Vector2d l = es.eigenvalues().cwiseMax(0.0);
    const Eigen::Matrix2d V = es.eigenvectors();
    const Eigen::Vector2d q = V.transpose() * (p - pe.center);
    const double lmaj = l(1), lmin = l(0);
    const double scale = std::sqrt(lmaj) + q.norm();

    if (lmaj <= 1e-24 * std::max(1.0, scale * scale)) {
        const double d = (p - pe.center).norm();
        return Interval(d, d);
    }
    if (lmin <= 1e-20 * lmaj) {
        // Segment of half-length sqrt(lmaj) along the major axis.
        const Eigen::Vector2d axis = V.col(1);
        const Eigen::Vector2d sa = pe.center - std::sqrt(lmaj) * axis;
        const Eigen::Vector2d sb = pe.center + std::sqrt(lmaj) * axis;
        return Interval(point_segment_distance(p, sa, sb),
                        std::max((p - sa).norm(), (p - sb).norm()));
    }
    if (lmaj - lmin <= 1e-12 * lmaj) {
        // Circle of radius sqrt(lmaj).
        const double r = std::sqrt(lmaj);
        const double d = q.norm();
        return Interval(std::max(0.0, d - r), d + r);
    }

    auto dist_at = [&](double mu) {
        double d2 = 0.0;
        for (int i = 0; i < 2; ++i) {
            if (q(i) == 0.0) continue;
            const double den = l(i) - mu;
            d2 += q(i) * q(i) / (den * den);
        }
        return std::abs(mu) * std::sqrt(d2);
    };

    const double sum_q2l = q(0) * q(0) * lmin + q(1) * q(1) * lmaj;

    // Minimum: zero inside, otherwise the multiplier lies in (-inf, 0).
    double dmin = 0.0;
    const double inside = q(0) * q(0) / lmin + q(1) * q(1) / lmaj;
    if (inside > 1.0) {
        const double lo = -(std::sqrt(sum_q2l) + 1.0);
        dmin = dist_at(secular_root(q, l, lo, 0.0));
    }

    // Maximum: multiplier in (lmaj, inf) unless the component along the major
    // axis vanishes (hard case: KKT point sits at the pole with a free
    // major-axis component).
    double dmax;
    const double q_major = q(1);
    const double frest = q(0) * q(0) * lmin / ((lmin - lmaj) * (lmin - lmaj));
    if (std::abs(q_major) <= 1e-12 * std::max(1.0, scale) && frest <= 1.0) {
        const double y_min = q(0) * lmin / (lmin - lmaj);
        const double y_maj_sq = std::max(0.0, lmaj * (1.0 - y_min * y_min / lmin));
        dmax = std::sqrt(y_maj_sq + (y_min - q(0)) * (y_min - q(0)) + q_major * q_major);
    } else {
        const double lo = lmaj + 1e-14 * std::max(1.0, lmaj);
        const double hi = lmaj + std::sqrt(sum_q2l) + 1.0;
        dmax = dist_at(secular_root(q, l, lo, hi));
    }
    return Interval(dmin, dmax);
}

Interval polygon_norm_range(const PlanarPolygon& poly, const Eigen::Vector2d& p) {
    const auto& v = poly.verts;
    if (v.empty()) throw std::invalid_argument("norm_range: empty polygon");
    if (v.size() == 1) {
        const double d = (p - v[0]).norm();
        return Interval(d, d);
    }
    double dmax = 0.0;
    for (const auto& vert : v) dmax = std::max(dmax, (p - vert).norm());
    if (v.size() == 2) return Interval(point_segment_distance(p, v[0], v[1]), dmax);

    double dmin = 0.0;
    if (!point_in_polygon(p, v)) {
        dmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
            dmin = std::min(dmin, point_segment_distance(p, v[j], v[i]));
    }
    return Interval(dmin, dmax);
}

}  // namespace

Interval norm_range(const PlanarSet& ps, const Eigen::Vector2d& p) {
    if (const auto* pe = std::get_if<PlanarEllipse>(&ps)) return ellipse_norm_range(*pe, p);
    return polygon_norm_range(std::get<PlanarPolygon>(ps), p);
}

ConvexSet affine_transport(const ConvexSet& s, const Eigen::MatrixXd& R, const Eigen::VectorXd& t) {
    const int n = set_dim(s);
    if (R.rows() != n || R.cols() != n || t.size() != n)
        throw std::invalid_argument("affine_transport: dimension mismatch");
    if ((R.transpose() * R - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("affine_transport: R must be orthogonal");
    if (const auto* e = std::get_if<Ellipsoid>(&s)) {
        // ||A R^T (y - t) - b|| = ||(R A R^T) y - ((R A R^T) t + R b)|| via the
        // polar decomposition of A R^T; the transported matrix stays SPD.
        Eigen::MatrixXd A2 = R * e->A() * R.transpose();
        A2 = 0.5 * (A2 + A2.transpose().eval());
        const Eigen::VectorXd b2 = A2 * t + R * e->b();
        return Ellipsoid(A2, b2);
    }
    const auto& z = std::get<Zonotope>(s);
    return Zonotope(R * z.c() + t, R * z.G());
}

double volume(const Ellipsoid& e) {
    // vol = vol(unit ball) * det(A^{-1}).
    return unit_ball_volume(e.dim()) / e.A().determinant();
}

double volume(const Zonotope& z) {
    const int n = z.dim();
    const int g = z.generators();
    if (g < n) return 0.0;
    // 2^n * sum over n-element generator subsets of |det|.
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    double sum = 0.0;
    while (true) {
        Eigen::MatrixXd sub(n, n);
        for (int k = 0; k < n; ++k) sub.col(k) = z.G().col(idx[k]);
        sum += std::abs(sub.determinant());
        int i = n - 1;
        while (i >= 0 && idx[i] == g - n + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int k = i + 1; k < n; ++k) idx[k] = idx[k - 1] + 1;
    }
    return std::pow(2.0, n) * sum;
}

double volume(const ConvexSet& s) {
    return std::visit([](const auto& v) { return volume(v); }, s);
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw std::invalid_argument("set_from_json: matrix must be an array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) throw std::invalid_argument("set_from_json: ragged matrix rows");
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

}  // namespace

nlohmann::json set_to_json(const ConvexSet& s) {
    nlohmann::json j;
    if (const auto* e = std::get_if<Ellipsoid>(&s)) {
        j["type"] = "ellipsoid";
        j["A"] = matrix_to_json(e->A());
        j["b"] = vector_to_json(e->b());
    } else {
        const auto& z = std::get<Zonotope>(s);
        j["type"] = "zonotope";
        j["G"] = matrix_to_json(z.G());
        j["c"] = vector_to_json(z.c());
    }
    return j;
}

ConvexSet set_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "ellipsoid")
        return Ellipsoid(matrix_from_json(j.at("A")), vector_from_json(j.at("b")));
    if (type == "zonotope")
        return Zonotope(vector_from_json(j.at("c")), matrix_from_json(j.at("G")));
    throw std::invalid_argument("set_from_json: unknown set type '" + type + "'");
}

}  // namespace pacstl
