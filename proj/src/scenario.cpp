#include "pacstl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "pacstl/rng.hpp"

namespace pacstl {

namespace {

void check_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const char* which) {
    if (lo.size() != hi.size())
        throw std::invalid_argument(std::string("sample_trajectories: ") + which +
                                    " box endpoints differ in size");
    for (int i = 0; i < lo.size(); ++i)
        if (!(lo(i) <= hi(i)))
            throw std::invalid_argument(std::string("sample_trajectories: ") + which +
                                        " box has lo > hi");
}

Eigen::VectorXd draw_box(RngStream& rs, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::VectorXd v(lo.size());
    for (int i = 0; i < lo.size(); ++i) v(i) = rs.uniform(lo(i), hi(i));
    return v;
}

}  // namespace

std::vector<Trajectory> sample_trajectories(const Stepper& sim, const SampleSpec& spec, int count,
                                            std::uint64_t seed) {
    if (count < 0) throw std::invalid_argument("sample_trajectories: negative count");
    if (spec.steps < 1 || !(spec.dt > 0.0))
        throw std::invalid_argument("sample_trajectories: need steps >= 1 and dt > 0");
    if (spec.resample_period < 1)
        throw std::invalid_argument("sample_trajectories: resample_period must be >= 1");
    check_box(spec.x0_lo, spec.x0_hi, "initial-state");
    check_box(spec.u_lo, spec.u_hi, "input");
    check_box(spec.d_lo, spec.d_hi, "disturbance");

    const CounterRng rng(seed);
    std::vector<Trajectory> out;
    out.reserve(static_cast<std::size_t>(count));
    long long rejects = 0;

    for (int i = 0; i < count; ++i) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt > 1000)
                throw std::runtime_error("sample_trajectories: sample " + std::to_string(i) +
                                         " rejected 1000 times; simulator keeps diverging");
            // Stream identity encodes (sample, attempt) so a rejected sample's
            // redraw never disturbs any other sample's numbers.
            RngStream rs(rng, static_cast<std::uint64_t>(i) + (attempt << 32));
            Trajectory traj;
            traj.dt = spec.dt;
            traj.states.reserve(static_cast<std::size_t>(spec.steps) + 1);

            Eigen::VectorXd x = draw_box(rs, spec.x0_lo, spec.x0_hi);
            const Eigen::VectorXd u = draw_box(rs, spec.u_lo, spec.u_hi);
            traj.states.push_back(x);

            bool ok = x.allFinite();
            Eigen::VectorXd d;
            for (int s = 0; ok && s < spec.steps; ++s) {
                if (s % spec.resample_period == 0) d = draw_box(rs, spec.d_lo, spec.d_hi);
                x = sim(x, u, d, s * spec.dt, spec.dt);
                if (!x.allFinite()) {
                    ok = false;
                    break;
                }
                traj.states.push_back(x);
            }
            if (ok) {
                out.push_back(std::move(traj));
                break;
            }
            ++rejects;
        }
    }
    if (count > 0 && rejects * 100 > count)
        std::cerr << "warning: sample_trajectories rejected " << rejects
                  << " diverging samples out of " << count << " requested\n";
    return out;
}

std::uint64_t holdout_seed(std::uint64_t seed) {
    return CounterRng::mix(seed ^ 0x484f4c444f555421ull);
}

std::vector<Eigen::VectorXd> expand_corners(const std::vector<Eigen::VectorXd>& points,
                                            double half_len, double half_wid) {
    if (half_len == 0.0 && half_wid == 0.0) return points;
    std::vector<Eigen::VectorXd> out;
    out.reserve(points.size() * 4);
    constexpr double sx[4] = {1.0, 1.0, -1.0, -1.0};
    constexpr double sy[4] = {1.0, -1.0, 1.0, -1.0};
    for (const auto& p : points) {
        if (p.size() < 3)
            throw std::invalid_argument("expand_corners: state lacks (p_x, p_y, psi)");
        const double c = std::cos(p(2)), s = std::sin(p(2));
        for (int k = 0; k < 4; ++k) {
            Eigen::VectorXd q = p;
            q(0) += c * sx[k] * half_len - s * sy[k] * half_wid;
            q(1) += s * sx[k] * half_len + c * sy[k] * half_wid;
            out.push_back(std::move(q));
        }
    }
    return out;
}

Eigen::VectorXd centroid(const std::vector<Eigen::VectorXd>& points) {
    if (points.empty()) throw std::invalid_argument("centroid: no points");
    Eigen::VectorXd c = Eigen::VectorXd::Zero(points[0].size());
    for (const auto& p : points) c += p;
    return c / static_cast<double>(points.size());
}

namespace {

Eigen::MatrixXd points_matrix(const std::vector<Eigen::VectorXd>& points) {
    if (points.empty()) throw std::invalid_argument("fit: no points");
    const Eigen::Index n = points[0].size();
    Eigen::MatrixXd P(n, static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != n) throw std::invalid_argument("fit: mixed point dimensions");
        P.col(static_cast<Eigen::Index>(i)) = points[i];
    }
    return P;
}

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw std::runtime_error("fit_mvee: shape matrix lost positive definiteness");
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

// Fallback for clouds that do not span the space: a jittered covariance
// ellipsoid inflated to cover everything.
Ellipsoid degenerate_mvee(const Eigen::MatrixXd& P) {
    const Eigen::Index n = P.rows();
    const Eigen::VectorXd c = P.rowwise().mean();
    const Eigen::MatrixXd centered = P.colwise() - c;
    Eigen::MatrixXd S = centered * centered.transpose() / static_cast<double>(P.cols());
    S += 1e-9 * std::max(1.0, S.trace() / static_cast<double>(n)) *
         Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd A = sym_sqrt(S.inverse());
    A = 0.5 * (A + A.transpose().eval());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < P.cols(); ++i)
        worst = std::max(worst, (A * (P.col(i) - c)).norm());
    if (worst > 0.0) A /= worst;
    return Ellipsoid(A, A * c);
}

}  // namespace

Ellipsoid fit_mvee(const std::vector<Eigen::VectorXd>& points, double tol) {
    const Eigen::MatrixXd P = points_matrix(points);
    const Eigen::Index n = P.rows();
    const Eigen::Index m = P.cols();

    Eigen::MatrixXd Q(n + 1, m);
    Q.topRows(n) = P;
    Q.row(n).setOnes();

    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q);
        if (svd.rank() < n + 1) {
            std::cerr << "warning: fit_mvee: degenerate cloud (affine rank "
                      << svd.rank() - 1 << " < " << n << "), regularizing\n";
            return degenerate_mvee(P);
        }
    }

    // Khachiyan barycentric ascent with away steps (Todd-Yildirim). Weights u
    // live on the simplex; X = Q diag(u) Q^T; M_j = q_j^T X^{-1} q_j. Plus
    // steps move weight toward the most violated point, away steps drain
    // weight from interior support points.
    const double np1 = static_cast<double>(n + 1);
    Eigen::VectorXd u = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    Eigen::MatrixXd Xinv;
    Eigen::VectorXd Mv(m);
    const auto refresh = [&] {
        const Eigen::MatrixXd X = Q * u.asDiagonal() * Q.transpose();
        Xinv = X.ldlt().solve(Eigen::MatrixXd::Identity(n + 1, n + 1));
        Mv = (Q.transpose() * (Xinv * Q)).diagonal();
    };
    refresh();

    constexpr int kMaxIters = 100000;
    constexpr int kRefreshEvery = 256;
    bool converged = false;
    for (int it = 0; it < kMaxIters; ++it) {
        if (it > 0 && it % kRefreshEvery == 0) refresh();

        Eigen::Index j_plus = 0;
        const double m_plus = Mv.maxCoeff(&j_plus);
        double m_away = std::numeric_limits<double>::infinity();
        Eigen::Index j_away = -1;
        for (Eigen::Index j = 0; j < m; ++j)
            if (u(j) > 0.0 && Mv(j) < m_away) {
                m_away = Mv(j);
                j_away = j;
            }

        const double eps_plus = m_plus / np1 - 1.0;
        const double eps_away = 1.0 - m_away / np1;
        if (std::max(eps_plus, eps_away) <= tol) {
            converged = true;
            break;
        }

        Eigen::Index j;
        double beta;
        if (eps_plus >= eps_away) {
            j = j_plus;
            beta = (m_plus - np1) / (np1 * (m_plus - 1.0));
        } else {
            j = j_away;
            beta = (m_away - np1) / (np1 * (m_away - 1.0));
            if (u(j) >= 1.0 - 1e-12) continue;  // cannot drain the only support point
            beta = std::max(beta, -u(j) / (1.0 - u(j)));
        }

        // Rank-1 update of X^{-1} and all M_j for u' = (1-beta) u + beta e_j.
        const double mj = Mv(j);
        const double denom = (1.0 - beta) + beta * mj;
        if (!(denom > 0.0) || !(1.0 - beta > 0.0)) {
            refresh();
            continue;
        }
        const Eigen::VectorXd xq = Xinv * Q.col(j);
        const Eigen::VectorXd w = Q.transpose() * xq;
        Xinv = (Xinv - (beta / denom) * (xq * xq.transpose())) / (1.0 - beta);
        Mv = (Mv - (beta / denom) * w.cwiseAbs2()) / (1.0 - beta);
        u *= (1.0 - beta);
        u(j) += beta;
    }
    if (!converged) {
        refresh();
        const double eps_plus = Mv.maxCoeff() / np1 - 1.0;
        if (eps_plus > 1e-3)
            throw std::runtime_error("fit_mvee: no convergence after 1e5 iterations");
        std::cerr << "warning: fit_mvee stopped at certificate gap " << eps_plus << "\n";
    }

    const Eigen::VectorXd c = P * u;
    Eigen::MatrixXd scatter = P * u.asDiagonal() * P.transpose() - c * c.transpose();
    scatter = 0.5 * (scatter + scatter.transpose().eval());
    Eigen::MatrixXd A = sym_sqrt(scatter.inverse() / static_cast<double>(n));
    A = 0.5 * (A + A.transpose().eval());
    Eigen::VectorXd b = A * c;

    // Rescale so the farthest point sits exactly on the boundary; containment
    // then holds by construction rather than up to the certificate tolerance.
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        worst = std::max(worst, (A * P.col(i) - b).norm());
    if (worst > 0.0) {
        A /= worst;
        b /= worst;
    }
    return Ellipsoid(A, b);
}

Zonotope fit_zonotope_template(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& c,
                               const Eigen::MatrixXd& G0) {
    const Eigen::MatrixXd P = points_matrix(points);
    const Eigen::Index n = P.rows();
    const Eigen::Index g = G0.cols();
    if (G0.rows() != n || c.size() != n)
        throw std::invalid_argument("fit_zonotope_template: dimension mismatch");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.rank() < n)
        throw std::invalid_argument("fit_zonotope_template: template must have full row rank");

    const Eigen::MatrixXd D = P.colwise() - c;
    Eigen::MatrixXd coords;
    if (g == n) {
        coords = G0.partialPivLu().solve(D);
    } else {
        coords = svd.solve(D);  // min-norm coordinates
    }

    Eigen::VectorXd lambda = coords.cwiseAbs().rowwise().maxCoeff();
    bool floored = false;
    for (Eigen::Index j = 0; j < g; ++j)
        if (lambda(j) < 1e-9) {
            lambda(j) = 1e-9;
            floored = true;
        }
    if (floored)
        std::cerr << "warning: fit_zonotope_template: degenerate cloud, "
                     "floored generator scale at 1e-9\n";

    Zonotope z(c, G0 * lambda.asDiagonal());
    if (g == n) return z;  // closed form is exact for square templates

    // Min-norm coordinates are feasible for the equality constraint but not
    // necessarily for the membership test of the scaled template; one uniform
    // scale-up fixes that (the pseudoinverse scales inversely).
    double worst = 0.0;
    for (Eigen::Index i = 0; i < D.cols(); ++i)
        worst = std::max(worst, (z.Gpinv() * D.col(i)).lpNorm<Eigen::Infinity>());
    if (worst > 1.0) z = Zonotope(c, z.G() * worst);
    return z;
}

namespace {

bool zonotope_covers(const Zonotope& z, const Eigen::MatrixXd& D) {
    for (Eigen::Index i = 0; i < D.cols(); ++i) {
        const Eigen::VectorXd alpha = z.Gpinv() * D.col(i);
        if (alpha.lpNorm<Eigen::Infinity>() > 1.0) return false;
        if ((z.G() * alpha - D.col(i)).norm() > 1e-9 * (1.0 + D.col(i).norm())) return false;
    }
    return true;
}

}  // namespace

Zonotope refine_zonotope(const Zonotope& z, const std::vector<Eigen::VectorXd>& points,
                         int iters) {
    if (iters <= 0) return z;
    const Eigen::MatrixXd P = points_matrix(points);
    const Eigen::MatrixXd D = P.colwise() - z.c();
    const Eigen::Index n = z.G().rows();
    const Eigen::Index g = z.G().cols();

    // Penalized volume objective over the full generator matrix: log det(GG^T)
    // plus a quadratic hinge on min-norm coordinates outside the unit box,
    // averaged over the points so the weight schedule is cloud-size-agnostic.
    // The hinge weight grows on a schedule, so early iterations may trade a
    // little coverage for shape and later ones push escaped points back
    // inside. Every iterate is scored by the volume it would have after one
    // uniform inflation to full coverage, and the best such candidate over
    // the whole run is returned, so a descent that later wanders or diverges
    // cannot lose ground already gained.
    struct Eval {
        double logdet = std::numeric_limits<double>::infinity();
        double hinge = 0.0;
        double worst = std::numeric_limits<double>::infinity();
        bool feasible = false;
    };
    const auto evaluate = [&](const Eigen::MatrixXd& G) -> Eval {
        Eval e;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& sv = svd.singularValues();
        if (!(sv(n - 1) > 1e-9 * sv(0)))
            return e;
        e.feasible = true;
        e.logdet = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) e.logdet += 2.0 * std::log(sv(i));
        const Eigen::MatrixXd alpha = svd.solve(D);
        e.worst = alpha.size() > 0 ? alpha.cwiseAbs().maxCoeff() : 0.0;
        for (Eigen::Index jc = 0; jc < alpha.cols(); ++jc)
            for (Eigen::Index jr = 0; jr < alpha.rows(); ++jr) {
                const double over = std::abs(alpha(jr, jc)) - 1.0;
                if (over > 0.0) e.hinge += over * over;
            }
        e.hinge /= static_cast<double>(D.cols());
        return e;
    };
    const auto penalized = [&](const Eval& e, double mu) -> double {
        return e.feasible ? e.logdet + mu * e.hinge
                          : std::numeric_limits<double>::infinity();
    };
    // Exact volume after uniformly inflating G until every point fits. This is
    // the quantity candidates are ranked by; the descent itself runs on the
    // smooth log det proxy.
    const auto covered_volume = [&](const Eigen::MatrixXd& G, const Eval& e) -> double {
        if (!e.feasible) return std::numeric_limits<double>::infinity();
        try {
            return volume(Zonotope(z.c(), G * std::max(1.0, e.worst)));
        } catch (const std::invalid_argument&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const int kGrowEvery = 500;
    Eigen::MatrixXd G = z.G();
    Eval cur = evaluate(G);
    Eigen::MatrixXd best_G = G;
    double best_scale = std::max(1.0, cur.worst);
    double best_vol = covered_volume(G, cur);
    double mu = 10.0;
    double step = 0.02;
    double f = penalized(cur, mu);
    int since_grow = 0;
    const double h = 1e-6;
    Eigen::MatrixXd grad(n, g), trial(n, g);
    for (int it = 0; it < iters && mu <= 1e7; ++it, ++since_grow) {
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index cg = 0; cg < g; ++cg) {
                trial = G;
                trial(r, cg) += h;
                const double fh = penalized(evaluate(trial), mu);
                grad(r, cg) = std::isfinite(fh) && std::isfinite(f) ? (fh - f) / h : 0.0;
            }
        trial = G - step * grad;
        const Eval et = evaluate(trial);
        const double ft = penalized(et, mu);
        if (ft < f) {
            G = trial;
            cur = et;
            f = ft;
            step *= 1.1;
            const double cv = covered_volume(G, et);
            if (cv < best_vol) {
                best_vol = cv;
                best_G = G;
                best_scale = std::max(1.0, et.worst);
            }
        } else {
            step *= 0.5;
        }
        if (since_grow >= kGrowEvery || step < 1e-10) {
            mu *= 4.0;
            step = std::max(step, 1e-4);
            f = penalized(cur, mu);
            since_grow = 0;
        }
    }

    try {
        // Headroom keeps the touching point strictly inside after the
        // pseudoinverse of the scaled matrix is recomputed.
        Zonotope cand(z.c(), best_G * (best_scale * (1.0 + 1e-9)));
        if (volume(cand) <= volume(z) && zonotope_covers(cand, D)) return cand;
    } catch (const std::invalid_argument&) {
        // fall through to the warm start
    }
    return z;
}

ViolationCounts count_violations(const std::vector<ConvexSet>& sets,
                                 const std::vector<Trajectory>& test, const CornerGeom& geom) {
    const std::size_t T = sets.size();
    ViolationCounts counts;
    counts.k_t.assign(T, 0);
    for (const auto& traj : test) {
        if (traj.states.size() != T + 1)
            throw std::invalid_argument("count_violations: trajectory horizon " +
                                        std::to_string(traj.states.size() - 1) +
                                        " does not match tube length " + std::to_string(T));
        bool violated_any = false;
        for (std::size_t tau = 0; tau < T; ++tau) {
            const auto corners =
                expand_corners({traj.states[tau + 1]}, geom.half_len, geom.half_wid);
            bool inside = true;
            for (const auto& pt : corners)
                if (!contains(sets[tau], pt)) {
                    inside = false;
                    break;
                }
            if (!inside) {
                ++counts.k_t[tau];
                violated_any = true;
            }
        }
        if (violated_any) ++counts.k_tube;
    }
    return counts;
}

double binomial_tail_inversion(int k, int M, double beta) {
    if (M < 1 || k < 0 || k > M)
        throw std::invalid_argument("binomial_tail_inversion: need 0 <= k <= M, M >= 1");
    if (!(beta > 0.0) || !(beta < 1.0))
        throw std::invalid_argument("binomial_tail_inversion: beta must lie in (0,1)");
    if (k == M) return 1.0;

    // F(e) = sum_{j<=k} C(M,j) e^j (1-e)^(M-j), strictly decreasing in e on
    // (0,1) for k < M. Terms are accumulated from log-space to survive M in
    // the thousands.
    const auto tail = [&](double e) {
        if (e <= 0.0) return 1.0;
        if (e >= 1.0) return 0.0;
        const double log_e = std::log(e);
        const double log_1me = std::log1p(-e);
        const double lgM = std::lgamma(static_cast<double>(M) + 1.0);
        double sum = 0.0;
        for (int j = 0; j <= k; ++j) {
            const double lg = lgM - std::lgamma(static_cast<double>(j) + 1.0) -
                              std::lgamma(static_cast<double>(M - j) + 1.0);
            sum += std::exp(lg + j * log_e + (M - j) * log_1me);
        }
        return std::min(sum, 1.0);
    };

    double lo = 0.0, hi = 1.0;  // tail(lo) >= beta > tail(hi)
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (tail(mid) >= beta)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

namespace {

ConvexSet fit_step_set(const std::vector<Eigen::VectorXd>& cloud, const TubeRep& rep) {
    if (rep.kind == TubeRep::Kind::Ellipsoid) return fit_mvee(cloud);
    Zonotope z = fit_zonotope_template(cloud, centroid(cloud), rep.G0);
    if (rep.refine_iters > 0) z = refine_zonotope(z, cloud, rep.refine_iters);
    return z;
}

}  // namespace

ReachTube assemble_tube(const std::vector<Trajectory>& training,
                        const std::vector<Trajectory>& holdout, const TubeRep& rep,
                        const CornerGeom& geom, double beta, const Interval& velocity_bucket) {
    if (training.empty() || holdout.empty())
        throw std::invalid_argument("assemble_tube: need training and holdout trajectories");
    const std::size_t T = training[0].states.size() - 1;
    const double dt = training[0].dt;
    if (T < 1) throw std::invalid_argument("assemble_tube: horizon must be at least one step");
    for (const auto& traj : training)
        if (traj.states.size() != T + 1 || traj.dt != dt)
            throw std::invalid_argument("assemble_tube: inconsistent training trajectories");
    for (const auto& traj : holdout)
        if (traj.dt != dt)
            throw std::invalid_argument("assemble_tube: holdout dt differs from training");

    ReachTube tube;
    tube.dt = dt;
    tube.beta = beta;
    tube.velocity_bucket = velocity_bucket;
    tube.corners = geom;
    tube.sets.reserve(T);

    std::vector<Eigen::VectorXd> cloud;
    for (std::size_t tau = 1; tau <= T; ++tau) {
        cloud.clear();
        cloud.reserve(training.size());
        for (const auto& traj : training) cloud.push_back(traj.states[tau]);
        cloud = expand_corners(cloud, geom.half_len, geom.half_wid);
        tube.sets.push_back(fit_step_set(cloud, rep));
        for (const auto& pt : cloud)
            if (!contains(tube.sets.back(), pt))
                throw std::runtime_error("assemble_tube: training point escaped fitted set at step " +
                                         std::to_string(tau));
    }

    const ViolationCounts counts = count_violations(tube.sets, holdout, geom);
    const int M = static_cast<int>(holdout.size());
    tube.eps_tube = binomial_tail_inversion(counts.k_tube, M, beta);
    tube.eps_t.reserve(T);
    for (std::size_t tau = 0; tau < T; ++tau)
        tube.eps_t.push_back(binomial_tail_inversion(counts.k_t[tau], M, beta));
    return tube;
}

ReachTube build_tube(const Stepper& sim, const SampleSpec& spec, const TubeRep& rep,
                     const CornerGeom& geom, double beta, const Interval& velocity_bucket) {
    const auto training = sample_trajectories(sim, spec, spec.N, spec.seed);
    const auto holdout = sample_trajectories(sim, spec, spec.M, holdout_seed(spec.seed));
    return assemble_tube(training, holdout, rep, geom, beta, velocity_bucket);
}

nlohmann::json tube_to_json(const ReachTube& tube) {
    nlohmann::json j;
    j["dt"] = tube.dt;
    j["beta"] = tube.beta;
    j["eps_tube"] = tube.eps_tube;
    j["eps_t"] = tube.eps_t;
    j["velocity_bucket"] = {tube.velocity_bucket.lo, tube.velocity_bucket.hi};
    j["corner_half_len"] = tube.corners.half_len;
    j["corner_half_wid"] = tube.corners.half_wid;
    nlohmann::json sets = nlohmann::json::array();
    for (const auto& s : tube.sets) sets.push_back(set_to_json(s));
    j["sets"] = std::move(sets);
    return j;
}

ReachTube tube_from_json(const nlohmann::json& j) {
    ReachTube tube;
    tube.dt = j.at("dt").get<double>();
    tube.beta = j.at("beta").get<double>();
    tube.eps_tube = j.at("eps_tube").get<double>();
    tube.eps_t = j.at("eps_t").get<std::vector<double>>();
    const auto& vb = j.at("velocity_bucket");
    tube.velocity_bucket = Interval(vb.at(0).get<double>(), vb.at(1).get<double>());
    tube.corners.half_len = j.at("corner_half_len").get<double>();
    tube.corners.half_wid = j.at("corner_half_wid").get<double>();
    for (const auto& s : j.at("sets")) tube.sets.push_back(set_from_json(s));
    if (tube.eps_t.size() != tube.sets.size())
        throw std::invalid_argument("tube_from_json: eps_t and sets lengths differ");
    return tube;
}

}  // namespace pacstl
