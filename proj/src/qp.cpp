#include "afs/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace afs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;
constexpr double kActiveTol = 1e-9;

// Normalized row set: general rows of A first, then finite upper bounds
// (+e_i x <= ub_i), then finite lower bounds (-e_i x <= -lb_i). Row ids are
// stable for a fixed bound pattern, which is what the warm start keys on.
struct Rows {
    Eigen::MatrixXd N;
    Eigen::VectorXd r;
    int n_general = 0;
    std::vector<int> ub_coord;  // coordinate of each ub row
    std::vector<int> lb_coord;  // coordinate of each lb row
};

Rows build_rows(const QpProblem& qp) {
    const Eigen::Index n = qp.n();
    Rows rows;
    rows.n_general = static_cast<int>(qp.m());
    for (Eigen::Index i = 0; i < n; ++i)
        if (qp.ub[i] < kInf) rows.ub_coord.push_back(static_cast<int>(i));
    for (Eigen::Index i = 0; i < n; ++i)
        if (qp.lb[i] > -kInf) rows.lb_coord.push_back(static_cast<int>(i));

    const Eigen::Index total =
        qp.m() + static_cast<Eigen::Index>(rows.ub_coord.size() + rows.lb_coord.size());
    rows.N = Eigen::MatrixXd::Zero(total, n);
    rows.r = Eigen::VectorXd::Zero(total);
    rows.N.topRows(qp.m()) = qp.A;
    rows.r.head(qp.m()) = qp.b;
    Eigen::Index k = qp.m();
    for (int c : rows.ub_coord) {
        rows.N(k, c) = 1.0;
        rows.r(k) = qp.ub[c];
        ++k;
    }
    for (int c : rows.lb_coord) {
        rows.N(k, c) = -1.0;
        rows.r(k) = -qp.lb[c];
        ++k;
    }
    return rows;
}

struct ActiveSetOut {
    Eigen::VectorXd x;
    Eigen::VectorXd lam;  // per normalized row, zero when inactive
    bool optimal = false;
    int iterations = 0;
};

// Primal active-set iteration on min 1/2 x'Hx + f'x s.t. Nx <= r, from a
// feasible x0. H must be positive definite (callers add a ridge if needed).
ActiveSetOut active_set_minimize(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
                                 const Rows& rows, Eigen::VectorXd x,
                                 std::vector<int> working) {
    const Eigen::Index n = H.rows();
    const Eigen::Index n_rows = rows.N.rows();
    Eigen::LLT<Eigen::MatrixXd> hllt(H);

    ActiveSetOut out;
    out.lam = Eigen::VectorXd::Zero(n_rows);
    const int max_iter = 50 + 10 * static_cast<int>(n + n_rows);
    std::vector<char> in_w(static_cast<size_t>(n_rows), 0);
    for (int i : working) in_w[static_cast<size_t>(i)] = 1;

    for (int iter = 0; iter < max_iter; ++iter) {
        out.iterations = iter + 1;
        Eigen::VectorXd g = H * x + f;
        const Eigen::Index k = static_cast<Eigen::Index>(working.size());

        Eigen::VectorXd p;
        Eigen::VectorXd lam_w;
        if (k == 0) {
            p = -hllt.solve(g);
        } else {
            Eigen::MatrixXd Nw(k, n);
            for (Eigen::Index j = 0; j < k; ++j)
                Nw.row(j) = rows.N.row(working[static_cast<size_t>(j)]);
            Eigen::MatrixXd HiNt = hllt.solve(Nw.transpose());
            Eigen::MatrixXd S = Nw * HiNt;
            Eigen::LLT<Eigen::MatrixXd> sllt(S);
            if (sllt.info() != Eigen::Success) {
                // dependent working set (should not happen): drop newest row
                in_w[static_cast<size_t>(working.back())] = 0;
                working.pop_back();
                continue;
            }
            lam_w = sllt.solve(-(HiNt.transpose() * g));
            p = -hllt.solve(g + Nw.transpose() * lam_w);
        }

        const double p_inf = p.lpNorm<Eigen::Infinity>();
        const double x_scale = 1.0 + x.lpNorm<Eigen::Infinity>();
        if (p_inf <= 1e-12 * x_scale) {
            // stationary on the working set; check multiplier signs
            int worst = -1;
            double worst_lam = -(5e-12 * (1.0 + g.lpNorm<Eigen::Infinity>()));
            for (Eigen::Index j = 0; j < k; ++j) {
                if (lam_w[j] < worst_lam) {
                    worst_lam = lam_w[j];
                    worst = static_cast<int>(j);
                }
            }
            if (worst < 0) {
                out.x = x;
                for (Eigen::Index j = 0; j < k; ++j)
                    out.lam[working[static_cast<size_t>(j)]] = std::max(0.0, lam_w[j]);
                out.optimal = true;
                return out;
            }
            in_w[static_cast<size_t>(working[static_cast<size_t>(worst)])] = 0;
            working.erase(working.begin() + worst);
            continue;
        }

        // ratio test over rows outside the working set
        double alpha = 1.0;
        int blocking = -1;
        for (Eigen::Index i = 0; i < n_rows; ++i) {
            if (in_w[static_cast<size_t>(i)]) continue;
            const double d = rows.N.row(i).dot(p);
            const double dir_tol =
                1e-13 * std::max(1.0, rows.N.row(i).cwiseAbs().maxCoeff()) * std::max(1.0, p_inf);
            if (d <= dir_tol) continue;
            const double slack = rows.r(i) - rows.N.row(i).dot(x);
            const double a = std::max(slack, 0.0) / d;
            if (a < alpha) {
                alpha = a;
                blocking = static_cast<int>(i);
            }
        }
        x += alpha * p;
        if (blocking >= 0) {
            working.push_back(blocking);
            in_w[static_cast<size_t>(blocking)] = 1;
        }
    }
    out.x = x;
    return out;  // optimal == false: iteration cap
}

double general_violation(const Rows& rows, const Eigen::VectorXd& x) {
    double v = 0.0;
    for (int i = 0; i < rows.n_general; ++i)
        v = std::max(v, rows.N.row(i).dot(x) - rows.r(i));
    return v;
}

std::vector<int> detect_active(const Rows& rows, const Eigen::VectorXd& x,
                               const std::vector<int>& candidates) {
    std::vector<int> w;
    for (int i : candidates) {
        if (i < 0 || i >= rows.N.rows()) continue;
        const double scale = std::max(1.0, std::abs(rows.r(i)));
        if (std::abs(rows.r(i) - rows.N.row(i).dot(x)) <= kActiveTol * scale) w.push_back(i);
    }
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    return w;
}

// Exact Farkas polish: given the rows active at the phase-1 optimum, find
// nonnegative multipliers with sum(general) = 1 whose combination has zero
// x-part. NaN-free least squares on a <= (n+1) x |active| system.
bool polish_certificate(const QpProblem& qp, const Rows& rows, const std::vector<int>& active,
                        QpSolution& sol) {
    std::vector<int> gen, box;
    for (int i : active)
        (i < rows.n_general ? gen : box).push_back(i);
    if (gen.empty()) return false;

    const Eigen::Index n = qp.n();
    const Eigen::Index cols = static_cast<Eigen::Index>(gen.size() + box.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, cols);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    for (size_t j = 0; j < gen.size(); ++j) {
        M.col(static_cast<Eigen::Index>(j)).head(n) = rows.N.row(gen[j]).transpose();
        M(n, static_cast<Eigen::Index>(j)) = 1.0;
    }
    for (size_t j = 0; j < box.size(); ++j)
        M.col(static_cast<Eigen::Index>(gen.size() + j)).head(n) =
            rows.N.row(box[j]).transpose();

    Eigen::VectorXd y = M.colPivHouseholderQr().solve(rhs);
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (y[j] < -1e-9) return false;
        y[j] = std::max(y[j], 0.0);
    }

    Eigen::VectorXd lam = Eigen::VectorXd::Zero(qp.m());
    Eigen::VectorXd mu_lb = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd mu_ub = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd comb = Eigen::VectorXd::Zero(n);
    double gap = 0.0;
    for (size_t j = 0; j < gen.size(); ++j) {
        const double yj = y[static_cast<Eigen::Index>(j)];
        lam[gen[j]] = yj;
        comb += yj * rows.N.row(gen[j]).transpose();
        gap += yj * rows.r(gen[j]);
    }
    for (size_t j = 0; j < box.size(); ++j) {
        const double yj = y[static_cast<Eigen::Index>(gen.size() + j)];
        const int i = box[j];
        comb += yj * rows.N.row(i).transpose();
        gap += yj * rows.r(i);
        const int offset = i - rows.n_general;
        if (offset < static_cast<int>(rows.ub_coord.size()))
            mu_ub[rows.ub_coord[static_cast<size_t>(offset)]] = yj;
        else
            mu_lb[rows.lb_coord[static_cast<size_t>(offset - static_cast<int>(rows.ub_coord.size()))]] = yj;
    }

    const double resid = comb.lpNorm<Eigen::Infinity>();
    if (resid > 1e-8 || gap >= -1e-10 * (1.0 + qp.b.cwiseAbs().maxCoeff())) return false;

    sol.status = QpStatus::infeasible;
    sol.farkas_lambda = lam;
    sol.farkas_mu_lb = mu_lb;
    sol.farkas_mu_ub = mu_ub;
    sol.farkas_gap = gap;
    sol.kkt_residual = resid;
    return true;
}

double kkt_residual(const QpProblem& qp, const Eigen::VectorXd& x, const Eigen::VectorXd& lam,
                    const Eigen::VectorXd& mu_lb, const Eigen::VectorXd& mu_ub) {
    Eigen::VectorXd stat = qp.H * x + qp.f - mu_lb + mu_ub;
    if (qp.m() > 0) stat += qp.A.transpose() * lam;
    double r = stat.lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < qp.m(); ++i) {
        const double s = qp.A.row(i).dot(x) - qp.b[i];
        r = std::max(r, s);
        r = std::max(r, std::abs(lam[i] * s));
    }
    for (Eigen::Index i = 0; i < qp.n(); ++i) {
        if (qp.lb[i] > -kInf) {
            r = std::max(r, qp.lb[i] - x[i]);
            r = std::max(r, std::abs(mu_lb[i] * (qp.lb[i] - x[i])));
        }
        if (qp.ub[i] < kInf) {
            r = std::max(r, x[i] - qp.ub[i]);
            r = std::max(r, std::abs(mu_ub[i] * (x[i] - qp.ub[i])));
        }
    }
    return r;
}

}  // namespace

const char* to_string(QpStatus s) {
    switch (s) {
        case QpStatus::solved: return "solved";
        case QpStatus::infeasible: return "infeasible";
        case QpStatus::max_iterations: return "max_iterations";
    }
    return "unknown";
}

void validate(const QpProblem& qp) {
    const Eigen::Index n = qp.n();
    if (n == 0) throw DimensionError("QP must have at least one variable");
    if (qp.H.cols() != n) throw DimensionError("H must be square");
    if (qp.f.size() != n) throw DimensionError("f size mismatch");
    if (qp.A.rows() != qp.b.size()) throw DimensionError("A/b row mismatch");
    if (qp.m() > 0 && qp.A.cols() != n) throw DimensionError("A column mismatch");
    if (qp.lb.size() != n || qp.ub.size() != n) throw DimensionError("bound size mismatch");
    if (!qp.H.allFinite() || !qp.f.allFinite()) throw ConfigError("H/f must be finite");
    if (qp.m() > 0 && (!qp.A.allFinite() || !qp.b.allFinite()))
        throw ConfigError("A/b must be finite");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::isnan(qp.lb[i]) || std::isnan(qp.ub[i]) || qp.lb[i] > qp.ub[i] ||
            qp.lb[i] == kInf || qp.ub[i] == -kInf)
            throw ConfigError("bounds must satisfy lb <= ub");
    }
    const double h_scale = std::max(1.0, qp.H.cwiseAbs().maxCoeff());
    if ((qp.H - qp.H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * h_scale)
        throw ConfigError("H must be symmetric");
}

QpProblem regularize(const QpProblem& qp, double eps_reg) {
    QpProblem out = qp;
    if (eps_reg != 0.0)
        out.H += eps_reg * Eigen::MatrixXd::Identity(qp.n(), qp.n());
    return out;
}

QpSolution solve(const QpProblem& qp) { return solve(qp, nullptr); }

QpSolution solve(const QpProblem& qp, QpWarmStart* warm) {
    validate(qp);
    const Eigen::Index n = qp.n();

    // PSD probe; a semidefinite H gets a tiny internal ridge so the EQP
    // subproblems are uniquely solvable. KKT residuals are still measured
    // against the caller's H.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qp.H, Eigen::EigenvaluesOnly);
    const double lam_min = es.eigenvalues().minCoeff();
    if (lam_min < -1e-8) throw NotPsdError("H has an eigenvalue below -1e-8");
    const double ridge_floor = 1e-10 * std::max(1.0, qp.H.cwiseAbs().maxCoeff());
    Eigen::MatrixXd Heff = qp.H;
    if (lam_min < ridge_floor)
        Heff += (ridge_floor - lam_min) * Eigen::MatrixXd::Identity(n, n);

    Rows rows = build_rows(qp);

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
    if (warm != nullptr && warm->valid && warm->x.size() == n) x0 = warm->x;
    for (Eigen::Index i = 0; i < n; ++i)
        x0[i] = std::min(std::max(x0[i], qp.lb[i]), qp.ub[i]);

    QpSolution sol;
    sol.lambda = Eigen::VectorXd::Zero(qp.m());
    sol.mu_lb = Eigen::VectorXd::Zero(n);
    sol.mu_ub = Eigen::VectorXd::Zero(n);

    int phase1_iters = 0;
    if (general_violation(rows, x0) > kFeasTol) {
        // Phase 1: relax the general rows with one slack t and minimize
        // 1/2 t^2 (plus a tiny pull toward x0 to keep the Hessian PD).
        const double sigma = 1e-8;
        const Eigen::Index n1 = n + 1;
        QpProblem p1;
        p1.H = sigma * Eigen::MatrixXd::Identity(n1, n1);
        p1.H(n, n) = 1.0;
        p1.f = Eigen::VectorXd::Zero(n1);
        p1.f.head(n) = -sigma * x0;
        p1.A.resize(qp.m(), n1);
        p1.A.leftCols(n) = qp.A;
        p1.A.col(n).setConstant(-1.0);
        p1.b = qp.b;
        p1.lb = Eigen::VectorXd::Constant(n1, -kInf);
        p1.ub = Eigen::VectorXd::Constant(n1, kInf);
        p1.lb.head(n) = qp.lb;
        p1.ub.head(n) = qp.ub;

        Rows rows1 = build_rows(p1);
        Eigen::VectorXd z0(n1);
        z0.head(n) = x0;
        z0[n] = general_violation(rows, x0) * (1.0 + 1e-12);

        ActiveSetOut r1 = active_set_minimize(p1.H, p1.f, rows1, z0, {});
        phase1_iters = r1.iterations;
        if (!r1.optimal) {
            sol.status = QpStatus::max_iterations;
            sol.iterations = phase1_iters;
            return sol;
        }
        const double t_star = r1.x[n];
        if (t_star > kFeasTol * (1.0 + qp.b.cwiseAbs().maxCoeff())) {
            std::vector<int> all(static_cast<size_t>(rows1.N.rows()));
            for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
            std::vector<int> act1 = detect_active(rows1, r1.x, all);
            // map phase-1 row ids onto the original row set (identical layout
            // for general rows; box rows never involve t)
            std::vector<int> mapped;
            for (int i : act1) {
                if (i < rows1.n_general) {
                    mapped.push_back(i);
                } else {
                    const int off = i - rows1.n_general;
                    const auto& coords = (off < static_cast<int>(rows1.ub_coord.size()))
                                             ? rows1.ub_coord
                                             : rows1.lb_coord;
                    const int c = (off < static_cast<int>(rows1.ub_coord.size()))
                                      ? rows1.ub_coord[static_cast<size_t>(off)]
                                      : rows1.lb_coord[static_cast<size_t>(
                                            off - static_cast<int>(rows1.ub_coord.size()))];
                    if (c == static_cast<int>(n)) continue;  // t has no bounds
                    // find same-kind row in the original set
                    const bool is_ub = off < static_cast<int>(rows1.ub_coord.size());
                    const auto& orig = is_ub ? rows.ub_coord : rows.lb_coord;
                    auto it = std::find(orig.begin(), orig.end(), c);
                    if (it != orig.end())
                        mapped.push_back(rows.n_general +
                                         (is_ub ? 0 : static_cast<int>(rows.ub_coord.size())) +
                                         static_cast<int>(it - orig.begin()));
                    (void)coords;
                }
            }
            sol.x = r1.x.head(n);
            sol.iterations = phase1_iters;
            if (polish_certificate(qp, rows, mapped, sol)) return sol;
            sol.status = QpStatus::max_iterations;
            return sol;
        }
        x0 = r1.x.head(n);
        for (Eigen::Index i = 0; i < n; ++i)
            x0[i] = std::min(std::max(x0[i], qp.lb[i]), qp.ub[i]);
    }

    std::vector<int> w0;
    if (warm != nullptr && warm->valid) w0 = detect_active(rows, x0, warm->active_rows);

    ActiveSetOut r2 = active_set_minimize(Heff, qp.f, rows, x0, w0);
    sol.iterations = phase1_iters + r2.iterations;
    sol.x = r2.x;
    if (!r2.optimal) {
        sol.status = QpStatus::max_iterations;
        return sol;
    }

    for (Eigen::Index i = 0; i < qp.m(); ++i) sol.lambda[i] = r2.lam[i];
    for (size_t j = 0; j < rows.ub_coord.size(); ++j)
        sol.mu_ub[rows.ub_coord[j]] = r2.lam[qp.m() + static_cast<Eigen::Index>(j)];
    for (size_t j = 0; j < rows.lb_coord.size(); ++j)
        sol.mu_lb[rows.lb_coord[j]] =
            r2.lam[qp.m() + static_cast<Eigen::Index>(rows.ub_coord.size() + j)];

    sol.kkt_residual = kkt_residual(qp, sol.x, sol.lambda, sol.mu_lb, sol.mu_ub);
    sol.status = sol.kkt_residual <= 1e-6 ? QpStatus::solved : QpStatus::max_iterations;

    if (warm != nullptr && sol.status == QpStatus::solved) {
        warm->x = sol.x;
        warm->active_rows.clear();
        for (Eigen::Index i = 0; i < r2.lam.size(); ++i)
            if (r2.lam[i] > 0.0) warm->active_rows.push_back(static_cast<int>(i));
        warm->valid = true;
    }
    return sol;
}

}  // namespace afs
