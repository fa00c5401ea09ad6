#pragma once

#include <Eigen/Dense>
#include <vector>

#include "afs/errors.hpp"

// Small dense convex QP:
//   min 1/2 x'Hx + f'x   s.t.  Ax <= b,  lb <= x <= ub
// solved by a primal active-set method. Sizes stay tiny (n, m ~ 20), so every
// working-set change refactors instead of updating.

namespace afs {

struct QpProblem {
    Eigen::MatrixXd H;   // n x n, symmetric PSD
    Eigen::VectorXd f;   // n
    Eigen::MatrixXd A;   // m x n rows of Ax <= b (m may be 0)
    Eigen::VectorXd b;   // m
    Eigen::VectorXd lb;  // n, entries may be -inf
    Eigen::VectorXd ub;  // n, entries may be +inf

    Eigen::Index n() const { return H.rows(); }
    Eigen::Index m() const { return A.rows(); }
};

enum class QpStatus { solved, infeasible, max_iterations };

const char* to_string(QpStatus s);

struct QpSolution {
    Eigen::VectorXd x;
    Eigen::VectorXd lambda;  // multipliers of Ax <= b
    Eigen::VectorXd mu_lb;   // multipliers of lb <= x
    Eigen::VectorXd mu_ub;   // multipliers of x <= ub
    QpStatus status = QpStatus::max_iterations;
    double kkt_residual = 0.0;
    int iterations = 0;

    // Farkas certificate, populated only when status == infeasible:
    // farkas_lambda >= 0 with A'far_lambda - far_mu_lb + far_mu_ub = 0 and
    // b'far_lambda - lb'far_mu_lb + ub'far_mu_ub = farkas_gap < 0.
    Eigen::VectorXd farkas_lambda;
    Eigen::VectorXd farkas_mu_lb;
    Eigen::VectorXd farkas_mu_ub;
    double farkas_gap = 0.0;
};

// Previous active set, keyed by normalized row ids (general rows first, then
// ub rows, then lb rows). Owned by the caller.
struct QpWarmStart {
    Eigen::VectorXd x;
    std::vector<int> active_rows;
    bool valid = false;
};

void validate(const QpProblem& qp);

QpProblem regularize(const QpProblem& qp, double eps_reg);

QpSolution solve(const QpProblem& qp);
QpSolution solve(const QpProblem& qp, QpWarmStart* warm);

}  // namespace afs
