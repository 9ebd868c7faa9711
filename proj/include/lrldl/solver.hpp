#pragma once

#include "lrldl/types.hpp"

#include <vector>

namespace lrldl {

struct FitResult {
    TlrldlModel model;
    int iterations_run = 0;
    double final_primal_residual = 0.0;
    /// Objective value after each iteration (the low-rank objective of the
    /// chosen variant; empty for AblationB).
    std::vector<double> objective_trace;
    /// Penalty parameter in effect after each iteration.
    std::vector<double> mu_trace;
    bool converged = false;
};

/// Singular value thresholding: U max(0, S - tau) V^T, the proximal operator of
/// tau * nuclear norm.
Matrix svt(const Matrix& A, double tau);

/// Sum of singular values.
double nuclear_norm(const Matrix& A);

// ---------------------------------------------------------------------------
// ADMM steps. X is the n x d design matrix (rows are instances, already
// standardized and bias-augmented), D is m x n, L is m x n, W is m x d and
// O is n x n.
// ---------------------------------------------------------------------------

/// G = svt(W X^T O + Gamma1 / mu, alpha / mu).
Matrix update_g(const Matrix& W, const Matrix& X, const Matrix& O, const Matrix& Gamma1, double mu,
                double alpha);

/// Stationary point of the W-subproblem
///   1/2 |W X^T - D|^2 + 1/2 |W X^T O - L|^2 + lambda |W|^2
///     + mu/2 |G - W X^T O - Gamma1/mu|^2,
/// i.e. W (X^T X + (1+mu) X^T O O^T X + 2 lambda I) = D X + (L + mu G - Gamma1) O^T X.
Matrix update_w(const Matrix& X, const Matrix& D, const Matrix& L, const Matrix& O, const Matrix& G,
                const Matrix& Gamma1, double mu, double lambda);

/// Stationary point of the O-subproblem
///   1/2 |P O - L|^2 + lambda |O|^2 + mu/2 |G - P O - Gamma1/mu|^2,  P = W X^T,
/// i.e. ((1+mu) P^T P + 2 lambda I) O = P^T (L + mu G - Gamma1).
Matrix update_o(const Matrix& X, const Matrix& W, const Matrix& L, const Matrix& G,
                const Matrix& Gamma1, double mu, double lambda);

/// W-step of the AblationA scheme (constraint G = W X^T, no O):
/// W ((1+mu) X^T X + 2 lambda I) = D X + (mu G - Gamma1) X.
Matrix update_w_direct(const Matrix& X, const Matrix& D, const Matrix& G, const Matrix& Gamma1,
                       double mu, double lambda);

/// Multiplier and penalty step given the constraint image C (W X^T O, or W X^T
/// for AblationA): Gamma1 += mu (C - G), mu = min(growth mu, mu_max), and the
/// relative residual |G - C| / max(1, |G|).
SolverState update_multipliers(SolverState state, const Matrix& constraint_image, double mu_growth,
                               double mu_max);

SolverState update_multipliers(SolverState state, const Matrix& W, const Matrix& X, const Matrix& O,
                               double mu_growth, double mu_max);

/// Ridge solution of 1/2 |W X^T - D|^2 + lambda |W|^2: W = D X (X^T X + 2 lambda I)^-1.
Matrix ridge_solution(const Matrix& X, const Matrix& D, double lambda);

/// 1/2 |W X^T - D|^2 + 1/2 |W X^T O - L|^2 + alpha |W X^T O|_* + lambda (|W|^2 + |O|^2).
double full_objective(const Matrix& X, const Matrix& D, const Matrix& L, const Matrix& W,
                      const Matrix& O, double alpha, double lambda);

/// 1/2 |W X^T - D|^2 + alpha |W X^T|_* + lambda |W|^2.
double direct_objective(const Matrix& X, const Matrix& D, const Matrix& W, double alpha, double lambda);

/// Standardizes (if requested) and appends the constant-1 column (if requested).
Matrix design_matrix(const Matrix& X, const Standardizer& standardizer, bool bias);

FitResult fit(const FeatureMatrix& X, const LabelDistributionMatrix& D, const Hyperparams& hp,
              Variant variant = Variant::Full);

/// Clamp negatives to 0 and renormalize; uniform if nothing positive remains.
Vector project_to_simplex(const Vector& raw);

/// Predicted label distribution for one instance with d (pre-bias) features.
Vector predict(const TlrldlModel& model, const Vector& x);

/// Predicted label distributions (m x n) for an n x d feature matrix.
Matrix predict(const TlrldlModel& model, const Matrix& X);

}  // namespace lrldl
