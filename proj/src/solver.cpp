#include "lrldl/solver.hpp"

#include "lrldl/data_io.hpp"
#include "lrldl/degrade.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lrldl {

namespace {

std::string shape(const Matrix& A) {
    return std::to_string(A.rows()) + "x" + std::to_string(A.cols());
}

void require(bool ok, const char* what) {
    if (!ok)
        throw DimensionMismatch(what);
}

// Solves S Y = B for symmetric positive-definite S.
Matrix spd_solve(const Matrix& S, const Matrix& B, const char* what) {
    Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success || !(llt.rcond() > std::numeric_limits<double>::epsilon()))
        throw SingularSystem(std::string(what) + ": system matrix is singular or not positive definite");
    return llt.solve(B);
}

}  // namespace

Matrix svt(const Matrix& A, double tau) {
    if (!(tau >= 0.0))
        throw InvalidArgument("svt threshold must be >= 0");
    if (!A.allFinite())
        throw SvdFailure("svt input has non-finite entries");
    if (A.size() == 0 || tau == 0.0)
        return A;
    Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw SvdFailure("singular value decomposition did not converge");
    const Vector shrunk = (svd.singularValues().array() - tau).max(0.0).matrix();
    return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

double nuclear_norm(const Matrix& A) {
    if (A.size() == 0)
        return 0.0;
    Eigen::BDCSVD<Matrix> svd(A);
    if (svd.info() != Eigen::Success)
        throw SvdFailure("singular value decomposition did not converge");
    return svd.singularValues().sum();
}

Matrix update_g(const Matrix& W, const Matrix& X, const Matrix& O, const Matrix& Gamma1, double mu,
                double alpha) {
    require(W.cols() == X.cols(), "update_g: W and X disagree on d");
    require(O.rows() == X.rows() && O.cols() == X.rows(), "update_g: O must be n x n");
    require(Gamma1.rows() == W.rows() && Gamma1.cols() == X.rows(), "update_g: Gamma1 must be m x n");
    if (!(mu > 0.0))
        throw InvalidArgument("update_g: mu must be > 0");
    return svt((W * X.transpose()) * O + Gamma1 / mu, alpha / mu);
}

Matrix update_w(const Matrix& X, const Matrix& D, const Matrix& L, const Matrix& O, const Matrix& G,
                const Matrix& Gamma1, double mu, double lambda) {
    const Index n = X.rows();
    require(D.cols() == n, "update_w: D must have n columns");
    require(L.rows() == D.rows() && L.cols() == n, "update_w: L must be m x n");
    require(O.rows() == n && O.cols() == n, "update_w: O must be n x n");
    require(G.rows() == D.rows() && G.cols() == n, "update_w: G must be m x n");
    require(Gamma1.rows() == D.rows() && Gamma1.cols() == n, "update_w: Gamma1 must be m x n");

    const Matrix Q = O.transpose() * X;  // n x d
    Matrix system = X.transpose() * X;
    system.noalias() += (1.0 + mu) * (Q.transpose() * Q);
    system.diagonal().array() += 2.0 * lambda;
    const Matrix rhs = D * X + (L + mu * G - Gamma1) * Q;  // m x d
    return spd_solve(system, rhs.transpose(), "update_w").transpose();
}

Matrix update_o(const Matrix& X, const Matrix& W, const Matrix& L, const Matrix& G,
                const Matrix& Gamma1, double mu, double lambda) {
    const Index n = X.rows();
    require(W.cols() == X.cols(), "update_o: W and X disagree on d");
    require(L.rows() == W.rows() && L.cols() == n, "update_o: L must be m x n");
    require(G.rows() == W.rows() && G.cols() == n, "update_o: G must be m x n");
    require(Gamma1.rows() == W.rows() && Gamma1.cols() == n, "update_o: Gamma1 must be m x n");

    const Matrix P = W * X.transpose();  // m x n
    const Matrix R = L + mu * G - Gamma1;
    const double c = 1.0 + mu;
    if (lambda > 0.0) {
        // (c P^T P + 2 lambda I_n)^-1 P^T = P^T (c P P^T + 2 lambda I_m)^-1
        Matrix small = c * (P * P.transpose());
        small.diagonal().array() += 2.0 * lambda;
        return P.transpose() * spd_solve(small, R, "update_o");
    }
    const Matrix system = c * (P.transpose() * P);
    return spd_solve(system, P.transpose() * R, "update_o");
}

Matrix update_w_direct(const Matrix& X, const Matrix& D, const Matrix& G, const Matrix& Gamma1,
                       double mu, double lambda) {
    const Index n = X.rows();
    require(D.cols() == n, "update_w_direct: D must have n columns");
    require(G.rows() == D.rows() && G.cols() == n, "update_w_direct: G must be m x n");
    require(Gamma1.rows() == D.rows() && Gamma1.cols() == n, "update_w_direct: Gamma1 must be m x n");
    Matrix system = (1.0 + mu) * (X.transpose() * X);
    system.diagonal().array() += 2.0 * lambda;
    const Matrix rhs = (D + mu * G - Gamma1) * X;
    return spd_solve(system, rhs.transpose(), "update_w_direct").transpose();
}

SolverState update_multipliers(SolverState state, const Matrix& constraint_image, double mu_growth,
                               double mu_max) {
    require(constraint_image.rows() == state.G.rows() && constraint_image.cols() == state.G.cols(),
            "update_multipliers: constraint image must match G");
    const Matrix gap = constraint_image - state.G;
    // Ascent direction for the penalty (mu/2)|G - C - Gamma1/mu|^2 used by the G, W, O steps.
    state.Gamma1 += state.mu * gap;
    state.mu = std::min(mu_growth * state.mu, mu_max);
    state.iter += 1;
    state.primal_residual = gap.norm() / std::max(1.0, state.G.norm());
    return state;
}

SolverState update_multipliers(SolverState state, const Matrix& W, const Matrix& X, const Matrix& O,
                               double mu_growth, double mu_max) {
    require(W.cols() == X.cols(), "update_multipliers: W and X disagree on d");
    require(O.rows() == X.rows() && O.cols() == X.rows(), "update_multipliers: O must be n x n");
    return update_multipliers(std::move(state), Matrix((W * X.transpose()) * O), mu_growth, mu_max);
}

Matrix ridge_solution(const Matrix& X, const Matrix& D, double lambda) {
    require(D.cols() == X.rows(), "ridge_solution: D must have n columns");
    Matrix system = X.transpose() * X;
    system.diagonal().array() += 2.0 * lambda;
    return spd_solve(system, (D * X).transpose(), "ridge_solution").transpose();
}

double full_objective(const Matrix& X, const Matrix& D, const Matrix& L, const Matrix& W,
                      const Matrix& O, double alpha, double lambda) {
    const Matrix P = W * X.transpose();
    const Matrix C = P * O;
    return 0.5 * (P - D).squaredNorm() + 0.5 * (C - L).squaredNorm() + alpha * nuclear_norm(C) +
           lambda * (W.squaredNorm() + O.squaredNorm());
}

double direct_objective(const Matrix& X, const Matrix& D, const Matrix& W, double alpha, double lambda) {
    const Matrix P = W * X.transpose();
    return 0.5 * (P - D).squaredNorm() + alpha * nuclear_norm(P) + lambda * W.squaredNorm();
}

Matrix design_matrix(const Matrix& X, const Standardizer& standardizer, bool bias) {
    Matrix Z = standardizer.apply(X);
    if (!bias)
        return Z;
    Matrix out(Z.rows(), Z.cols() + 1);
    out.leftCols(Z.cols()) = Z;
    out.col(Z.cols()).setOnes();
    return out;
}

namespace {

double relative_change(const Matrix& next, const Matrix& prev) {
    return (next - prev).norm() / std::max(1.0, prev.norm());
}

void fit_full(FitResult& result, const Matrix& X, const Matrix& D, const Matrix& L,
              const Hyperparams& hp) {
    const Index n = X.rows();
    Matrix& W = result.model.W;
    Matrix O = Matrix::Identity(n, n);

    SolverState state;
    state.G = (W * X.transpose()) * O;
    state.Gamma1 = Matrix::Zero(D.rows(), n);
    state.mu = hp.mu0;

    for (int it = 0; it < hp.max_iters; ++it) {
        state.G = update_g(W, X, O, state.Gamma1, state.mu, hp.alpha);
        Matrix W_next = update_w(X, D, L, O, state.G, state.Gamma1, state.mu, hp.lambda);
        O = update_o(X, W_next, L, state.G, state.Gamma1, state.mu, hp.lambda);
        const double w_change = relative_change(W_next, W);
        W = std::move(W_next);
        state = update_multipliers(std::move(state), W, X, O, hp.mu_growth, hp.mu_max);

        result.objective_trace.push_back(full_objective(X, D, L, W, O, hp.alpha, hp.lambda));
        result.mu_trace.push_back(state.mu);
        result.iterations_run = state.iter;
        result.final_primal_residual = state.primal_residual;
        if (state.primal_residual <= hp.tol && w_change <= hp.tol) {
            result.converged = true;
            break;
        }
    }
    result.model.O = std::move(O);
}

void fit_direct(FitResult& result, const Matrix& X, const Matrix& D, const Hyperparams& hp) {
    Matrix& W = result.model.W;

    SolverState state;
    state.G = W * X.transpose();
    state.Gamma1 = Matrix::Zero(D.rows(), X.rows());
    state.mu = hp.mu0;

    for (int it = 0; it < hp.max_iters; ++it) {
        state.G = svt(W * X.transpose() + state.Gamma1 / state.mu, hp.alpha / state.mu);
        Matrix W_next = update_w_direct(X, D, state.G, state.Gamma1, state.mu, hp.lambda);
        const double w_change = relative_change(W_next, W);
        W = std::move(W_next);
        state = update_multipliers(std::move(state), Matrix(W * X.transpose()), hp.mu_growth, hp.mu_max);

        result.objective_trace.push_back(direct_objective(X, D, W, hp.alpha, hp.lambda));
        result.mu_trace.push_back(state.mu);
        result.iterations_run = state.iter;
        result.final_primal_residual = state.primal_residual;
        if (state.primal_residual <= hp.tol && w_change <= hp.tol) {
            result.converged = true;
            break;
        }
    }
}

}  // namespace

FitResult fit(const FeatureMatrix& features, const LabelDistributionMatrix& labels, const Hyperparams& hp,
              Variant variant) {
    hp.validate(labels.m());
    if (features.n() != labels.n())
        throw ShapeMismatch("feature matrix has " + std::to_string(features.n()) +
                            " instances but label distribution matrix has " + std::to_string(labels.n()));

    FitResult result;
    TlrldlModel& model = result.model;
    model.variant = variant;
    model.bias = hp.bias;
    model.hyperparams = hp;
    model.standardizer = hp.standardize ? fit_standardizer(features.data())
                                        : Standardizer::identity(features.d());

    const Matrix X = design_matrix(features.data(), model.standardizer, hp.bias);
    const Matrix& D = labels.data();
    model.W = ridge_solution(X, D, hp.lambda);

    switch (variant) {
    case Variant::AblationB:
        result.converged = true;
        break;
    case Variant::AblationA:
        fit_direct(result, X, D, hp);
        break;
    case Variant::Full: {
        const MultiLabelMatrix L = degrade(labels, hp.degradation);
        fit_full(result, X, D, L.data(), hp);
        break;
    }
    }
    if (!model.W.allFinite())
        throw SingularSystem("fit produced non-finite parameters (" + shape(model.W) + ")");
    return result;
}

Vector project_to_simplex(const Vector& raw) {
    Vector p = raw.cwiseMax(0.0);
    const double total = p.sum();
    if (!(total > 0.0))
        return Vector::Constant(raw.size(), 1.0 / static_cast<double>(raw.size()));
    return p / total;
}

Vector predict(const TlrldlModel& model, const Vector& x) {
    if (x.size() != model.input_dim())
        throw DimensionMismatch("model expects " + std::to_string(model.input_dim()) +
                                " features, got " + std::to_string(x.size()));
    if (!x.allFinite())
        throw InvalidArgument("feature vector has non-finite entries");
    Vector z = model.standardizer.apply(x);
    if (model.bias) {
        z.conservativeResize(z.size() + 1);
        z(z.size() - 1) = 1.0;
    }
    return project_to_simplex(model.W * z);
}

Matrix predict(const TlrldlModel& model, const Matrix& X) {
    if (X.cols() != model.input_dim())
        throw DimensionMismatch("model expects " + std::to_string(model.input_dim()) +
                                " features, got " + std::to_string(X.cols()));
    const Matrix raw = model.W * design_matrix(X, model.standardizer, model.bias).transpose();
    Matrix out(raw.rows(), raw.cols());
    for (Index i = 0; i < raw.cols(); ++i)
        out.col(i) = project_to_simplex(raw.col(i));
    return out;
}

}  // namespace lrldl
