#ifndef SKSC_SOLVERS_HPP
#define SKSC_SOLVERS_HPP

#include "sksc/common.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <string>
#include <string_view>

namespace sksc {

enum class SolverMethod { SketchLSR, SketchSSC, SketchLRR };

SolverMethod parse_solver_method(std::string_view name);
std::string_view to_string(SolverMethod m);

/*
 * Parameters of the sketched regression
 *     min_A  h(A) + (lambda/2) ||X - B A||_F^2
 * and of the iterative solvers. nu0/nu_max/p only matter for the ADMM
 * (fixed penalty nu0) and ALM (nu <- min(p nu, nu_max)) solvers.
 */
struct SolverConfig {
    double lambda = 1.0;
    double nu0 = 1.0;
    double nu_max = 1e6;
    double p = 1.1;
    double tol = 1e-6;
    int max_iter = 500;
    int threads = 1;

    static SolverConfig ssc_defaults(double lambda)
    {
        SolverConfig c;
        c.lambda = lambda;
        c.nu0 = 1.0;
        return c;
    }
    static SolverConfig lrr_defaults(double lambda)
    {
        SolverConfig c;
        c.lambda = lambda;
        c.nu0 = 1e-2;
        c.p = 1.1;
        c.nu_max = 1e6;
        return c;
    }

    void validate() const
    {
        if (!(lambda > 0) || !std::isfinite(lambda))
            throw ConfigError("solver: lambda must be positive and finite");
        if (!(nu0 > 0) || !(nu_max >= nu0))
            throw ConfigError("solver: require 0 < nu0 <= nu_max");
        if (!(p > 1))
            throw ConfigError("solver: penalty growth p must exceed 1");
        if (!(tol > 0))
            throw ConfigError("solver: tol must be positive");
        if (max_iter < 1)
            throw ConfigError("solver: max_iter must be at least 1");
        if (threads < 1)
            throw ConfigError("solver: threads must be at least 1");
    }

    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct SolveDiagnostics {
    int iterations = 0;                 // max over columns for the per-column ADMM
    double final_primal_residual = 0.0; // relative ||A - C|| at exit (worst column for ADMM)
    double objective_value = 0.0;
    bool converged = true;
    double wall_time = 0.0;             // seconds
};

template <typename Scalar>
struct CoefficientMatrix {
    Mat<Scalar> values; // n x N
    SolverMethod method = SolverMethod::SketchLSR;
    SolveDiagnostics diagnostics;
};

// ---------------------------------------------------------------------------
// Proximal operators

/// Soft-thresholding, the prox of sigma*|.|. |z| <= sigma maps to 0.
template <typename Scalar>
Scalar soft_threshold(Scalar z, Scalar sigma)
{
    if (z > sigma)
        return z - sigma;
    if (z < -sigma)
        return z + sigma;
    return Scalar(0);
}

template <typename Derived>
typename Derived::PlainObject soft_threshold(const Eigen::MatrixBase<Derived>& M,
                                             typename Derived::Scalar sigma)
{
    using Scalar = typename Derived::Scalar;
    if (sigma < Scalar(0))
        throw ConfigError("soft_threshold: sigma must be nonnegative");
    return M.unaryExpr([sigma](Scalar z) { return soft_threshold(z, sigma); });
}

/// Singular value thresholding: argmin_C tau ||C||_* + 1/2 ||C - M||_F^2.
template <typename Derived>
Mat<typename Derived::Scalar> svt(const Eigen::MatrixBase<Derived>& M,
                                  typename Derived::Scalar tau)
{
    using Scalar = typename Derived::Scalar;
    if (tau < Scalar(0))
        throw ConfigError("svt: tau must be nonnegative");
    if (M.size() == 0)
        return M;
    Eigen::BDCSVD<Mat<Scalar>> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NumericalError("svt: SVD failed");
    const Vec<Scalar> s = (svd.singularValues().array() - tau).max(Scalar(0)).matrix();
    Index rank = 0;
    while (rank < s.size() && s(rank) > Scalar(0))
        ++rank;
    if (rank == 0)
        return Mat<Scalar>::Zero(M.rows(), M.cols());
    return svd.matrixU().leftCols(rank) * s.head(rank).asDiagonal()
        * svd.matrixV().leftCols(rank).transpose();
}

template <typename Derived>
typename Derived::Scalar nuclear_norm(const Eigen::MatrixBase<Derived>& M)
{
    if (M.size() == 0)
        return 0;
    return Eigen::BDCSVD<Mat<typename Derived::Scalar>>(M).singularValues().sum();
}

// ---------------------------------------------------------------------------
// Objectives

template <typename Scalar>
Scalar fit_term(const Mat<Scalar>& X, const Mat<Scalar>& B, const Mat<Scalar>& A, Scalar lambda)
{
    return lambda / 2 * (X - B * A).squaredNorm();
}

/// 1/2 ||A||_F^2 + lambda/2 ||X - BA||_F^2
template <typename Scalar>
Scalar lsr_objective(const Mat<Scalar>& X, const Mat<Scalar>& B, const Mat<Scalar>& A,
                     Scalar lambda)
{
    return A.squaredNorm() / 2 + fit_term(X, B, A, lambda);
}

/// ||A||_1 + lambda/2 ||X - BA||_F^2
template <typename Scalar>
Scalar ssc_objective(const Mat<Scalar>& X, const Mat<Scalar>& B, const Mat<Scalar>& A,
                     Scalar lambda)
{
    return A.cwiseAbs().sum() + fit_term(X, B, A, lambda);
}

/// ||A||_* + lambda/2 ||X - BA||_F^2
template <typename Scalar>
Scalar lrr_objective(const Mat<Scalar>& X, const Mat<Scalar>& B, const Mat<Scalar>& A,
                     Scalar lambda)
{
    return nuclear_norm(A) + fit_term(X, B, A, lambda);
}

namespace detail {

template <typename Scalar>
void check_dims(const Mat<Scalar>& X, const Mat<Scalar>& B, const char* who)
{
    if (X.rows() != B.rows())
        throw ConfigError(std::string(who) + ": data has " + std::to_string(X.rows())
                          + " rows but dictionary has " + std::to_string(B.rows()));
    if (B.cols() < 1 || X.cols() < 1)
        throw ConfigError(std::string(who) + ": empty data or dictionary");
}

/// Cholesky of lambda B^T B + shift I.
template <typename Scalar>
Eigen::LLT<Mat<Scalar>> regularized_gram(const Mat<Scalar>& BtB, Scalar lambda, Scalar shift)
{
    Mat<Scalar> G = lambda * BtB;
    G.diagonal().array() += shift;
    Eigen::LLT<Mat<Scalar>> llt(G);
    if (llt.info() != Eigen::Success)
        throw NumericalError("Cholesky factorization of lambda B^T B + nu I failed");
    return llt;
}

// Columns are processed in blocks whose boundaries do not depend on the
// thread count, so results are bit-identical for any number of workers.
inline constexpr Index kColumnBlock = 256;

inline double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Solvers

/// Closed form A = lambda (lambda B^T B + I)^{-1} B^T X.
template <typename Scalar>
CoefficientMatrix<Scalar> solve_sketch_lsr(const Mat<Scalar>& X, const Mat<Scalar>& B,
                                           Scalar lambda, int threads = 1)
{
    const auto t0 = std::chrono::steady_clock::now();
    detail::check_dims(X, B, "solve_sketch_lsr");
    if (!(lambda > 0))
        throw ConfigError("solve_sketch_lsr: lambda must be positive");

    const Mat<Scalar> BtB = B.transpose() * B;
    const auto llt = detail::regularized_gram<Scalar>(BtB, lambda, Scalar(1));

    CoefficientMatrix<Scalar> out;
    out.method = SolverMethod::SketchLSR;
    out.values.resize(B.cols(), X.cols());
    const Index N = X.cols();
    const Index blocks = (N + detail::kColumnBlock - 1) / detail::kColumnBlock;
    parallel_for(0, blocks, threads, [&](Index b) {
        const Index j0 = b * detail::kColumnBlock;
        const Index w = std::min(detail::kColumnBlock, N - j0);
        Mat<Scalar> rhs = lambda * (B.transpose() * X.middleCols(j0, w));
        out.values.middleCols(j0, w) = llt.solve(rhs);
    });
    if (!out.values.allFinite())
        throw NumericalError("solve_sketch_lsr: non-finite coefficients");
    out.diagnostics.objective_value = lsr_objective<Scalar>(X, B, out.values, lambda);
    out.diagnostics.wall_time = detail::seconds_since(t0);
    return out;
}

/// Self-dictionary LSR, Z = lambda (lambda X^T X + I)^{-1} X^T X (N x N).
template <typename Scalar>
Mat<Scalar> solve_batch_lsr(const Mat<Scalar>& X, Scalar lambda)
{
    if (!(lambda > 0))
        throw ConfigError("solve_batch_lsr: lambda must be positive");
    const Mat<Scalar> XtX = X.transpose() * X;
    const auto llt = detail::regularized_gram<Scalar>(XtX, lambda, Scalar(1));
    return llt.solve(lambda * XtX);
}

/*
 * l1-regularized sketched regression by ADMM, one column at a time:
 *   a <- (lambda B^T B + nu I)^{-1} (lambda B^T x + nu (c - d))
 *   c <- T_{1/nu}(a + d)
 *   d <- d + a - c
 * with a fixed penalty nu = cfg.nu0, so a single Cholesky factor serves
 * every column and iteration. Stops when ||a - c|| <= tol max(1, ||a||)
 * and nu ||c - c_prev|| <= tol max(1, nu ||d||). Returns the sparse iterate c.
 */
template <typename Scalar>
CoefficientMatrix<Scalar> solve_sketch_ssc(const Mat<Scalar>& X, const Mat<Scalar>& B,
                                           const SolverConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    detail::check_dims(X, B, "solve_sketch_ssc");
    const auto lambda = static_cast<Scalar>(cfg.lambda);
    const auto nu = static_cast<Scalar>(cfg.nu0);
    const auto tol = static_cast<Scalar>(cfg.tol);
    const Index n = B.cols();
    const Index N = X.cols();

    const Mat<Scalar> BtB = B.transpose() * B;
    const auto llt = detail::regularized_gram<Scalar>(BtB, lambda, nu);

    CoefficientMatrix<Scalar> out;
    out.method = SolverMethod::SketchSSC;
    out.values.resize(n, N);
    std::vector<int> iters(static_cast<std::size_t>(N), 0);
    std::vector<Scalar> resid(static_cast<std::size_t>(N), 0);

    parallel_for(0, N, cfg.threads, [&](Index j) {
        const Vec<Scalar> btx = lambda * (B.transpose() * X.col(j));
        Vec<Scalar> a = Vec<Scalar>::Zero(n);
        Vec<Scalar> c = Vec<Scalar>::Zero(n);
        Vec<Scalar> d = Vec<Scalar>::Zero(n);
        Vec<Scalar> c_prev(n);
        Scalar r = 0;
        int it = 0;
        while (it < cfg.max_iter) {
            ++it;
            a = llt.solve(btx + nu * (c - d));
            c_prev = c;
            c = soft_threshold(a + d, Scalar(1) / nu);
            d += a - c;
            r = (a - c).norm() / std::max(Scalar(1), a.norm());
            const Scalar s = nu * (c - c_prev).norm() / std::max(Scalar(1), nu * d.norm());
            if (r <= tol && s <= tol)
                break;
        }
        out.values.col(j) = c;
        iters[static_cast<std::size_t>(j)] = it;
        resid[static_cast<std::size_t>(j)] = r;
    });

    auto& diag = out.diagnostics;
    diag.iterations = *std::max_element(iters.begin(), iters.end());
    diag.final_primal_residual = static_cast<double>(*std::max_element(resid.begin(), resid.end()));
    diag.converged = diag.final_primal_residual <= cfg.tol;
    if (!out.values.allFinite())
        throw NumericalError("solve_sketch_ssc: non-finite coefficients");
    diag.objective_value = ssc_objective<Scalar>(X, B, out.values, lambda);
    diag.wall_time = detail::seconds_since(t0);
    return out;
}

/*
 * Nuclear-norm-regularized sketched regression by inexact ALM:
 *   A <- (lambda B^T B + nu I)^{-1} (lambda B^T X + nu (C - D))
 *   C <- svt(A + D, 1/nu)
 *   D <- D + A - C
 *   nu <- min(p nu, nu_max)
 * The factorization is refreshed whenever nu changes. Stops when
 * ||A - C||_F <= tol max(1, ||A||_F); returns C.
 */
template <typename Scalar>
CoefficientMatrix<Scalar> solve_sketch_lrr(const Mat<Scalar>& X, const Mat<Scalar>& B,
                                           const SolverConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    detail::check_dims(X, B, "solve_sketch_lrr");
    const auto lambda = static_cast<Scalar>(cfg.lambda);
    const auto tol = static_cast<Scalar>(cfg.tol);
    const Index n = B.cols();
    const Index N = X.cols();

    const Mat<Scalar> BtB = B.transpose() * B;
    const Mat<Scalar> BtX = lambda * (B.transpose() * X);

    Mat<Scalar> A = Mat<Scalar>::Zero(n, N);
    Mat<Scalar> C = Mat<Scalar>::Zero(n, N);
    Mat<Scalar> D = Mat<Scalar>::Zero(n, N);
    auto nu = static_cast<Scalar>(cfg.nu0);
    auto llt = detail::regularized_gram<Scalar>(BtB, lambda, nu);
    Scalar factored_nu = nu;

    CoefficientMatrix<Scalar> out;
    out.method = SolverMethod::SketchLRR;
    auto& diag = out.diagnostics;
    diag.converged = false;
    Scalar r = 0;
    int it = 0;
    while (it < cfg.max_iter) {
        ++it;
        if (nu != factored_nu) {
            llt = detail::regularized_gram<Scalar>(BtB, lambda, nu);
            factored_nu = nu;
        }
        A = llt.solve(BtX + nu * (C - D));
        C = svt(A + D, Scalar(1) / nu);
        D += A - C;
        r = (A - C).norm() / std::max(Scalar(1), A.norm());
        if (r <= tol) {
            diag.converged = true;
            break;
        }
        nu = std::min(static_cast<Scalar>(cfg.p) * nu, static_cast<Scalar>(cfg.nu_max));
    }
    if (!C.allFinite())
        throw NumericalError("solve_sketch_lrr: non-finite coefficients");
    out.values = std::move(C);
    diag.iterations = it;
    diag.final_primal_residual = static_cast<double>(r);
    diag.objective_value = lrr_objective<Scalar>(X, B, out.values, lambda);
    diag.wall_time = detail::seconds_since(t0);
    return out;
}

/// Dispatches on method. For SketchLSR only cfg.lambda and cfg.threads are used.
template <typename Scalar>
CoefficientMatrix<Scalar> solve(SolverMethod method, const Mat<Scalar>& X, const Mat<Scalar>& B,
                                const SolverConfig& cfg)
{
    switch (method) {
    case SolverMethod::SketchLSR:
        cfg.validate();
        return solve_sketch_lsr<Scalar>(X, B, static_cast<Scalar>(cfg.lambda), cfg.threads);
    case SolverMethod::SketchSSC:
        return solve_sketch_ssc<Scalar>(X, B, cfg);
    case SolverMethod::SketchLRR:
        return solve_sketch_lrr<Scalar>(X, B, cfg);
    }
    throw ConfigError("unknown solver method");
}

} // namespace sksc

#endif
