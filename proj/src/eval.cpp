#include "sksc/eval.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace sksc {

std::vector<Index> max_weight_matching(const Eigen::MatrixXd& weights)
{
    const Index n = weights.rows();
    if (weights.cols() != n)
        throw ConfigError("matching requires a square weight matrix");
    // Shortest augmenting path form of the Hungarian method on cost = -weight,
    // 1-based potentials u (rows), v (cols); p[j] = row matched to column j.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<Index> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
    auto cost = [&](Index i, Index j) { return -weights(i - 1, j - 1); };
    for (Index i = 1; i <= n; ++i) {
        p[0] = i;
        Index j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
        std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const Index i0 = p[static_cast<std::size_t>(j0)];
            double delta = inf;
            Index j1 = 0;
            for (Index j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)])
                    continue;
                const double cur = cost(i0, j) - u[static_cast<std::size_t>(i0)]
                    - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const Index j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<Index> assignment(static_cast<std::size_t>(n), 0);
    for (Index j = 1; j <= n; ++j)
        assignment[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return assignment;
}

double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth)
{
    if (pred.size() != truth.size())
        throw ConfigError("clustering_accuracy: " + std::to_string(pred.size())
                          + " predictions for " + std::to_string(truth.size()) + " labels");
    if (pred.empty())
        return 1.0;
    int m = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] < 0 || truth[i] < 0)
            throw ConfigError("clustering_accuracy: labels must be nonnegative");
        m = std::max({m, pred[i] + 1, truth[i] + 1});
    }
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < pred.size(); ++i)
        counts(pred[i], truth[i]) += 1.0;
    const auto match = max_weight_matching(counts);
    double correct = 0.0;
    for (Index r = 0; r < m; ++r)
        correct += counts(r, match[static_cast<std::size_t>(r)]);
    return correct / static_cast<double>(pred.size());
}

double clustering_accuracy(const ClusterAssignment& pred, const std::vector<int>& truth)
{
    return clustering_accuracy(pred.labels, truth);
}

Index numerical_rank(const Eigen::MatrixXd& M, double rel_tol)
{
    if (M.size() == 0)
        return 0;
    const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXd>(M).singularValues();
    if (s.size() == 0 || s(0) == 0.0)
        return 0;
    const double thresh = rel_tol * s(0);
    return (s.array() > thresh).count();
}

bool check_range_preservation(const Eigen::MatrixXd& X, const Eigen::MatrixXd& B, double rank_tol)
{
    if (X.rows() != B.rows())
        throw ConfigError("check_range_preservation: row counts differ");
    Eigen::MatrixXd XB(X.rows(), X.cols() + B.cols());
    XB << X, B;
    const Index rx = numerical_rank(X, rank_tol);
    return rx == numerical_rank(B, rank_tol) && rx == numerical_rank(XB, rank_tol);
}

Eigen::MatrixXd min_norm_representations(const Eigen::MatrixXd& dict, const Eigen::MatrixXd& X)
{
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(dict);
    cod.setThreshold(1e-10);
    return cod.solve(X);
}

double check_distance_preservation(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& A, double lo,
                                   double hi)
{
    if (Z.cols() != A.cols())
        throw ConfigError("check_distance_preservation: column counts differ");
    const Index N = Z.cols();
    std::size_t total = 0, inside = 0;
    for (Index i = 0; i < N; ++i)
        for (Index j = i + 1; j < N; ++j) {
            const double dz = (Z.col(i) - Z.col(j)).norm();
            if (dz <= 1e-12)
                continue;
            const double ratio = (A.col(i) - A.col(j)).norm() / dz;
            ++total;
            if (ratio >= lo && ratio <= hi)
                ++inside;
        }
    return total == 0 ? 1.0 : static_cast<double>(inside) / static_cast<double>(total);
}

namespace {

double tail_term(const BoundParams& p)
{
    return std::sqrt((1 + p.epsilon) / (1 - p.epsilon))
        * std::sqrt(static_cast<double>(p.rho - p.r)) * p.sigma_r1 * p.sigma_r1;
}

void check_eps(const BoundParams& p)
{
    if (!(p.epsilon > 0 && p.epsilon < 1))
        throw ConfigError("bound: epsilon must lie in (0, 1)");
}

} // namespace

double theorem1_rhs(const BoundParams& p)
{
    check_eps(p);
    return p.lambda * (1 + tail_term(p)) + 1 / std::sqrt(1 - p.epsilon);
}

double corollary1_rhs(const BoundParams& p)
{
    check_eps(p);
    return p.lambda * (1 + tail_term(p))
        + std::sqrt(static_cast<double>(p.n) / (1 - p.epsilon));
}

double corollary2_rhs(const BoundParams& p)
{
    check_eps(p);
    return p.lambda * (std::sqrt(static_cast<double>(p.N)) + tail_term(p))
        + std::sqrt(static_cast<double>(p.n) / (1 - p.epsilon));
}

BoundParams bound_params(const Eigen::MatrixXd& X, Index r, Index n, double lambda,
                         double epsilon, double rank_tol)
{
    const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXd>(X).singularValues();
    BoundParams p;
    p.rho = (s.size() == 0 || s(0) == 0.0) ? 0 : (s.array() > rank_tol * s(0)).count();
    if (r < 0 || r >= p.rho)
        throw ConfigError("bound: need 0 <= r < rank(X) = " + std::to_string(p.rho) + ", got r="
                          + std::to_string(r));
    p.r = r;
    p.n = n;
    p.N = X.cols();
    p.lambda = lambda;
    p.epsilon = epsilon;
    p.sigma_r1 = s(r);
    check_eps(p);
    return p;
}

namespace {

std::vector<BoundCheck> per_column(const Eigen::MatrixXd& X, const Eigen::MatrixXd& B,
                                   const Eigen::MatrixXd& A_hat, Index r, double lambda,
                                   double epsilon, double (*rhs_fn)(const BoundParams&))
{
    if (B.cols() != A_hat.rows() || X.cols() != A_hat.cols() || X.rows() != B.rows())
        throw ConfigError("bound: incompatible X, B, A dimensions");
    const auto p = bound_params(X, r, B.cols(), lambda, epsilon);
    const double rhs = rhs_fn(p);
    const Eigen::MatrixXd resid = X - B * A_hat;
    std::vector<BoundCheck> out(static_cast<std::size_t>(X.cols()));
    for (Index j = 0; j < X.cols(); ++j) {
        auto& c = out[static_cast<std::size_t>(j)];
        c.lhs = resid.col(j).norm();
        c.rhs = rhs;
        c.holds = c.lhs <= c.rhs;
        c.params = p;
    }
    return out;
}

} // namespace

std::vector<BoundCheck> theorem1_bound(const Eigen::MatrixXd& X, const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& A_hat, Index r, double lambda,
                                       double epsilon)
{
    return per_column(X, B, A_hat, r, lambda, epsilon, &theorem1_rhs);
}

std::vector<BoundCheck> corollary1_bound(const Eigen::MatrixXd& X, const Eigen::MatrixXd& B,
                                         const Eigen::MatrixXd& A_hat, Index r, double lambda,
                                         double epsilon)
{
    return per_column(X, B, A_hat, r, lambda, epsilon, &corollary1_rhs);
}

BoundCheck corollary2_bound(const Eigen::MatrixXd& X, const Eigen::MatrixXd& B,
                            const Eigen::MatrixXd& A_hat, Index r, double lambda, double epsilon)
{
    if (B.cols() != A_hat.rows() || X.cols() != A_hat.cols() || X.rows() != B.rows())
        throw ConfigError("bound: incompatible X, B, A dimensions");
    BoundCheck c;
    c.params = bound_params(X, r, B.cols(), lambda, epsilon);
    c.lhs = (X - B * A_hat).norm();
    c.rhs = corollary2_rhs(c.params);
    c.holds = c.lhs <= c.rhs;
    return c;
}

double StageTimer::total() const
{
    double t = 0.0;
    for (const auto& [_, s] : stages_)
        t += s;
    return t;
}

} // namespace sksc
