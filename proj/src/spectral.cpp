#include "sksc/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <string>

namespace sksc {

Eigen::SparseMatrix<double> laplacian(const Eigen::SparseMatrix<double>& W)
{
    if (W.rows() != W.cols())
        throw ConfigError("laplacian: affinity matrix must be square");
    const Index N = W.rows();
    Eigen::VectorXd degree = Eigen::VectorXd::Zero(N);
    for (Index c = 0; c < W.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(W, c); it; ++it)
            degree(it.row()) += it.value();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(W.nonZeros() + N));
    for (Index c = 0; c < W.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(W, c); it; ++it)
            if (it.row() != it.col())
                trip.emplace_back(it.row(), it.col(), -it.value());
    for (Index i = 0; i < N; ++i)
        if (degree(i) != 0.0)
            trip.emplace_back(i, i, degree(i) - W.coeff(i, i));
    Eigen::SparseMatrix<double> L(N, N);
    L.setFromTriplets(trip.begin(), trip.end());
    L.makeCompressed();
    return L;
}

Eigen::SparseMatrix<double> laplacian(const AffinityGraph& W)
{
    return laplacian(W.weights);
}

namespace {

SpectralEmbedding dense_trailing(const Eigen::SparseMatrix<double>& L, Index K)
{
    const Eigen::MatrixXd dense = Eigen::MatrixXd(L);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success)
        throw NumericalError("dense symmetric eigensolver did not converge");
    return {es.eigenvectors().leftCols(K), es.eigenvalues().head(K)};
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& Y)
{
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    return qr.householderQ() * Eigen::MatrixXd::Identity(Y.rows(), Y.cols());
}

/*
 * Block inverse iteration on L + s I (s > 0 tiny, so the factor exists for a
 * singular L) with a Rayleigh-Ritz step per sweep. The block is oversized so
 * the convergence ratio (lambda_K + s) / (lambda_{m+1} + s) stays small.
 */
SpectralEmbedding shift_invert_trailing(const Eigen::SparseMatrix<double>& L, Index K,
                                        const EigenOptions& opts)
{
    const Index N = L.rows();
    const Index m = std::min(N, std::max<Index>(2 * K, K + 8));
    const double scale = std::max(L.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    const double shift = 1e-8 * scale;

    Eigen::SparseMatrix<double> S = L;
    for (Index i = 0; i < N; ++i)
        S.coeffRef(i, i) += shift;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(S);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("shift-invert factorization of the Laplacian failed");

    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd Q(N, m);
    for (Index k = 0; k < Q.size(); ++k)
        Q.data()[k] = normal(rng);
    Q = orthonormalize(Q);

    Eigen::VectorXd theta;
    for (int it = 0; it < opts.max_iter; ++it) {
        Q = orthonormalize(ldlt.solve(Q));
        const Eigen::MatrixXd LQ = L * Q;
        const Eigen::MatrixXd H = Q.transpose() * LQ;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
        theta = es.eigenvalues();
        Q = Q * es.eigenvectors();
        const Eigen::MatrixXd R = LQ * es.eigenvectors() - Q * theta.asDiagonal();
        double worst = 0.0;
        for (Index j = 0; j < K; ++j)
            worst = std::max(worst, R.col(j).norm());
        if (worst <= opts.tol * scale)
            return {Q.leftCols(K), theta.head(K)};
    }
    throw NumericalError("shift-invert eigensolver did not converge in "
                         + std::to_string(opts.max_iter) + " iterations");
}

double sq_dist(const Eigen::MatrixXd& P, Index i, const Eigen::MatrixXd& C, Index k)
{
    return (P.row(i) - C.row(k)).squaredNorm();
}

double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

SpectralEmbedding trailing_eigenvectors(const Eigen::SparseMatrix<double>& L, Index K,
                                        const EigenOptions& opts)
{
    const Index N = L.rows();
    if (L.cols() != N)
        throw ConfigError("trailing_eigenvectors: matrix must be square");
    if (K < 1 || K > N)
        throw ConfigError("trailing_eigenvectors: need 1 <= K <= N");
    if (N <= opts.dense_cutoff || L.nonZeros() == 0)
        return dense_trailing(L, K);
    return shift_invert_trailing(L, K, opts);
}

std::vector<Index> kmeanspp_seeds(const Eigen::MatrixXd& P, Index K, std::mt19937_64& rng)
{
    const Index N = P.rows();
    std::vector<Index> seeds;
    seeds.reserve(static_cast<std::size_t>(K));
    seeds.push_back(static_cast<Index>(uniform01(rng) * static_cast<double>(N)));
    Eigen::VectorXd mind(N);
    for (Index i = 0; i < N; ++i)
        mind(i) = (P.row(i) - P.row(seeds.back())).squaredNorm();
    while (static_cast<Index>(seeds.size()) < K) {
        const double total = mind.sum();
        Index pick = 0;
        if (total > 0) {
            const double u = uniform01(rng) * total;
            double acc = 0.0;
            pick = N - 1;
            for (Index i = 0; i < N; ++i) {
                acc += mind(i);
                if (u < acc && mind(i) > 0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Index>(uniform01(rng) * static_cast<double>(N));
        }
        seeds.push_back(pick);
        for (Index i = 0; i < N; ++i)
            mind(i) = std::min(mind(i), (P.row(i) - P.row(pick)).squaredNorm());
    }
    return seeds;
}

LloydResult lloyd(const Eigen::MatrixXd& P, Eigen::MatrixXd centers, int max_iter)
{
    const Index N = P.rows();
    const Index K = centers.rows();
    LloydResult out;
    out.labels.assign(static_cast<std::size_t>(N), -1);
    Eigen::VectorXd dist(N);

    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        double inertia = 0.0;
        for (Index i = 0; i < N; ++i) {
            int best = 0;
            double bd = sq_dist(P, i, centers, 0);
            for (Index k = 1; k < K; ++k) {
                const double d = sq_dist(P, i, centers, k);
                if (d < bd) {
                    bd = d;
                    best = static_cast<int>(k);
                }
            }
            auto& l = out.labels[static_cast<std::size_t>(i)];
            changed = changed || l != best;
            l = best;
            dist(i) = bd;
            inertia += bd;
        }
        out.inertia_history.push_back(inertia);
        if (!changed && it > 0)
            break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, P.cols());
        std::vector<Index> counts(static_cast<std::size_t>(K), 0);
        for (Index i = 0; i < N; ++i) {
            const auto l = out.labels[static_cast<std::size_t>(i)];
            sums.row(l) += P.row(i);
            ++counts[static_cast<std::size_t>(l)];
        }
        for (Index k = 0; k < K; ++k)
            if (counts[static_cast<std::size_t>(k)] > 0)
                centers.row(k) = sums.row(k) / static_cast<double>(counts[static_cast<std::size_t>(k)]);
        for (Index i = 0; i < N; ++i)
            dist(i) = sq_dist(P, i, centers, out.labels[static_cast<std::size_t>(i)]);
        for (Index k = 0; k < K; ++k) {
            if (counts[static_cast<std::size_t>(k)] > 0)
                continue;
            Index far = 0;
            dist.maxCoeff(&far);
            centers.row(k) = P.row(far);
            dist(far) = 0.0;
        }
    }
    out.centers = std::move(centers);
    return out;
}

ClusterAssignment kmeans(const Eigen::MatrixXd& P, Index K, std::uint64_t seed,
                         const KMeansOptions& opts)
{
    const Index N = P.rows();
    if (K < 1)
        throw ConfigError("kmeans: K must be positive");
    if (K > N)
        throw ConfigError("kmeans: K=" + std::to_string(K) + " exceeds the number of points "
                          + std::to_string(N));
    if (opts.restarts < 1 || opts.max_iter < 1)
        throw ConfigError("kmeans: restarts and max_iter must be positive");
    if (!P.allFinite())
        throw NumericalError("kmeans: non-finite embedding");

    std::vector<LloydResult> runs(static_cast<std::size_t>(opts.restarts));
    parallel_for(0, opts.restarts, opts.threads, [&](Index r) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        const auto seeds = kmeanspp_seeds(P, K, rng);
        Eigen::MatrixXd centers(K, P.cols());
        for (Index k = 0; k < K; ++k)
            centers.row(k) = P.row(seeds[static_cast<std::size_t>(k)]);
        runs[static_cast<std::size_t>(r)] = lloyd(P, std::move(centers), opts.max_iter);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].inertia_history.back() < runs[best].inertia_history.back())
            best = r;
    ClusterAssignment out;
    out.labels = std::move(runs[best].labels);
    out.K = static_cast<int>(K);
    out.inertia = runs[best].inertia_history.back();
    return out;
}

ClusterAssignment spectral_cluster(const AffinityGraph& W, Index K, std::uint64_t seed,
                                   const KMeansOptions& kopts, const EigenOptions& eopts)
{
    const auto L = laplacian(W);
    const auto emb = trailing_eigenvectors(L, K, eopts);
    return kmeans(emb.vectors, K, seed, kopts);
}

void write_assignment_csv(const ClusterAssignment& a, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << "index,label\n";
    for (std::size_t i = 0; i < a.labels.size(); ++i)
        out << i << ',' << a.labels[i] << '\n';
}

void write_embedding_csv(const SpectralEmbedding& e, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "# eigenvalues";
    for (Index k = 0; k < e.eigenvalues.size(); ++k)
        out << ' ' << e.eigenvalues(k);
    out << '\n';
    for (Index i = 0; i < e.vectors.rows(); ++i) {
        for (Index k = 0; k < e.vectors.cols(); ++k)
            out << (k ? "," : "") << e.vectors(i, k);
        out << '\n';
    }
}

} // namespace sksc
