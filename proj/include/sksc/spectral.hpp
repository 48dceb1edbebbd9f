#ifndef SKSC_SPECTRAL_HPP
#define SKSC_SPECTRAL_HPP

#include "sksc/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

namespace sksc {

/// Hard assignment of N points to K clusters.
struct ClusterAssignment {
    std::vector<int> labels;
    int K = 0;
    double inertia = 0.0; // k-means objective at exit
};

/// Trailing eigenpairs of a graph Laplacian, eigenvalues ascending.
struct SpectralEmbedding {
    Eigen::MatrixXd vectors; // N x K, orthonormal columns
    Eigen::VectorXd eigenvalues;
};

struct EigenOptions {
    Index dense_cutoff = 2000; // dense solver for N <= cutoff
    int max_iter = 1000;       // shift-invert subspace iteration
    double tol = 1e-10;        // relative Ritz residual
};

struct KMeansOptions {
    int restarts = 10;
    int max_iter = 300;
    int threads = 1;
};

/// L = diag(W 1) - W.
Eigen::SparseMatrix<double> laplacian(const AffinityGraph& W);
Eigen::SparseMatrix<double> laplacian(const Eigen::SparseMatrix<double>& W);

/// K eigenpairs of the symmetric PSD matrix L with the smallest eigenvalues.
SpectralEmbedding trailing_eigenvectors(const Eigen::SparseMatrix<double>& L, Index K,
                                        const EigenOptions& opts = {});

/// Points are rows of P. Result of one Lloyd run.
struct LloydResult {
    std::vector<int> labels;
    Eigen::MatrixXd centers;             // K x dim
    std::vector<double> inertia_history; // after every assignment step
};

/// k-means++ seeding: returns the row indices of P chosen as initial centres.
std::vector<Index> kmeanspp_seeds(const Eigen::MatrixXd& P, Index K, std::mt19937_64& rng);

/// Lloyd iterations from the given centres until the labels stop changing.
/// A cluster that empties is reseeded with the point farthest from its centre.
LloydResult lloyd(const Eigen::MatrixXd& P, Eigen::MatrixXd centers, int max_iter);

/// Best of opts.restarts k-means++/Lloyd runs by inertia; deterministic in seed.
ClusterAssignment kmeans(const Eigen::MatrixXd& P, Index K, std::uint64_t seed,
                         const KMeansOptions& opts = {});

/// laplacian -> trailing_eigenvectors -> kmeans on the rows of the embedding.
ClusterAssignment spectral_cluster(const AffinityGraph& W, Index K, std::uint64_t seed,
                                   const KMeansOptions& kopts = {},
                                   const EigenOptions& eopts = {});

/// CSV with header "index,label".
void write_assignment_csv(const ClusterAssignment& a, const std::filesystem::path& path);

/// CSV, one row per datum, eigenvalues in a leading comment line.
void write_embedding_csv(const SpectralEmbedding& e, const std::filesystem::path& path);

} // namespace sksc

#endif
