#ifndef SKSC_GRAPH_HPP
#define SKSC_GRAPH_HPP

#include "sksc/common.hpp"

#include <Eigen/SparseCore>

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace sksc {

enum class AffinityKind { Binary, HeatKernel };

AffinityKind parse_affinity_kind(std::string_view name);
std::string_view to_string(AffinityKind kind);

/// Symmetric nonnegative N x N weights with an empty diagonal.
struct AffinityGraph {
    Eigen::SparseMatrix<double> weights;
    Index k = 0;
    AffinityKind kind = AffinityKind::Binary;
    double sigma = 0.0; // heat-kernel bandwidth actually used; 0 for binary

    Index size() const { return weights.rows(); }
};

/// Exact k nearest neighbours of every column, sorted by (distance, index).
struct NeighborSets {
    std::vector<std::vector<Index>> indices;
    std::vector<std::vector<double>> distances;
};

/*
 * Brute-force k-NN over the columns of A (n x N) in Euclidean distance,
 * excluding the query itself. Distances come from the Gram identity
 * ||a_i - a_j||^2 = g_ii + g_jj - 2 g_ij, clamped at zero. Ties are broken
 * by the smaller index. Requires 1 <= k <= N - 1.
 */
NeighborSets knn_search(const Eigen::MatrixXd& A, Index k, int threads = 1);

/// Index part of knn_search.
std::vector<std::vector<Index>> knn_sets(const Eigen::MatrixXd& A, Index k, int threads = 1);

/// W_ij = 1 iff j is among the k nearest neighbours of i or i among those of j.
AffinityGraph build_affinity_binary(const Eigen::MatrixXd& A, Index k, int threads = 1);

/// Same edge set as the binary graph with weights exp(-||a_i - a_j||^2 / sigma^2).
/// An empty sigma selects the median k-NN distance.
AffinityGraph build_affinity_heat(const Eigen::MatrixXd& A, Index k,
                                  std::optional<double> sigma, int threads = 1);

/// Assembles a graph from precomputed neighbour sets.
AffinityGraph affinity_from_neighbors(const NeighborSets& nn, AffinityKind kind,
                                      std::optional<double> sigma = std::nullopt);

/// MatrixMarket "coordinate real symmetric", lower triangle, 1-based.
void write_graph_mtx(const AffinityGraph& W, const std::filesystem::path& path);

/// CSV with header "i,j,w", one row per edge with i < j (0-based).
void write_edge_list(const AffinityGraph& W, const std::filesystem::path& path);

} // namespace sksc

#endif
