#ifndef SKSC_DATA_HPP
#define SKSC_DATA_HPP

#include "sksc/common.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sksc {

/*
 * Union-of-subspaces generative model. Cluster k produces
 *     x = bases[k] * y + centroids[k] + v,
 * with y ~ N(0, I) of length bases[k].cols() and v ~ N(0, noise_std^2 I).
 */
struct SubspaceModel {
    std::vector<Eigen::MatrixXd> bases;     // D x d_k, orthonormal columns
    std::vector<Eigen::VectorXd> centroids; // length D; zero for linear subspaces
    double noise_std = 0.0;

    Index clusters() const { return static_cast<Index>(bases.size()); }
    Index ambient_dim() const { return bases.empty() ? 0 : bases.front().rows(); }
    std::vector<Index> dims() const;

    /// Throws ConfigError if the bases are not orthonormal or sizes disagree.
    void validate() const;
};

/// D x N data, one datum per column, with optional ground-truth cluster ids.
struct DataMatrix {
    Eigen::MatrixXd values;
    std::optional<std::vector<int>> labels;

    Index dim() const { return values.rows(); }
    Index size() const { return values.cols(); }

    /// Throws DataError on empty or non-finite data, or labels of the wrong length.
    void validate() const;
};

/// Orthonormal D x d basis drawn uniformly from the Stiefel manifold (QR of a Gaussian).
Eigen::MatrixXd random_orthonormal_basis(Index D, Index d, std::uint64_t seed);

/// Random model with the given subspace dimensions. Centroids are drawn
/// N(0, I) when `affine`, zero otherwise.
SubspaceModel random_subspace_model(Index D, const std::vector<Index>& dims,
                                    double noise_std, bool affine, std::uint64_t seed);

/// Draws counts[k] points from cluster k, in cluster order. Deterministic in seed.
DataMatrix generate_union_of_subspaces(const SubspaceModel& model,
                                       const std::vector<Index>& counts,
                                       std::uint64_t seed);

/// Scales every column to unit l2 norm. A zero column is a DataError naming its index.
DataMatrix normalize_columns(const DataMatrix& X);

} // namespace sksc

#endif
