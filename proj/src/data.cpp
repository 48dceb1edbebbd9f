#include "sksc/data.hpp"

#include <random>
#include <string>

namespace sksc {

std::vector<Index> SubspaceModel::dims() const
{
    std::vector<Index> out;
    out.reserve(bases.size());
    for (const auto& C : bases)
        out.push_back(C.cols());
    return out;
}

void SubspaceModel::validate() const
{
    if (bases.empty())
        throw ConfigError("subspace model has no clusters");
    if (centroids.size() != bases.size())
        throw ConfigError("subspace model: " + std::to_string(bases.size()) + " bases but "
                          + std::to_string(centroids.size()) + " centroids");
    if (!(noise_std >= 0.0))
        throw ConfigError("subspace model: noise_std must be nonnegative");
    const Index D = ambient_dim();
    for (std::size_t k = 0; k < bases.size(); ++k) {
        const auto& C = bases[k];
        if (C.rows() != D || centroids[k].size() != D)
            throw ConfigError("subspace model: cluster " + std::to_string(k)
                              + " does not match ambient dimension " + std::to_string(D));
        if (C.cols() > D)
            throw ConfigError("subspace model: cluster " + std::to_string(k)
                              + " has more basis vectors than the ambient dimension");
        if (C.cols() > 0) {
            const Eigen::MatrixXd gram = C.transpose() * C;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(C.cols(), C.cols());
            if ((gram - I).cwiseAbs().maxCoeff() > 1e-10)
                throw ConfigError("subspace model: basis " + std::to_string(k)
                                  + " is not orthonormal");
        }
    }
}

void DataMatrix::validate() const
{
    if (values.rows() < 1 || values.cols() < 1)
        throw DataError("data matrix is empty");
    if (!values.allFinite())
        throw DataError("data matrix contains NaN or Inf entries");
    if (labels && static_cast<Index>(labels->size()) != values.cols())
        throw DataError("label count " + std::to_string(labels->size())
                        + " does not match column count " + std::to_string(values.cols()));
    if (labels) {
        for (int l : *labels)
            if (l < 0)
                throw DataError("negative cluster label " + std::to_string(l));
    }
}

Eigen::MatrixXd random_orthonormal_basis(Index D, Index d, std::uint64_t seed)
{
    if (d > D)
        throw ConfigError("basis dimension exceeds ambient dimension");
    if (d == 0)
        return Eigen::MatrixXd(D, 0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd G(D, d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < D; ++i)
            G(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(D, d);
    // Fix the sign ambiguity of QR so the law is Haar.
    const Eigen::MatrixXd& R = qr.matrixQR();
    for (Index j = 0; j < d; ++j)
        if (R(j, j) < 0)
            Q.col(j) = -Q.col(j);
    return Q;
}

SubspaceModel random_subspace_model(Index D, const std::vector<Index>& dims,
                                    double noise_std, bool affine, std::uint64_t seed)
{
    SubspaceModel model;
    model.noise_std = noise_std;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        model.bases.push_back(random_orthonormal_basis(D, dims[k], mix_seed(seed, k)));
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(D);
        if (affine)
            for (Index i = 0; i < D; ++i)
                mu(i) = normal(rng);
        model.centroids.push_back(std::move(mu));
    }
    model.validate();
    return model;
}

DataMatrix generate_union_of_subspaces(const SubspaceModel& model,
                                       const std::vector<Index>& counts,
                                       std::uint64_t seed)
{
    model.validate();
    if (static_cast<Index>(counts.size()) != model.clusters())
        throw ConfigError("expected " + std::to_string(model.clusters())
                          + " cluster counts, got " + std::to_string(counts.size()));
    Index N = 0;
    for (Index c : counts) {
        if (c < 1)
            throw ConfigError("every cluster count must be at least 1");
        N += c;
    }

    const Index D = model.ambient_dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;

    DataMatrix out;
    out.values.resize(D, N);
    out.labels.emplace();
    out.labels->reserve(static_cast<std::size_t>(N));

    Index col = 0;
    for (Index k = 0; k < model.clusters(); ++k) {
        const auto& C = model.bases[static_cast<std::size_t>(k)];
        const auto& mu = model.centroids[static_cast<std::size_t>(k)];
        Eigen::VectorXd y(C.cols());
        Eigen::VectorXd v(D);
        for (Index i = 0; i < counts[static_cast<std::size_t>(k)]; ++i, ++col) {
            for (Index j = 0; j < y.size(); ++j)
                y(j) = normal(rng);
            for (Index j = 0; j < D; ++j)
                v(j) = model.noise_std * normal(rng);
            out.values.col(col).noalias() = C * y;
            out.values.col(col) += mu + v;
            out.labels->push_back(static_cast<int>(k));
        }
    }
    return out;
}

DataMatrix normalize_columns(const DataMatrix& X)
{
    DataMatrix out = X;
    for (Index j = 0; j < out.values.cols(); ++j) {
        const double norm = out.values.col(j).norm();
        if (norm == 0.0)
            throw DataError("cannot normalize zero column " + std::to_string(j));
        out.values.col(j) /= norm;
    }
    return out;
}

} // namespace sksc
