#include "sksc/sketch.hpp"

#include <numeric>
#include <random>
#include <string>

namespace sksc {

SketchKind parse_sketch_kind(std::string_view name)
{
    if (name == "rademacher")
        return SketchKind::Rademacher;
    if (name == "gaussian" || name == "normal")
        return SketchKind::Gaussian;
    if (name == "sparse" || name == "sparse-embedding" || name == "countsketch")
        return SketchKind::SparseEmbedding;
    if (name == "fjlt" || name == "hadamard" || name == "hadamard-fjlt")
        return SketchKind::HadamardFJLT;
    throw ConfigError("unknown sketch kind '" + std::string(name) + "'");
}

std::string_view to_string(SketchKind kind)
{
    switch (kind) {
    case SketchKind::Rademacher:
        return "rademacher";
    case SketchKind::Gaussian:
        return "gaussian";
    case SketchKind::SparseEmbedding:
        return "sparse-embedding";
    case SketchKind::HadamardFJLT:
        return "hadamard-fjlt";
    }
    return "?";
}

Index next_pow2(Index n)
{
    Index p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

SketchOperator::SketchOperator(SketchKind kind, Index rows, Index cols, std::uint64_t seed)
    : kind_(kind), rows_(rows), cols_(cols), seed_(seed), padded_(rows)
{
    if (rows < 1 || cols < 1)
        throw ConfigError("sketch dimensions must be positive, got " + std::to_string(rows) + "x"
                          + std::to_string(cols));

    std::mt19937_64 rng(seed);
    switch (kind) {
    case SketchKind::Rademacher: {
        const double v = 1.0 / std::sqrt(static_cast<double>(cols));
        dense_.resize(rows, cols);
        std::uint64_t bits = 0;
        int left = 0;
        for (Index k = 0; k < dense_.size(); ++k) {
            if (left == 0) {
                bits = rng();
                left = 64;
            }
            dense_.data()[k] = (bits & 1u) ? v : -v;
            bits >>= 1;
            --left;
        }
        break;
    }
    case SketchKind::Gaussian: {
        const double s = 1.0 / std::sqrt(static_cast<double>(cols));
        std::normal_distribution<double> normal;
        dense_.resize(rows, cols);
        for (Index k = 0; k < dense_.size(); ++k)
            dense_.data()[k] = s * normal(rng);
        break;
    }
    case SketchKind::SparseEmbedding: {
        std::uniform_int_distribution<Index> column(0, cols - 1);
        bucket_.resize(static_cast<std::size_t>(rows));
        sign_.resize(static_cast<std::size_t>(rows));
        for (Index t = 0; t < rows; ++t) {
            bucket_[static_cast<std::size_t>(t)] = column(rng);
            sign_[static_cast<std::size_t>(t)] = (rng() & 1u) ? 1 : -1;
        }
        break;
    }
    case SketchKind::HadamardFJLT: {
        padded_ = next_pow2(rows);
        if (cols > padded_)
            throw ConfigError("FJLT cannot sample " + std::to_string(cols)
                              + " coordinates without replacement from "
                              + std::to_string(padded_));
        sign_.resize(static_cast<std::size_t>(rows));
        for (auto& s : sign_)
            s = (rng() & 1u) ? 1 : -1;
        // Partial Fisher-Yates: the first cols entries are a uniform sample.
        std::vector<Index> perm(static_cast<std::size_t>(padded_));
        std::iota(perm.begin(), perm.end(), Index{0});
        for (Index j = 0; j < cols; ++j) {
            std::uniform_int_distribution<Index> pick(j, padded_ - 1);
            std::swap(perm[static_cast<std::size_t>(j)],
                      perm[static_cast<std::size_t>(pick(rng))]);
        }
        sample_.assign(perm.begin(), perm.begin() + cols);
        break;
    }
    }
}

SketchOperator SketchOperator::make(SketchKind kind, Index rows, Index cols, std::uint64_t seed)
{
    return SketchOperator(kind, rows, cols, seed);
}

Eigen::MatrixXd SketchOperator::materialize() const
{
    switch (kind_) {
    case SketchKind::Rademacher:
    case SketchKind::Gaussian:
        return dense_;
    case SketchKind::SparseEmbedding: {
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(rows_, cols_);
        for (Index t = 0; t < rows_; ++t)
            R(t, bucket_[static_cast<std::size_t>(t)]) = sign_[static_cast<std::size_t>(t)];
        return R;
    }
    case SketchKind::HadamardFJLT:
        return apply_right(Eigen::MatrixXd::Identity(rows_, rows_));
    }
    return {};
}

SketchOperator make_rademacher(Index rows, Index cols, std::uint64_t seed)
{
    return SketchOperator::make(SketchKind::Rademacher, rows, cols, seed);
}

SketchOperator make_gaussian(Index rows, Index cols, std::uint64_t seed)
{
    return SketchOperator::make(SketchKind::Gaussian, rows, cols, seed);
}

SketchOperator make_sparse_embedding(Index rows, Index cols, std::uint64_t seed)
{
    return SketchOperator::make(SketchKind::SparseEmbedding, rows, cols, seed);
}

SketchOperator make_fjlt_hadamard(Index rows, Index cols, std::uint64_t seed)
{
    return SketchOperator::make(SketchKind::HadamardFJLT, rows, cols, seed);
}

} // namespace sksc
