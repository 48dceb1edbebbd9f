#ifndef SKSC_SKETCH_HPP
#define SKSC_SKETCH_HPP

#include "sksc/common.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sksc {

enum class SketchKind { Rademacher, Gaussian, SparseEmbedding, HadamardFJLT };

SketchKind parse_sketch_kind(std::string_view name);
std::string_view to_string(SketchKind kind);

/// Reporting metadata only; the sketch size is always chosen by the caller.
struct JltParams {
    double epsilon = 0.5;
    double delta = 0.1;
};

/// Smallest power of two >= n (n >= 1).
Index next_pow2(Index n);

/// In-place unnormalized Walsh-Hadamard transform; v.size() must be a power of two.
template <typename Scalar>
void fwht(Eigen::Ref<Vec<Scalar>> v)
{
    const Index n = v.size();
    for (Index h = 1; h < n; h <<= 1)
        for (Index i = 0; i < n; i += h << 1)
            for (Index j = i; j < i + h; ++j) {
                const Scalar a = v(j);
                const Scalar b = v(j + h);
                v(j) = a + b;
                v(j + h) = a - b;
            }
}

/*
 * An immutable rows x cols random matrix R used as a Johnson-Lindenstrauss
 * transform. The operator acts on row vectors: x^T (length rows) maps to
 * x^T R (length cols). Right application compresses the columns of a data
 * matrix (B = X R); left application reduces the dimension of every datum
 * (R^T X, where rows equals the ambient dimension).
 *
 *  - Rademacher:      i.i.d. +-1/sqrt(cols)
 *  - Gaussian:        i.i.d. N(0, 1/cols)
 *  - SparseEmbedding: one +-1 per row at a uniformly random column (CountSketch)
 *  - HadamardFJLT:    x -> sqrt(P/cols) * S H D pad(x), P = next_pow2(rows),
 *                     D random signs, H the orthonormal Walsh-Hadamard matrix,
 *                     S samples cols coordinates without replacement.
 *
 * Everything is a pure function of (kind, rows, cols, seed). The FJLT is
 * never materialized on the apply paths.
 */
class SketchOperator {
public:
    static SketchOperator make(SketchKind kind, Index rows, Index cols, std::uint64_t seed);

    SketchKind kind() const { return kind_; }
    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    std::uint64_t seed() const { return seed_; }
    /// Internal transform length of the FJLT (rows for the other kinds).
    Index padded_rows() const { return padded_; }

    const std::optional<JltParams>& jlt_params() const { return jlt_; }
    SketchOperator with_jlt_params(JltParams p) const
    {
        SketchOperator copy = *this;
        copy.jlt_ = p;
        return copy;
    }

    /// Dense rows x cols form. For the FJLT this runs the fast transform on the
    /// identity and exists for testing and inspection.
    Eigen::MatrixXd materialize() const;

    /// X R for X with rows() columns.
    template <typename Derived>
    Mat<typename Derived::Scalar> apply_right(const Eigen::MatrixBase<Derived>& X,
                                              int threads = 1) const;

    /// R^T X for X with rows() rows.
    template <typename Derived>
    Mat<typename Derived::Scalar> apply_left(const Eigen::MatrixBase<Derived>& X,
                                             int threads = 1) const;

    friend bool operator==(const SketchOperator& a, const SketchOperator& b)
    {
        return a.kind_ == b.kind_ && a.rows_ == b.rows_ && a.cols_ == b.cols_
            && a.seed_ == b.seed_;
    }

private:
    SketchOperator(SketchKind kind, Index rows, Index cols, std::uint64_t seed);

    // Maps x^T (length rows) to x^T R (length cols) for one vector.
    template <typename Scalar, typename In, typename Out>
    void apply_vector(const In& x, Out&& y, Vec<Scalar>& work) const;

    SketchKind kind_;
    Index rows_;
    Index cols_;
    std::uint64_t seed_;
    Index padded_;
    std::optional<JltParams> jlt_;

    Eigen::MatrixXd dense_;          // Rademacher, Gaussian
    std::vector<Index> bucket_;      // SparseEmbedding: target column of each row
    std::vector<signed char> sign_;  // SparseEmbedding, HadamardFJLT
    std::vector<Index> sample_;      // HadamardFJLT: sampled coordinates
};

SketchOperator make_rademacher(Index rows, Index cols, std::uint64_t seed);
SketchOperator make_gaussian(Index rows, Index cols, std::uint64_t seed);
SketchOperator make_sparse_embedding(Index rows, Index cols, std::uint64_t seed);
SketchOperator make_fjlt_hadamard(Index rows, Index cols, std::uint64_t seed);

/// B = X R (dictionary of sketched data).
template <typename Derived>
Mat<typename Derived::Scalar> apply_right(const Eigen::MatrixBase<Derived>& X,
                                          const SketchOperator& R, int threads = 1)
{
    return R.apply_right(X, threads);
}

/// R^T X with R.rows() equal to the number of rows of X (dimension reduction).
template <typename Derived>
Mat<typename Derived::Scalar> apply_left(const SketchOperator& R,
                                         const Eigen::MatrixBase<Derived>& X, int threads = 1)
{
    return R.apply_left(X, threads);
}

// ---------------------------------------------------------------------------

template <typename Scalar, typename In, typename Out>
void SketchOperator::apply_vector(const In& x, Out&& y, Vec<Scalar>& work) const
{
    switch (kind_) {
    case SketchKind::Rademacher:
    case SketchKind::Gaussian:
        y.noalias() = (x.transpose() * dense_.cast<Scalar>()).transpose();
        break;
    case SketchKind::SparseEmbedding:
        y.setZero();
        for (Index t = 0; t < rows_; ++t)
            y(bucket_[static_cast<std::size_t>(t)]) +=
                static_cast<Scalar>(sign_[static_cast<std::size_t>(t)]) * x(t);
        break;
    case SketchKind::HadamardFJLT: {
        work.setZero(padded_);
        for (Index t = 0; t < rows_; ++t)
            work(t) = static_cast<Scalar>(sign_[static_cast<std::size_t>(t)]) * x(t);
        fwht<Scalar>(work);
        // 1/sqrt(P) from H times sqrt(P/cols) from the sampling rescale.
        const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(cols_));
        for (Index j = 0; j < cols_; ++j)
            y(j) = scale * work(sample_[static_cast<std::size_t>(j)]);
        break;
    }
    }
}

template <typename Derived>
Mat<typename Derived::Scalar> SketchOperator::apply_right(const Eigen::MatrixBase<Derived>& X,
                                                          int threads) const
{
    using Scalar = typename Derived::Scalar;
    if (X.cols() != rows_)
        throw ConfigError("sketch apply_right: data has " + std::to_string(X.cols())
                          + " columns, operator expects " + std::to_string(rows_));
    Mat<Scalar> out(X.rows(), cols_);
    if (kind_ == SketchKind::Rademacher || kind_ == SketchKind::Gaussian) {
        parallel_for(0, X.rows(), threads, [&](Index i) {
            out.row(i).noalias() = X.row(i) * dense_.cast<Scalar>();
        });
        return out;
    }
    if (kind_ == SketchKind::SparseEmbedding) {
        out.setZero();
        for (Index t = 0; t < rows_; ++t)
            out.col(bucket_[static_cast<std::size_t>(t)]) +=
                static_cast<Scalar>(sign_[static_cast<std::size_t>(t)]) * X.col(t);
        return out;
    }
    parallel_for(0, X.rows(), threads, [&](Index i) {
        Vec<Scalar> work;
        Vec<Scalar> y(cols_);
        apply_vector<Scalar>(X.row(i).transpose(), y, work);
        out.row(i) = y.transpose();
    });
    return out;
}

template <typename Derived>
Mat<typename Derived::Scalar> SketchOperator::apply_left(const Eigen::MatrixBase<Derived>& X,
                                                         int threads) const
{
    using Scalar = typename Derived::Scalar;
    if (X.rows() != rows_)
        throw ConfigError("sketch apply_left: data has " + std::to_string(X.rows())
                          + " rows, operator expects " + std::to_string(rows_));
    Mat<Scalar> out(cols_, X.cols());
    if (kind_ == SketchKind::Rademacher || kind_ == SketchKind::Gaussian) {
        parallel_for(0, X.cols(), threads, [&](Index j) {
            out.col(j).noalias() = dense_.cast<Scalar>().transpose() * X.col(j);
        });
        return out;
    }
    parallel_for(0, X.cols(), threads, [&](Index j) {
        Vec<Scalar> work;
        apply_vector<Scalar>(X.col(j), out.col(j), work);
    });
    return out;
}

} // namespace sksc

#endif
