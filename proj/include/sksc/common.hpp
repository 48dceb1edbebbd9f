#ifndef SKSC_COMMON_HPP
#define SKSC_COMMON_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sksc {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Base of all library errors. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or incompatible dimensions supplied by the caller.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or unusable input data (parse failures, zero columns, NaNs).
class DataError : public Error {
public:
    using Error::Error;
};

/// A factorization or iterative method failed.
class NumericalError : public Error {
public:
    using Error::Error;
};

/*
 * Runs fn(i) for i in [begin, end) over at most `threads` workers. Work is
 * split into contiguous chunks and every index is handled exactly once, so
 * any fn whose effect on index i depends only on i gives scheduling
 * independent results.
 */
template <typename Fn>
void parallel_for(Index begin, Index end, int threads, Fn&& fn)
{
    const Index count = end - begin;
    if (count <= 0)
        return;
    const Index workers = std::clamp<Index>(threads, 1, count);
    if (workers == 1) {
        for (Index i = begin; i < end; ++i)
            fn(i);
        return;
    }
    const Index chunk = (count + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (Index w = 0; w < workers; ++w) {
        const Index lo = begin + w * chunk;
        const Index hi = std::min(end, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([lo, hi, &fn] {
            for (Index i = lo; i < hi; ++i)
                fn(i);
        });
    }
}

/// splitmix64 finalizer; used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace sksc

#endif
