#include "sksc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

namespace sksc {

AffinityKind parse_affinity_kind(std::string_view name)
{
    if (name == "binary")
        return AffinityKind::Binary;
    if (name == "heat")
        return AffinityKind::HeatKernel;
    throw ConfigError("unknown affinity '" + std::string(name) + "' (expected binary or heat)");
}

std::string_view to_string(AffinityKind kind)
{
    return kind == AffinityKind::Binary ? "binary" : "heat";
}

NeighborSets knn_search(const Eigen::MatrixXd& A, Index k, int threads)
{
    const Index N = A.cols();
    if (k < 1 || k >= N)
        throw ConfigError("knn: need 1 <= k <= N-1, got k=" + std::to_string(k) + " with N="
                          + std::to_string(N));
    if (!A.allFinite())
        throw DataError("knn: representation matrix has non-finite entries");

    const Eigen::VectorXd sq = A.colwise().squaredNorm().transpose();
    NeighborSets out;
    out.indices.resize(static_cast<std::size_t>(N));
    out.distances.resize(static_cast<std::size_t>(N));

    constexpr Index block = 256;
    const Index blocks = (N + block - 1) / block;
    parallel_for(0, blocks, threads, [&](Index b) {
        const Index i0 = b * block;
        const Index w = std::min(block, N - i0);
        const Eigen::MatrixXd G = A.middleCols(i0, w).transpose() * A;
        std::vector<Index> cand(static_cast<std::size_t>(N - 1));
        std::vector<double> d2(static_cast<std::size_t>(N));
        for (Index q = 0; q < w; ++q) {
            const Index i = i0 + q;
            for (Index j = 0; j < N; ++j)
                d2[static_cast<std::size_t>(j)] = std::max(0.0, sq(i) + sq(j) - 2.0 * G(q, j));
            Index c = 0;
            for (Index j = 0; j < N; ++j)
                if (j != i)
                    cand[static_cast<std::size_t>(c++)] = j;
            auto closer = [&](Index a, Index bb) {
                const double da = d2[static_cast<std::size_t>(a)];
                const double db = d2[static_cast<std::size_t>(bb)];
                return da < db || (da == db && a < bb);
            };
            std::partial_sort(cand.begin(), cand.begin() + k, cand.end(), closer);
            auto& idx = out.indices[static_cast<std::size_t>(i)];
            auto& dist = out.distances[static_cast<std::size_t>(i)];
            idx.assign(cand.begin(), cand.begin() + k);
            dist.resize(static_cast<std::size_t>(k));
            for (Index t = 0; t < k; ++t)
                dist[static_cast<std::size_t>(t)] =
                    std::sqrt(d2[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])]);
        }
    });
    return out;
}

std::vector<std::vector<Index>> knn_sets(const Eigen::MatrixXd& A, Index k, int threads)
{
    return knn_search(A, k, threads).indices;
}

namespace {

double median_distance(const NeighborSets& nn)
{
    std::vector<double> all;
    for (const auto& d : nn.distances)
        all.insert(all.end(), d.begin(), d.end());
    if (all.empty())
        return 1.0;
    std::sort(all.begin(), all.end());
    const std::size_t m = all.size() / 2;
    double med = all.size() % 2 ? all[m] : 0.5 * (all[m - 1] + all[m]);
    if (med > 0)
        return med;
    // More than half the neighbour distances vanish: fall back to the smallest
    // positive one so distinct points still get a finite bandwidth.
    const auto pos = std::upper_bound(all.begin(), all.end(), 0.0);
    return pos != all.end() ? *pos : 1.0;
}

} // namespace

AffinityGraph affinity_from_neighbors(const NeighborSets& nn, AffinityKind kind,
                                      std::optional<double> sigma)
{
    const auto N = static_cast<Index>(nn.indices.size());
    AffinityGraph W;
    W.kind = kind;
    W.k = N > 0 ? static_cast<Index>(nn.indices.front().size()) : 0;
    if (kind == AffinityKind::HeatKernel) {
        if (sigma && !(*sigma > 0))
            throw ConfigError("heat kernel sigma must be positive");
        W.sigma = sigma ? *sigma : median_distance(nn);
    }

    // One record per directed neighbour relation, keyed by the unordered pair.
    // Records are generated in ascending query order and stable-sorted, so the
    // distance kept for a pair does not depend on anything but the inputs.
    std::vector<std::tuple<Index, Index, double>> pairs;
    pairs.reserve(static_cast<std::size_t>(N * W.k));
    for (Index i = 0; i < N; ++i) {
        const auto& idx = nn.indices[static_cast<std::size_t>(i)];
        const auto& dist = nn.distances[static_cast<std::size_t>(i)];
        for (std::size_t t = 0; t < idx.size(); ++t)
            pairs.emplace_back(std::min(i, idx[t]), std::max(i, idx[t]), dist[t]);
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    pairs.erase(std::unique(pairs.begin(), pairs.end(),
                            [](const auto& a, const auto& b) {
                                return std::get<0>(a) == std::get<0>(b)
                                    && std::get<1>(a) == std::get<1>(b);
                            }),
                pairs.end());

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * pairs.size());
    for (const auto& [i, j, d] : pairs) {
        const double w = kind == AffinityKind::Binary ? 1.0
                                                      : std::exp(-(d * d) / (W.sigma * W.sigma));
        trip.emplace_back(i, j, w);
        trip.emplace_back(j, i, w);
    }
    W.weights.resize(N, N);
    W.weights.setFromTriplets(trip.begin(), trip.end());
    W.weights.makeCompressed();
    return W;
}

AffinityGraph build_affinity_binary(const Eigen::MatrixXd& A, Index k, int threads)
{
    return affinity_from_neighbors(knn_search(A, k, threads), AffinityKind::Binary);
}

AffinityGraph build_affinity_heat(const Eigen::MatrixXd& A, Index k, std::optional<double> sigma,
                                  int threads)
{
    if (sigma && !(*sigma > 0))
        throw ConfigError("heat kernel sigma must be positive");
    return affinity_from_neighbors(knn_search(A, k, threads), AffinityKind::HeatKernel, sigma);
}

void write_graph_mtx(const AffinityGraph& W, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    Index lower = 0;
    for (Index c = 0; c < W.weights.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(W.weights, c); it; ++it)
            if (it.row() > it.col())
                ++lower;
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << W.size() << ' ' << W.size() << ' ' << lower << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Index c = 0; c < W.weights.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(W.weights, c); it; ++it)
            if (it.row() > it.col())
                out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

void write_edge_list(const AffinityGraph& W, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << "i,j,w\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    const Eigen::SparseMatrix<double, Eigen::RowMajor> rows = W.weights;
    for (Index i = 0; i < rows.outerSize(); ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, i); it; ++it)
            if (it.col() > i)
                out << i << ',' << it.col() << ',' << it.value() << '\n';
}

} // namespace sksc
