// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "sksc/eval.hpp"
#include "sksc/pipeline.hpp"
#include "sksc/sketch.hpp"
#include "sksc/solvers.hpp"
#include "sksc/spectral.hpp"

#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace sksc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::MatrixXd gauss(Index r, Index c, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXd M(r, c);
    for (Index i = 0; i < M.size(); ++i)
        M(i) = g(rng);
    return M;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Outcome {
    bool pass;
    std::string detail;
};

// 1. End-to-end synthetic clustering.
Outcome end_to_end()
{
    double sum = 0, worst_time = 0, worst_acc = 1;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        PipelineConfig cfg;
        cfg.synth = parse_synth_spec("K=5,D=50,dim=5,per=200,noise=0.01");
        cfg.normalize = true;
        cfg.method = SolverMethod::SketchLSR;
        cfg.sketch = SketchKind::Rademacher;
        cfg.n = 100;
        cfg.lambda = 1e3;
        cfg.knn = 5;
        cfg.affinity = AffinityKind::Binary;
        cfg.K = 5;
        cfg.seed = seed;
        const auto t0 = Clock::now();
        const auto res = run_pipeline(cfg);
        worst_time = std::max(worst_time, seconds(t0));
        const double acc = res.report.accuracy.value_or(0.0);
        sum += acc;
        worst_acc = std::min(worst_acc, acc);
    }
    const double mean = sum / 10;
    std::ostringstream os;
    os << "mean accuracy " << mean << " (min " << worst_acc << "), slowest run " << worst_time
       << " s";
    return {mean >= 0.95 && worst_time < 30.0, os.str()};
}

// 2. Solver-oracle equivalence.
Outcome solver_oracles()
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<Index> dim(4, 30);
    double lsr_worst = 0, ssc_worst = 0, lrr_worst = 0;
    for (int t = 0; t < 20; ++t) {
        const Index D = dim(rng), N = dim(rng);
        const Index n = std::uniform_int_distribution<Index>(2, 30)(rng);
        const double lambda = std::pow(10.0, std::uniform_real_distribution<double>(-1, 2)(rng));
        const Eigen::MatrixXd X = gauss(D, N, rng), B = gauss(D, n, rng);
        const auto A = solve_sketch_lsr<double>(X, B, lambda).values;
        const auto ref = oracle::ridge(X, B, lambda);
        lsr_worst = std::max(lsr_worst, (A - ref).norm() / ref.norm());
    }
    for (int t = 0; t < 10; ++t) {
        const Index D = std::uniform_int_distribution<Index>(4, 12)(rng);
        const Index N = std::uniform_int_distribution<Index>(5, 30)(rng);
        const Index n = std::uniform_int_distribution<Index>(3, 15)(rng);
        const double lambda = std::uniform_real_distribution<double>(2, 20)(rng);
        const Eigen::MatrixXd X = gauss(D, N, rng), B = gauss(D, n, rng);

        auto scfg = SolverConfig::ssc_defaults(lambda);
        scfg.tol = 1e-12;
        scfg.max_iter = 200000;
        const auto A = solve_sketch_ssc<double>(X, B, scfg).values;
        for (Index j = 0; j < N; ++j) {
            const Eigen::VectorXd x = X.col(j);
            const double got = oracle::l1_objective(x, B, A.col(j), lambda);
            const double want = oracle::l1_objective(x, B, oracle::lasso(x, B, lambda), lambda);
            ssc_worst = std::max(ssc_worst, rel(got, want));
        }

        auto lcfg = SolverConfig::lrr_defaults(lambda);
        lcfg.tol = 1e-9;
        lcfg.max_iter = 2000;
        const auto L = solve_sketch_lrr<double>(X, B, lcfg).values;
        const double got = oracle::nuclear_objective(X, B, L, lambda);
        const double want =
            oracle::nuclear_objective(X, B, oracle::nuclear_regression(X, B, lambda), lambda);
        lrr_worst = std::max(lrr_worst, rel(got, want));
    }
    std::ostringstream os;
    os << "lsr rel err " << lsr_worst << ", ssc rel obj gap " << ssc_worst
       << ", lrr rel obj gap " << lrr_worst;
    return {lsr_worst <= 1e-10 && ssc_worst <= 1e-6 && lrr_worst <= 1e-4, os.str()};
}

// 3. Proximal correctness.
Outcome proximal()
{
    int st_mismatch = 0;
    for (int i = 0; i < 10000; ++i) {
        const double z = -5.0 + 10.0 * i / 9999.0;
        for (double sigma : {0.0, 0.5, 1.7}) {
            const double want = z > 0 ? std::max(z - sigma, 0.0) : -std::max(-z - sigma, 0.0);
            st_mismatch += soft_threshold(z, sigma) != want;
        }
    }

    std::mt19937_64 rng(3);
    const Eigen::MatrixXd M = gauss(5, 7, rng);
    const double tau = 0.8;
    const Eigen::MatrixXd P = svt(M, tau);
    auto f = [&](const Eigen::MatrixXd& Y) {
        return tau * oracle::nuclear(Y) + 0.5 * (Y - M).squaredNorm();
    };
    const double best = f(P);
    int beaten = 0;
    for (int t = 0; t < 1000; ++t) {
        const Eigen::MatrixXd E = gauss(5, 7, rng) * std::pow(10.0, -1.0 - (t % 4));
        beaten += f(P + E) < best;
    }

    int diag_mismatch = 0;
    std::vector<std::pair<Eigen::VectorXd, double>> cases;
    cases.emplace_back(Eigen::Vector2d(3, 1), 2.0);
    cases.emplace_back(Eigen::Vector3d(4, 2, 0.5), 1.0);
    cases.emplace_back(Eigen::Vector4d(8, 4, 2, 1), 0.0);
    cases.emplace_back(Eigen::Vector3d(1, 1, 1), 3.0);
    for (const auto& [d, t] : cases) {
        const Eigen::MatrixXd Dm = d.asDiagonal();
        const Eigen::VectorXd shrunk = (d.array() - t).max(0.0).matrix();
        const Eigen::MatrixXd want = shrunk.asDiagonal();
        diag_mismatch += !(svt(Dm, t) == want);
    }
    std::ostringstream os;
    os << st_mismatch << " soft-threshold mismatches on 3x10^4 grid points, " << beaten
       << "/1000 perturbations beat svt, " << diag_mismatch << " diagonal mismatches";
    return {st_mismatch == 0 && beaten == 0 && diag_mismatch == 0, os.str()};
}

// 4. Range preservation battery.
Outcome range_battery()
{
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        const Eigen::MatrixXd X = gauss(40, 10, rng) * gauss(10, 300, rng);
        const auto B = make_rademacher(300, 20, mix_seed(seed, 7)).apply_right(X);
        ok += check_range_preservation(X, B, 1e-8);
    }
    return {ok == 100, std::to_string(ok) + "/100 seeds preserve the range"};
}

// 5. Pairwise-distance preservation of exact-fit representations.
Outcome distance_battery()
{
    const Index rho = 24, D = 60, N = 300, n = 4 * rho;
    double worst = 1.0, lo = 1e9, hi = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(100 + seed);
        const Eigen::MatrixXd X = gauss(D, rho, rng) * gauss(rho, N, rng);
        const auto B = make_rademacher(N, n, mix_seed(seed, 5)).apply_right(X);
        const auto Z = min_norm_representations(X, X);
        const auto A = min_norm_representations(B, X);
        worst = std::min(worst, check_distance_preservation(Z, A, 0.5, 2.0));
        for (Index i = 0; i < N; i += 7)
            for (Index j = i + 1; j < N; j += 5) {
                const double r = (A.col(i) - A.col(j)).norm() / (Z.col(i) - Z.col(j)).norm();
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
    }
    std::ostringstream os;
    os << "worst in-band fraction " << worst << " (sampled ratios in [" << lo << ", " << hi
       << "])";
    return {worst == 1.0, os.str()};
}

// 6. Spectral exactness on block graphs.
Outcome spectral_blocks()
{
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> nb(1, 6);
    int ok_mult = 0, ok_acc = 0;
    for (int t = 0; t < 50; ++t) {
        const auto g = oracle::random_block_graph(rng, nb(rng), 2, 20);
        const Index N = g.W.rows();
        // Shuffle nodes so blocks are interleaved.
        std::vector<int> perm(static_cast<std::size_t>(N));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::MatrixXd W(N, N);
        std::vector<int> truth(static_cast<std::size_t>(N));
        for (Index i = 0; i < N; ++i) {
            truth[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
                g.labels[static_cast<std::size_t>(i)];
            for (Index j = 0; j < N; ++j)
                W(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = g.W(i, j);
        }
        oracle::UnionFind uf(static_cast<int>(N));
        for (Index i = 0; i < N; ++i)
            for (Index j = 0; j < i; ++j)
                if (W(i, j) > 0)
                    uf.unite(static_cast<int>(i), static_cast<int>(j));
        const int comps = uf.components();

        AffinityGraph graph;
        graph.weights = W.sparseView();
        const auto e = trailing_eigenvectors(laplacian(graph), std::min<Index>(N, comps + 1));
        const Index zeros = (e.eigenvalues.array().abs() <= 1e-9).count();
        ok_mult += zeros == comps;

        const auto a = spectral_cluster(graph, comps, static_cast<std::uint64_t>(t));
        ok_acc += clustering_accuracy(a, truth) == 1.0;
    }
    std::ostringstream os;
    os << ok_mult << "/50 multiplicity matches, " << ok_acc << "/50 exact recoveries";
    return {ok_mult == 50 && ok_acc == 50, os.str()};
}

// 7. Hungarian accuracy against brute force.
Outcome accuracy_metric()
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> kdist(1, 6), ndist(1, 60);
    int ok = 0;
    for (int t = 0; t < 100; ++t) {
        const int K = kdist(rng), n = ndist(rng);
        std::uniform_int_distribution<int> lab(0, K - 1);
        std::vector<int> pred(static_cast<std::size_t>(n)), truth(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            pred[static_cast<std::size_t>(i)] = lab(rng);
            truth[static_cast<std::size_t>(i)] = lab(rng);
        }
        ok += clustering_accuracy(pred, truth) == oracle::brute_accuracy(pred, truth);
    }
    return {ok == 100, std::to_string(ok) + "/100 instances agree"};
}

// 8. Sketch-LSR time is linear in N.
Outcome scaling()
{
    auto median_time = [](Index N) {
        std::vector<double> times;
        for (int trial = 0; trial < 5; ++trial) {
            std::mt19937_64 rng(static_cast<std::uint64_t>(N + trial));
            const Eigen::MatrixXd X = gauss(100, N, rng);
            const auto t0 = Clock::now();
            const auto B = make_rademacher(N, 100, static_cast<std::uint64_t>(trial)).apply_right(X);
            const auto A = solve_sketch_lsr<double>(X, B, 1e3);
            times.push_back(seconds(t0));
            if (!A.values.allFinite())
                times.back() = 1e9;
        }
        std::sort(times.begin(), times.end());
        return times[2];
    };
    median_time(2000); // warm-up
    const double t5 = median_time(5000), t10 = median_time(10000);
    std::ostringstream os;
    os << "median " << t5 << " s at N=5000, " << t10 << " s at N=10000, ratio " << t10 / t5;
    return {t10 / t5 < 3.0, os.str()};
}

// 9. Representation-error bounds.
Outcome bounds()
{
    const Index D = 20, N = 100, n = 12, r = n / 4;
    const double eps = 0.5, lambda = 10;
    Index lsr_v = 0, lsr_total = 0, ssc_v = 0, ssc_total = 0, lrr_v = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto model = random_subspace_model(D, {3, 2}, 0.0, false, mix_seed(seed, 1));
        auto data = normalize_columns(generate_union_of_subspaces(model, {60, 40}, mix_seed(seed, 2)));
        const Eigen::MatrixXd& X = data.values;
        const auto B = make_rademacher(N, n, mix_seed(seed, 3)).apply_right(X);

        const auto lsr = solve_sketch_lsr<double>(X, B, lambda);
        for (const auto& c : theorem1_bound(X, B, lsr.values, r, lambda, eps)) {
            lsr_v += !c.holds;
            ++lsr_total;
        }
        const auto ssc = solve_sketch_ssc<double>(X, B, SolverConfig::ssc_defaults(lambda));
        for (const auto& c : corollary1_bound(X, B, ssc.values, r, lambda, eps)) {
            ssc_v += !c.holds;
            ++ssc_total;
        }
        const auto lrr = solve_sketch_lrr<double>(X, B, SolverConfig::lrr_defaults(lambda));
        lrr_v += !corollary2_bound(X, B, lrr.values, r, lambda, eps).holds;
    }
    const double r1 = static_cast<double>(lsr_v) / static_cast<double>(lsr_total);
    const double r2 = static_cast<double>(ssc_v) / static_cast<double>(ssc_total);
    const double r3 = static_cast<double>(lrr_v) / 50.0;
    std::ostringstream os;
    os << "violation rates: lsr " << r1 << ", ssc " << r2 << ", lrr " << r3;
    return {r1 < 0.1 && r2 < 0.1 && r3 < 0.1, os.str()};
}

// 10. Determinism, including parallel execution.
Outcome determinism()
{
    int ok = 0, total = 0;
    for (auto method : {SolverMethod::SketchLSR, SolverMethod::SketchSSC, SolverMethod::SketchLRR}) {
        PipelineConfig cfg;
        cfg.synth = parse_synth_spec("K=4,D=30,dim=3,per=150,noise=0.01");
        cfg.normalize = true;
        cfg.method = method;
        cfg.lambda = method == SolverMethod::SketchLSR ? 1e3 : 50;
        cfg.n = 40;
        cfg.K = 4;
        cfg.seed = 11;
        cfg.d = method == SolverMethod::SketchLRR ? std::optional<Index>(20) : std::nullopt;
        const auto base = run_pipeline(cfg).assignment.labels;
        const auto again = run_pipeline(cfg).assignment.labels;
        cfg.threads = 4;
        const auto par = run_pipeline(cfg).assignment.labels;
        ok += (base == again) + (base == par);
        total += 2;
    }
    PipelineConfig cfg;
    cfg.synth = parse_synth_spec("K=3,D=20,dim=3,per=50,noise=0.01");
    cfg.K = 3;
    cfg.normalize = true;
    const auto serial = run_sweep(cfg, {10, 20}, {1, 2, 3}, 1);
    const auto pooled = run_sweep(cfg, {10, 20}, {1, 2, 3}, 4);
    bool same = serial.size() == pooled.size();
    for (std::size_t i = 0; same && i < serial.size(); ++i)
        same = serial[i].n == pooled[i].n && serial[i].seed == pooled[i].seed
            && serial[i].accuracy == pooled[i].accuracy;
    ok += same;
    ++total;
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " repeat comparisons identical"};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 end-to-end synthetic clustering", end_to_end},
        {"2 solver-oracle equivalence", solver_oracles},
        {"3 proximal correctness", proximal},
        {"4 range preservation battery", range_battery},
        {"5 distance preservation battery", distance_battery},
        {"6 spectral exactness", spectral_blocks},
        {"7 accuracy metric", accuracy_metric},
        {"8 scaling sanity", scaling},
        {"9 bound soft checks", bounds},
        {"10 determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s criterion %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(),
                    o.detail.c_str(), seconds(t0));
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
