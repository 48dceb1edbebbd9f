#ifndef SKSC_EVAL_HPP
#define SKSC_EVAL_HPP

#include "sksc/spectral.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sksc {

// ---------------------------------------------------------------------------
// Clustering accuracy

/// Maximum-weight perfect matching on a square matrix (Hungarian method).
/// Returns assignment[row] = col.
std::vector<Index> max_weight_matching(const Eigen::MatrixXd& weights);

/// Fraction of points whose predicted cluster matches the truth under the
/// best one-to-one relabelling of predicted ids.
double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth);
double clustering_accuracy(const ClusterAssignment& pred, const std::vector<int>& truth);

// ---------------------------------------------------------------------------
// Sketch preservation checks

/// Number of singular values above rel_tol * sigma_max (0 for a zero matrix).
Index numerical_rank(const Eigen::MatrixXd& M, double rel_tol = 1e-8);

/// True iff rank(X) = rank(B) = rank([X | B]) at threshold rank_tol * sigma_max.
bool check_range_preservation(const Eigen::MatrixXd& X, const Eigen::MatrixXd& B,
                              double rank_tol = 1e-8);

/// Minimum-norm exact-fit coefficients dict^+ X.
Eigen::MatrixXd min_norm_representations(const Eigen::MatrixXd& dict, const Eigen::MatrixXd& X);

/// Fraction of column pairs i < j with ||a_i - a_j|| / ||z_i - z_j|| in [lo, hi].
/// Pairs whose z-distance is at most 1e-12 are skipped; returns 1 if none remain.
double check_distance_preservation(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& A, double lo,
                                   double hi);

// ---------------------------------------------------------------------------
// Representation-error bounds for sketched regression on noise-free,
// unit-norm data of rank rho, with r < rho and sketch size n:
//
//   LSR, per datum:  lambda (1 + c s) + 1/sqrt(1-eps)
//   SSC, per datum:  lambda (1 + c s) + sqrt(n/(1-eps))
//   LRR, whole set:  lambda (sqrt(N) + c s) + sqrt(n/(1-eps))
//
// with c = sqrt((1+eps)/(1-eps)) sqrt(rho - r) and s = sigma_{r+1}(X)^2.

struct BoundParams {
    Index rho = 0;
    Index r = 0;
    Index n = 0;
    Index N = 1;
    double epsilon = 0.5;
    double lambda = 1.0;
    double sigma_r1 = 0.0;
};

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    BoundParams params;
};

double theorem1_rhs(const BoundParams& p);
double corollary1_rhs(const BoundParams& p);
double corollary2_rhs(const BoundParams& p);

/// Fills rho (numerical rank) and sigma_{r+1} from X. r >= rho is a ConfigError.
BoundParams bound_params(const Eigen::MatrixXd& X, Index r, Index n, double lambda,
                         double epsilon, double rank_tol = 1e-10);

/// Per-column checks with lhs = ||x_j - B a_j||, B = X R.
std::vector<BoundCheck> theorem1_bound(const Eigen::MatrixXd& X, const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& A_hat, Index r, double lambda,
                                       double epsilon);
std::vector<BoundCheck> corollary1_bound(const Eigen::MatrixXd& X, const Eigen::MatrixXd& B,
                                         const Eigen::MatrixXd& A_hat, Index r, double lambda,
                                         double epsilon);
/// Single check with lhs = ||X - B A||_F.
BoundCheck corollary2_bound(const Eigen::MatrixXd& X, const Eigen::MatrixXd& B,
                            const Eigen::MatrixXd& A_hat, Index r, double lambda, double epsilon);

// ---------------------------------------------------------------------------
// Timing and reporting

/// Accumulates wall-clock seconds per named stage.
class StageTimer {
public:
    class Scope {
    public:
        Scope(StageTimer& timer, std::string stage)
            : timer_(timer), stage_(std::move(stage)), t0_(std::chrono::steady_clock::now())
        {
        }
        Scope(const Scope&) = delete;
        Scope& operator=(const Scope&) = delete;
        ~Scope()
        {
            timer_.add(stage_, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
                                   .count());
        }

    private:
        StageTimer& timer_;
        std::string stage_;
        std::chrono::steady_clock::time_point t0_;
    };

    Scope scope(std::string stage) { return Scope(*this, std::move(stage)); }
    void add(const std::string& stage, double seconds) { stages_[stage] += std::max(0.0, seconds); }
    double total() const;
    const std::map<std::string, double>& stages() const { return stages_; }

private:
    std::map<std::string, double> stages_;
};

struct EvalReport {
    std::optional<double> accuracy;
    std::map<std::string, double> wall_time_s; // sketch, solve, graph, spectral
    Index n = 0;
    std::optional<Index> d;
    Index k = 0;
    double lambda = 0.0;
    std::vector<std::uint64_t> seeds;
};

} // namespace sksc

#endif
