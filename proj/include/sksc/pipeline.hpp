#ifndef SKSC_PIPELINE_HPP
#define SKSC_PIPELINE_HPP

#include "sksc/data.hpp"
#include "sksc/graph.hpp"
#include "sksc/io.hpp"
#include "sksc/serialize.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sksc {

/// Synthetic union-of-subspaces input: K subspaces of dimension `dim` in R^D,
/// `per_cluster` points each.
struct SynthSpec {
    Index K = 5;
    Index D = 50;
    Index dim = 5;
    Index per_cluster = 200;
    double noise_std = 0.01;
    bool affine = false;
    std::optional<std::uint64_t> seed; // defaults to a sub-seed of the run seed

    friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

/// Parses "K=5,D=50,dim=5,per=200,noise=0.01[,affine=1][,seed=7]".
SynthSpec parse_synth_spec(const std::string& text);
std::string to_string(const SynthSpec& s);

struct PipelineConfig {
    std::optional<std::string> input;
    std::optional<MatrixFormat> input_format; // inferred from the extension if absent
    bool input_labels = false;                // CSV input carries a trailing label column
    std::optional<SynthSpec> synth;

    SolverMethod method = SolverMethod::SketchLSR;
    Index n = 100;
    std::optional<Index> d; // enables the doubly sketched path
    SketchKind sketch = SketchKind::Rademacher;
    SketchKind dim_sketch = SketchKind::Rademacher;

    double lambda = 1e3;
    std::optional<double> nu0; // method defaults apply when unset
    std::optional<double> nu_max;
    std::optional<double> p;
    double tol = 1e-6;
    int max_iter = 500;

    Index knn = 5;
    AffinityKind affinity = AffinityKind::Binary;
    std::optional<double> sigma; // heat kernel; unset means median k-NN distance
    Index K = 5;
    int restarts = 10;
    Index dense_cutoff = 2000;

    std::uint64_t seed = 1;
    bool normalize = false;
    std::string output_dir;  // artifacts are written only when non-empty
    int threads = 1;

    /// Checks everything that does not need the data. Throws ConfigError.
    void validate() const;

    /// Solver settings with method-specific defaults filled in.
    SolverConfig solver_config() const;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

void to_json(json& j, const SynthSpec& s);
void from_json(const json& j, SynthSpec& s);
void to_json(json& j, const PipelineConfig& c);
void from_json(const json& j, PipelineConfig& c);

/// Seeds used by one run; all derived from PipelineConfig::seed.
struct RunSeeds {
    std::uint64_t sketch;     // R
    std::uint64_t dim_sketch; // R-check, seed ^ 1
    std::uint64_t data;
    std::uint64_t kmeans;
};
RunSeeds derive_seeds(const PipelineConfig& cfg);

/// Stable hex id of the result-affecting part of a config.
std::string run_id(const PipelineConfig& cfg);

struct PipelineResult {
    std::string run_id;
    EvalReport report;
    ClusterAssignment assignment;
    SolveDiagnostics diagnostics;
    json report_json;
};

/// Loads or synthesizes the data described by cfg (after normalization).
DataMatrix load_input(const PipelineConfig& cfg);

/*
 * Sketch-and-solve followed by k-NN spectral clustering:
 *   [normalize] -> [Xc = Rc^T X, if d is set] -> B = Xc R -> solve for A
 *   -> k-NN affinity on the columns of A -> spectral clustering -> metrics.
 * Writes <run_id>_assign.csv and <run_id>_report.json into cfg.output_dir
 * when it is set. Errors are rethrown with the failing stage named.
 */
PipelineResult run_pipeline(const PipelineConfig& cfg);
PipelineResult run_pipeline(const PipelineConfig& cfg, const DataMatrix& data);

struct SweepRow {
    Index n = 0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    std::optional<double> accuracy;
    double t_sketch = 0, t_solve = 0, t_graph = 0, t_spectral = 0;
};

/// One run per (n, seed), sorted by (n, seed). Failures become rows with a
/// non-"ok" status. `workers` runs execute concurrently.
std::vector<SweepRow> run_sweep(const PipelineConfig& cfg, const std::vector<Index>& n_values,
                                const std::vector<std::uint64_t>& seeds, int workers = 1);

/// Header: n,seed,accuracy,t_sketch,t_solve,t_graph,t_spectral,status
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

} // namespace sksc

#endif
