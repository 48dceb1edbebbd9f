#include "sksc/pipeline.hpp"

#include "sksc/sketch.hpp"
#include "sksc/solvers.hpp"
#include "sksc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace sksc {

// ---------------------------------------------------------------------------
// Synthetic input spec

SynthSpec parse_synth_spec(const std::string& text)
{
    SynthSpec s;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("synth spec: expected key=value, got '" + item + "'");
        const auto key = item.substr(0, eq);
        const auto val = item.substr(eq + 1);
        try {
            if (key == "K")
                s.K = std::stol(val);
            else if (key == "D")
                s.D = std::stol(val);
            else if (key == "dim" || key == "d")
                s.dim = std::stol(val);
            else if (key == "per" || key == "per_cluster")
                s.per_cluster = std::stol(val);
            else if (key == "noise")
                s.noise_std = std::stod(val);
            else if (key == "affine")
                s.affine = val == "1" || val == "true";
            else if (key == "seed")
                s.seed = std::stoull(val);
            else
                throw ConfigError("synth spec: unknown key '" + key + "'");
        } catch (const std::logic_error&) {
            throw ConfigError("synth spec: bad value for '" + key + "': '" + val + "'");
        }
    }
    if (s.K < 1 || s.D < 1 || s.dim < 0 || s.dim > s.D || s.per_cluster < 1 || !(s.noise_std >= 0))
        throw ConfigError("synth spec: invalid sizes in '" + text + "'");
    return s;
}

std::string to_string(const SynthSpec& s)
{
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "K=" << s.K << ",D=" << s.D << ",dim=" << s.dim << ",per=" << s.per_cluster
        << ",noise=" << s.noise_std << ",affine=" << (s.affine ? 1 : 0);
    if (s.seed)
        out << ",seed=" << *s.seed;
    return out.str();
}

// ---------------------------------------------------------------------------
// Config

void PipelineConfig::validate() const
{
    if (input.has_value() == synth.has_value())
        throw ConfigError("exactly one of input and synth must be given");
    if (n < 1)
        throw ConfigError("n must be at least 1");
    if (d && *d < 1)
        throw ConfigError("d must be at least 1");
    if (knn < 1)
        throw ConfigError("knn must be at least 1");
    if (K < 1)
        throw ConfigError("K must be at least 1");
    if (restarts < 1)
        throw ConfigError("restarts must be at least 1");
    if (threads < 1)
        throw ConfigError("threads must be at least 1");
    if (sigma && !(*sigma > 0))
        throw ConfigError("sigma must be positive");
    solver_config().validate();
    if (synth) {
        if (d && *d > synth->D)
            throw ConfigError("d=" + std::to_string(*d) + " exceeds the data dimension D="
                              + std::to_string(synth->D));
        const Index N = synth->K * synth->per_cluster;
        if (knn > N - 1)
            throw ConfigError("knn must be below the number of data points");
        if (K > N)
            throw ConfigError("K exceeds the number of data points");
    }
}

SolverConfig PipelineConfig::solver_config() const
{
    SolverConfig c = method == SolverMethod::SketchLRR ? SolverConfig::lrr_defaults(lambda)
                                                       : SolverConfig::ssc_defaults(lambda);
    if (nu0)
        c.nu0 = *nu0;
    if (nu_max)
        c.nu_max = *nu_max;
    if (p)
        c.p = *p;
    c.tol = tol;
    c.max_iter = max_iter;
    c.threads = threads;
    return c;
}

void to_json(json& j, const SynthSpec& s)
{
    j = json{{"K", s.K},          {"D", s.D},
             {"dim", s.dim},      {"per_cluster", s.per_cluster},
             {"noise_std", s.noise_std}, {"affine", s.affine}};
    if (s.seed)
        j["seed"] = *s.seed;
}

void from_json(const json& j, SynthSpec& s)
{
    const SynthSpec d;
    s.K = j.value("K", d.K);
    s.D = j.value("D", d.D);
    s.dim = j.value("dim", d.dim);
    s.per_cluster = j.value("per_cluster", d.per_cluster);
    s.noise_std = j.value("noise_std", d.noise_std);
    s.affine = j.value("affine", d.affine);
    s.seed.reset();
    if (j.contains("seed") && !j["seed"].is_null())
        s.seed = j["seed"].get<std::uint64_t>();
}

namespace {

template <typename T>
void put_opt(json& j, const char* key, const std::optional<T>& v)
{
    if (v)
        j[key] = *v;
}

template <typename T>
void get_opt(const json& j, const char* key, std::optional<T>& v)
{
    if (j.contains(key) && !j[key].is_null())
        v = j[key].get<T>();
    else
        v.reset();
}

} // namespace

void to_json(json& j, const PipelineConfig& c)
{
    j = json{{"method", to_string(c.method)},
             {"n", c.n},
             {"sketch", to_string(c.sketch)},
             {"dim_sketch", to_string(c.dim_sketch)},
             {"lambda", c.lambda},
             {"tol", c.tol},
             {"max_iter", c.max_iter},
             {"knn", c.knn},
             {"affinity", to_string(c.affinity)},
             {"K", c.K},
             {"restarts", c.restarts},
             {"dense_cutoff", c.dense_cutoff},
             {"seed", c.seed},
             {"normalize", c.normalize},
             {"output_dir", c.output_dir},
             {"threads", c.threads},
             {"input_labels", c.input_labels}};
    put_opt(j, "input", c.input);
    if (c.input_format)
        j["input_format"] = to_string(*c.input_format);
    if (c.synth)
        j["synth"] = *c.synth;
    put_opt(j, "d", c.d);
    put_opt(j, "nu0", c.nu0);
    put_opt(j, "nu_max", c.nu_max);
    put_opt(j, "p", c.p);
    put_opt(j, "sigma", c.sigma);
}

void from_json(const json& j, PipelineConfig& c)
{
    const PipelineConfig d;
    try {
        c.method = parse_solver_method(j.value("method", std::string(to_string(d.method))));
        c.n = j.value("n", d.n);
        c.sketch = parse_sketch_kind(j.value("sketch", std::string(to_string(d.sketch))));
        c.dim_sketch =
            parse_sketch_kind(j.value("dim_sketch", std::string(to_string(d.dim_sketch))));
        c.lambda = j.value("lambda", d.lambda);
        c.tol = j.value("tol", d.tol);
        c.max_iter = j.value("max_iter", d.max_iter);
        c.knn = j.value("knn", d.knn);
        c.affinity = parse_affinity_kind(j.value("affinity", std::string(to_string(d.affinity))));
        c.K = j.value("K", d.K);
        c.restarts = j.value("restarts", d.restarts);
        c.dense_cutoff = j.value("dense_cutoff", d.dense_cutoff);
        c.seed = j.value("seed", d.seed);
        c.normalize = j.value("normalize", d.normalize);
        c.output_dir = j.value("output_dir", d.output_dir);
        c.threads = j.value("threads", d.threads);
        c.input_labels = j.value("input_labels", d.input_labels);
        get_opt(j, "input", c.input);
        c.input_format.reset();
        if (j.contains("input_format") && !j["input_format"].is_null())
            c.input_format = parse_matrix_format(j["input_format"].get<std::string>());
        c.synth.reset();
        if (j.contains("synth") && !j["synth"].is_null())
            c.synth = j["synth"].get<SynthSpec>();
        get_opt(j, "d", c.d);
        get_opt(j, "nu0", c.nu0);
        get_opt(j, "nu_max", c.nu_max);
        get_opt(j, "p", c.p);
        get_opt(j, "sigma", c.sigma);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunSeeds derive_seeds(const PipelineConfig& cfg)
{
    RunSeeds s;
    s.sketch = cfg.seed;
    s.dim_sketch = cfg.seed ^ 1u;
    s.data = cfg.synth && cfg.synth->seed ? *cfg.synth->seed : mix_seed(cfg.seed, 2);
    s.kmeans = mix_seed(cfg.seed, 3);
    return s;
}

std::string run_id(const PipelineConfig& cfg)
{
    json j = cfg;
    j.erase("output_dir");
    j.erase("threads");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

std::string annotate(const char* stage, const PipelineConfig& cfg, const char* what)
{
    return std::string("stage '") + stage + "': " + what + " [config: " + json(cfg).dump() + "]";
}

template <typename Fn>
auto stage(const char* name, const PipelineConfig& cfg, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(annotate(name, cfg, e.what()));
    } catch (const DataError& e) {
        throw DataError(annotate(name, cfg, e.what()));
    } catch (const NumericalError& e) {
        throw NumericalError(annotate(name, cfg, e.what()));
    } catch (const json::exception& e) {
        throw ConfigError(annotate(name, cfg, e.what()));
    } catch (const std::bad_alloc&) {
        throw;
    } catch (const std::exception& e) {
        throw NumericalError(annotate(name, cfg, e.what()));
    }
}

} // namespace

DataMatrix load_input(const PipelineConfig& cfg)
{
    return stage("load", cfg, [&] {
        cfg.validate();
        DataMatrix X;
        if (cfg.synth) {
            const auto& s = *cfg.synth;
            const auto seeds = derive_seeds(cfg);
            const auto model = random_subspace_model(
                s.D, std::vector<Index>(static_cast<std::size_t>(s.K), s.dim), s.noise_std,
                s.affine, mix_seed(seeds.data, 0));
            X = generate_union_of_subspaces(
                model, std::vector<Index>(static_cast<std::size_t>(s.K), s.per_cluster),
                mix_seed(seeds.data, 1));
        } else {
            const std::filesystem::path path(*cfg.input);
            const auto fmt = cfg.input_format ? *cfg.input_format : format_from_extension(path);
            X = load_matrix(path, fmt, CsvOptions{cfg.input_labels});
        }
        if (cfg.normalize)
            X = normalize_columns(X);
        X.validate();
        return X;
    });
}

PipelineResult run_pipeline(const PipelineConfig& cfg)
{
    const DataMatrix X = load_input(cfg);
    return run_pipeline(cfg, X);
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const DataMatrix& data)
{
    stage("validate", cfg, [&] {
        cfg.validate();
        data.validate();
        if (cfg.d && *cfg.d > data.dim())
            throw ConfigError("d=" + std::to_string(*cfg.d) + " exceeds the data dimension D="
                              + std::to_string(data.dim()));
        if (cfg.knn > data.size() - 1)
            throw ConfigError("knn=" + std::to_string(cfg.knn)
                              + " must be below the number of data points "
                              + std::to_string(data.size()));
        if (cfg.K > data.size())
            throw ConfigError("K exceeds the number of data points");
    });

    const auto seeds = derive_seeds(cfg);
    const auto solver_cfg = cfg.solver_config();
    StageTimer timer;

    // Sketching: generating the operators and forming the products.
    std::optional<SketchOperator> dim_op;
    std::optional<SketchOperator> op;
    Eigen::MatrixXd Xs;
    Eigen::MatrixXd B;
    stage("sketch", cfg, [&] {
        auto t = timer.scope("sketch");
        if (cfg.d) {
            dim_op = SketchOperator::make(cfg.dim_sketch, data.dim(), *cfg.d, seeds.dim_sketch);
            Xs = dim_op->apply_left(data.values, cfg.threads);
        } else {
            Xs = data.values;
        }
        op = SketchOperator::make(cfg.sketch, data.size(), cfg.n, seeds.sketch);
        B = op->apply_right(Xs, cfg.threads);
    });

    CoefficientMatrix<double> A;
    stage("solve", cfg, [&] {
        auto t = timer.scope("solve");
        A = solve<double>(cfg.method, Xs, B, solver_cfg);
    });

    AffinityGraph W;
    stage("graph", cfg, [&] {
        auto t = timer.scope("graph");
        const auto nn = knn_search(A.values, cfg.knn, cfg.threads);
        W = affinity_from_neighbors(nn, cfg.affinity, cfg.sigma);
    });

    PipelineResult result;
    stage("spectral", cfg, [&] {
        auto t = timer.scope("spectral");
        KMeansOptions kopts;
        kopts.restarts = cfg.restarts;
        kopts.threads = cfg.threads;
        EigenOptions eopts;
        eopts.dense_cutoff = cfg.dense_cutoff;
        result.assignment = spectral_cluster(W, cfg.K, seeds.kmeans, kopts, eopts);
    });

    result.run_id = run_id(cfg);
    result.diagnostics = A.diagnostics;
    auto& rep = result.report;
    if (data.labels)
        rep.accuracy = clustering_accuracy(result.assignment, *data.labels);
    for (const char* s : {"sketch", "solve", "graph", "spectral"})
        rep.wall_time_s[s] = timer.stages().count(s) ? timer.stages().at(s) : 0.0;
    rep.n = cfg.n;
    rep.d = cfg.d;
    rep.k = cfg.knn;
    rep.lambda = cfg.lambda;
    rep.seeds = {seeds.sketch, seeds.dim_sketch, seeds.data, seeds.kmeans};

    json& j = result.report_json;
    j["run_id"] = result.run_id;
    j["config"] = cfg;
    j["data"] = {{"D", data.dim()}, {"N", data.size()}, {"labels", data.labels.has_value()}};
    j["sketches"] = {{"R", *op}, {"R_check", dim_op ? json(*dim_op) : json(nullptr)}};
    j["seeds"] = {{"sketch", seeds.sketch},
                  {"dim_sketch", seeds.dim_sketch},
                  {"data", seeds.data},
                  {"kmeans", seeds.kmeans}};
    j["solver"] = {{"method", to_string(cfg.method)},
                   {"config", solver_cfg},
                   {"diagnostics", A.diagnostics}};
    j["graph"] = {{"affinity", to_string(W.kind)},
                  {"k", W.k},
                  {"sigma", W.sigma},
                  {"edges", W.weights.nonZeros() / 2}};
    j["clustering"] = {{"K", result.assignment.K}, {"inertia", result.assignment.inertia}};
    j["report"] = rep;
    j["total_time_s"] = timer.total();

    if (!cfg.output_dir.empty()) {
        stage("write", cfg, [&] {
            const std::filesystem::path dir(cfg.output_dir);
            std::filesystem::create_directories(dir);
            write_assignment_csv(result.assignment, dir / (result.run_id + "_assign.csv"));
            std::ofstream out(dir / (result.run_id + "_report.json"));
            if (!out)
                throw DataError("cannot write report into " + dir.string());
            out << j.dump(2) << '\n';
        });
    }
    return result;
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<SweepRow> run_sweep(const PipelineConfig& cfg, const std::vector<Index>& n_values,
                                const std::vector<std::uint64_t>& seeds, int workers)
{
    if (n_values.empty() || seeds.empty())
        throw ConfigError("sweep needs at least one n value and one seed");
    cfg.validate();

    std::optional<DataMatrix> shared;
    if (cfg.input)
        shared = load_input(cfg);

    std::vector<SweepRow> rows;
    for (Index n : n_values)
        for (auto s : seeds) {
            SweepRow r;
            r.n = n;
            r.seed = s;
            rows.push_back(r);
        }
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return std::tie(a.n, a.seed) < std::tie(b.n, b.seed);
    });

    parallel_for(0, static_cast<Index>(rows.size()), workers, [&](Index i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        PipelineConfig run = cfg;
        run.n = row.n;
        run.seed = row.seed;
        run.threads = 1;
        try {
            const auto res = shared ? run_pipeline(run, *shared) : run_pipeline(run);
            row.accuracy = res.report.accuracy;
            row.t_sketch = res.report.wall_time_s.at("sketch");
            row.t_solve = res.report.wall_time_s.at("solve");
            row.t_graph = res.report.wall_time_s.at("graph");
            row.t_spectral = res.report.wall_time_s.at("spectral");
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
    });
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << "n,seed,accuracy,t_sketch,t_solve,t_graph,t_spectral,status\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& r : rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), '"', '\'');
        out << r.n << ',' << r.seed << ',';
        if (r.accuracy)
            out << *r.accuracy;
        out << ',' << r.t_sketch << ',' << r.t_solve << ',' << r.t_graph << ',' << r.t_spectral
            << ",\"" << status << "\"\n";
    }
}

} // namespace sksc
