// sksc: sketched subspace clustering from the command line.

#include "sksc/pipeline.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Flags {
    std::string config;
    std::string input;
    std::string input_format;
    bool input_labels = false;
    std::string synth;
    std::string method;
    long n = 0;
    long d = 0;
    std::string sketch;
    std::string dim_sketch;
    double lambda = 0, nu0 = 0, p = 0, nu_max = 0, tol = 0, sigma = 0;
    int max_iter = 0;
    long knn = 0;
    std::string affinity;
    long K = 0;
    int restarts = 0;
    std::uint64_t seed = 0;
    bool normalize = false;
    std::string out;
    int threads = 0;
};

struct Options {
    Flags f;
    std::map<std::string, CLI::Option*> opt;

    bool given(const std::string& name) const { return opt.at(name)->count() > 0; }
};

void add_pipeline_flags(CLI::App& app, Options& o)
{
    auto& f = o.f;
    auto& m = o.opt;
    m["config"] = app.add_option("--config", f.config, "JSON config file; flags override it");
    m["input"] = app.add_option("--input", f.input, "Data matrix file (.csv, .mtx, .bin)");
    m["input-format"] = app.add_option("--input-format", f.input_format, "csv | mtx | bin");
    m["input-labels"] =
        app.add_flag("--input-labels", f.input_labels, "CSV input has a trailing label column");
    m["synth"] = app.add_option("--synth", f.synth,
                                "Synthetic data, e.g. K=5,D=50,dim=5,per=200,noise=0.01");
    m["method"] = app.add_option("--method", f.method, "lsr | ssc | lrr");
    m["n"] = app.add_option("--n", f.n, "Sketch size");
    m["d"] = app.add_option("--d", f.d, "Reduced dimension (enables the doubly sketched path)");
    m["sketch"] = app.add_option("--sketch", f.sketch, "rademacher | gaussian | sparse | fjlt");
    m["dim-sketch"] = app.add_option("--dim-sketch", f.dim_sketch, "Sketch kind for the rows");
    m["lambda"] = app.add_option("--lambda", f.lambda, "Regularization parameter");
    m["nu0"] = app.add_option("--nu0", f.nu0, "Initial penalty");
    m["p"] = app.add_option("--p", f.p, "Penalty growth factor (lrr)");
    m["nu-max"] = app.add_option("--nu-max", f.nu_max, "Penalty cap (lrr)");
    m["tol"] = app.add_option("--tol", f.tol, "Stopping tolerance");
    m["max-iter"] = app.add_option("--max-iter", f.max_iter, "Iteration cap");
    m["knn"] = app.add_option("--knn", f.knn, "Neighbors per node");
    m["affinity"] = app.add_option("--affinity", f.affinity, "binary | heat");
    m["sigma"] = app.add_option("--sigma", f.sigma, "Heat kernel width (default: median distance)");
    m["K"] = app.add_option("--K", f.K, "Number of clusters");
    m["restarts"] = app.add_option("--restarts", f.restarts, "k-means restarts");
    m["seed"] = app.add_option("--seed", f.seed, "Master seed");
    m["normalize"] = app.add_flag("--normalize", f.normalize, "Scale columns to unit norm");
    m["out"] = app.add_option("--out", f.out, "Output directory");
    m["threads"] = app.add_option("--threads", f.threads, "Worker threads");
}

sksc::PipelineConfig build_config(const Options& o)
{
    sksc::PipelineConfig cfg;
    const auto& f = o.f;
    if (o.given("config")) {
        std::ifstream in(f.config);
        if (!in)
            throw sksc::ConfigError("cannot open config file " + f.config);
        sksc::json j;
        try {
            in >> j;
        } catch (const sksc::json::exception& e) {
            throw sksc::ConfigError(f.config + ": " + e.what());
        }
        cfg = j.get<sksc::PipelineConfig>();
    }
    if (o.given("input")) {
        cfg.input = f.input;
        cfg.synth.reset();
    }
    if (o.given("synth")) {
        cfg.synth = sksc::parse_synth_spec(f.synth);
        cfg.input.reset();
    }
    if (o.given("input-format"))
        cfg.input_format = sksc::parse_matrix_format(f.input_format);
    if (o.given("input-labels"))
        cfg.input_labels = f.input_labels;
    if (o.given("method"))
        cfg.method = sksc::parse_solver_method(f.method);
    if (o.given("n"))
        cfg.n = f.n;
    if (o.given("d"))
        cfg.d = f.d;
    if (o.given("sketch"))
        cfg.sketch = sksc::parse_sketch_kind(f.sketch);
    if (o.given("dim-sketch"))
        cfg.dim_sketch = sksc::parse_sketch_kind(f.dim_sketch);
    if (o.given("lambda"))
        cfg.lambda = f.lambda;
    if (o.given("nu0"))
        cfg.nu0 = f.nu0;
    if (o.given("p"))
        cfg.p = f.p;
    if (o.given("nu-max"))
        cfg.nu_max = f.nu_max;
    if (o.given("tol"))
        cfg.tol = f.tol;
    if (o.given("max-iter"))
        cfg.max_iter = f.max_iter;
    if (o.given("knn"))
        cfg.knn = f.knn;
    if (o.given("affinity"))
        cfg.affinity = sksc::parse_affinity_kind(f.affinity);
    if (o.given("sigma"))
        cfg.sigma = f.sigma;
    if (o.given("K"))
        cfg.K = f.K;
    if (o.given("restarts"))
        cfg.restarts = f.restarts;
    if (o.given("seed"))
        cfg.seed = f.seed;
    if (o.given("normalize"))
        cfg.normalize = f.normalize;
    if (o.given("out"))
        cfg.output_dir = f.out;
    if (o.given("threads"))
        cfg.threads = f.threads;
    cfg.validate();
    return cfg;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what)
{
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::istringstream is(item);
        T v{};
        if (!(is >> v) || !is.eof())
            throw sksc::ConfigError(std::string("bad ") + what + " entry '" + item + "'");
        out.push_back(v);
    }
    if (out.empty())
        throw sksc::ConfigError(std::string(what) + " list is empty");
    return out;
}

int run_command(const Options& o)
{
    const auto cfg = build_config(o);
    const auto res = sksc::run_pipeline(cfg);
    std::cout << res.report_json.dump(2) << '\n';
    return 0;
}

int sweep_command(const Options& o, const std::string& n_values, const std::string& seeds,
                  const std::string& csv, int workers)
{
    auto cfg = build_config(o);
    const auto ns = parse_list<sksc::Index>(n_values, "n-values");
    const auto ss = parse_list<std::uint64_t>(seeds, "seeds");
    const auto rows = sksc::run_sweep(cfg, ns, ss, workers);
    if (csv.empty()) {
        const auto tmp = std::filesystem::temp_directory_path() / "sksc_sweep.csv";
        sksc::write_sweep_csv(rows, tmp);
        std::ifstream in(tmp);
        std::cout << in.rdbuf();
        std::filesystem::remove(tmp);
    } else {
        sksc::write_sweep_csv(rows, csv);
    }
    return 0;
}

int generate_command(const std::string& synth, std::uint64_t seed, bool normalize,
                     const std::string& out, const std::string& format, bool labels)
{
    sksc::PipelineConfig cfg;
    cfg.synth = sksc::parse_synth_spec(synth);
    cfg.seed = seed;
    cfg.normalize = normalize;
    cfg.knn = 1;
    cfg.K = 1;
    const auto X = sksc::load_input(cfg);
    const std::filesystem::path path(out);
    const auto fmt = format.empty() ? sksc::format_from_extension(path)
                                    : sksc::parse_matrix_format(format);
    sksc::save_matrix(X, path, fmt, sksc::CsvOptions{labels});
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sketched subspace clustering"};
    app.require_subcommand(1);

    Options run_opts;
    auto* run = app.add_subcommand("run", "Cluster one data set");
    add_pipeline_flags(*run, run_opts);

    Options sweep_opts;
    std::string n_values, seeds, csv;
    int workers = 1;
    auto* sweep = app.add_subcommand("sweep", "Run the pipeline over a grid of n and seeds");
    add_pipeline_flags(*sweep, sweep_opts);
    sweep->add_option("--n-values", n_values, "Comma-separated sketch sizes")->required();
    sweep->add_option("--seeds", seeds, "Comma-separated seeds")->required();
    sweep->add_option("--csv", csv, "Output CSV (default: stdout)");
    sweep->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);

    std::string g_synth, g_out, g_format;
    std::uint64_t g_seed = 1;
    bool g_normalize = false, g_labels = false;
    auto* gen = app.add_subcommand("generate", "Write a synthetic union-of-subspaces data set");
    gen->add_option("--synth", g_synth, "K=5,D=50,dim=5,per=200,noise=0.01")->required();
    gen->add_option("--seed", g_seed, "Master seed");
    gen->add_flag("--normalize", g_normalize, "Scale columns to unit norm");
    gen->add_flag("--labels", g_labels, "Append ground-truth labels (CSV only)");
    gen->add_option("--out", g_out, "Output file")->required();
    gen->add_option("--format", g_format, "csv | mtx | bin (default: from extension)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run)
            return run_command(run_opts);
        if (*sweep)
            return sweep_command(sweep_opts, n_values, seeds, csv, workers);
        return generate_command(g_synth, g_seed, g_normalize, g_out, g_format, g_labels);
    } catch (const sksc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const sksc::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const sksc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
