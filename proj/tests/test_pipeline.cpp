#include "sksc/pipeline.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sksc;

namespace {

PipelineConfig small_config()
{
    PipelineConfig cfg;
    cfg.synth = parse_synth_spec("K=3,D=20,dim=3,per=40,noise=0.01");
    cfg.n = 20;
    cfg.lambda = 10;
    cfg.K = 3;
    cfg.normalize = true;
    cfg.seed = 5;
    return cfg;
}

std::filesystem::path fresh_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / "sksc_tests" / name;
    std::filesystem::remove_all(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void strip_times(json& j)
{
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key() == "wall_time" || it.key() == "wall_time_s" || it.key() == "total_time_s")
                it.value() = nullptr;
            else
                strip_times(it.value());
        }
    } else if (j.is_array()) {
        for (auto& v : j)
            strip_times(v);
    }
}

double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
                ++j;
            for (std::size_t t = i; t <= j; ++t)
                r[idx[t]] = (static_cast<double>(i) + static_cast<double>(j)) / 2;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

TEST_SUITE("pipeline")
{
    TEST_CASE("synth spec parsing")
    {
        const auto s = parse_synth_spec("K=4,D=30,dim=2,per=10,noise=0.5,affine=1,seed=9");
        CHECK(s.K == 4);
        CHECK(s.D == 30);
        CHECK(s.dim == 2);
        CHECK(s.per_cluster == 10);
        CHECK(s.noise_std == 0.5);
        CHECK(s.affine);
        CHECK(*s.seed == 9);
        CHECK(parse_synth_spec(to_string(s)) == s);
        CHECK_THROWS_AS(parse_synth_spec("K=4,bogus=1"), ConfigError);
        CHECK_THROWS_AS(parse_synth_spec("K=x"), ConfigError);
        CHECK_THROWS_AS(parse_synth_spec("D=3,dim=5"), ConfigError);
    }

    TEST_CASE("config round trip")
    {
        PipelineConfig cfg = small_config();
        CHECK(json(cfg).get<PipelineConfig>() == cfg);
        cfg.synth.reset();
        cfg.input = "/tmp/x.mtx";
        cfg.input_format = MatrixFormat::MatrixMarket;
        cfg.method = SolverMethod::SketchLRR;
        cfg.d = 7;
        cfg.sketch = SketchKind::HadamardFJLT;
        cfg.dim_sketch = SketchKind::Gaussian;
        cfg.nu0 = 0.5;
        cfg.nu_max = 1e4;
        cfg.p = 1.3;
        cfg.affinity = AffinityKind::HeatKernel;
        cfg.sigma = 0.25;
        cfg.output_dir = "out";
        cfg.threads = 3;
        const auto back = json::parse(json(cfg).dump()).get<PipelineConfig>();
        CHECK(back == cfg);
    }

    TEST_CASE("config validation")
    {
        auto cfg = small_config();
        cfg.n = 0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = small_config();
        cfg.d = 0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = small_config();
        cfg.input = "x.csv";
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = small_config();
        cfg.lambda = 0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg = small_config();
        cfg.method = SolverMethod::SketchLRR;
        cfg.p = 0.9;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        const json bogus = {{"method", "bogus"}};
        CHECK_THROWS_AS(bogus.get<PipelineConfig>(), ConfigError);
    }

    TEST_CASE("smoke run writes artifacts named by run id")
    {
        auto cfg = small_config();
        const auto dir = fresh_dir("smoke");
        cfg.output_dir = dir.string();
        const auto res = run_pipeline(cfg);
        REQUIRE(res.report.accuracy.has_value());
        CHECK(*res.report.accuracy > 0.9);
        CHECK(res.report_json["report"].contains("accuracy"));
        CHECK(res.report_json["sketches"]["R"]["kind"] == "rademacher");
        CHECK(res.report_json["sketches"]["R_check"].is_null());
        CHECK(res.run_id == run_id(cfg));
        CHECK(std::filesystem::exists(dir / (res.run_id + "_assign.csv")));
        CHECK(std::filesystem::exists(dir / (res.run_id + "_report.json")));
        const auto on_disk = json::parse(read_file(dir / (res.run_id + "_report.json")));
        CHECK(on_disk["run_id"] == res.run_id);
    }

    TEST_CASE("run id depends on result-affecting fields only")
    {
        auto a = small_config();
        auto b = a;
        b.output_dir = "elsewhere";
        b.threads = 4;
        CHECK(run_id(a) == run_id(b));
        b.seed = 6;
        CHECK(run_id(a) != run_id(b));
        CHECK(run_id(a).size() == 16);
    }

    TEST_CASE("identical config gives identical report modulo timings")
    {
        for (auto method : {SolverMethod::SketchLSR, SolverMethod::SketchSSC, SolverMethod::SketchLRR}) {
            auto cfg = small_config();
            cfg.method = method;
            cfg.lambda = method == SolverMethod::SketchLSR ? 10 : 50;
            json a = run_pipeline(cfg).report_json;
            json b = run_pipeline(cfg).report_json;
            strip_times(a);
            strip_times(b);
            CHECK(a.dump() == b.dump());
        }
    }

    TEST_CASE("threads do not change assignments")
    {
        auto cfg = small_config();
        cfg.synth->per_cluster = 150;
        const auto one = run_pipeline(cfg);
        cfg.threads = 4;
        const auto four = run_pipeline(cfg);
        CHECK(one.assignment.labels == four.assignment.labels);
    }

    TEST_CASE("doubly sketched path")
    {
        auto cfg = small_config();
        cfg.d = 10;
        cfg.dim_sketch = SketchKind::Gaussian;
        const auto res = run_pipeline(cfg);
        CHECK(res.report_json["sketches"]["R_check"]["kind"] == "gaussian");
        CHECK(res.report_json["sketches"]["R_check"]["seed"] == (cfg.seed ^ 1u));
        CHECK(res.report_json["sketches"]["R"]["rows"] == 120);
        CHECK(*res.report.d == 10);
    }

    TEST_CASE("d larger than D fails validation before compute")
    {
        auto cfg = small_config();
        cfg.d = 21;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        try {
            run_pipeline(cfg);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("stage 'load'") != std::string::npos);
            CHECK(msg.find("\"n\":20") != std::string::npos);
        }
    }

    TEST_CASE("stage errors carry the stage name")
    {
        auto cfg = small_config();
        cfg.sketch = SketchKind::HadamardFJLT;
        cfg.n = 200; // more columns than the padded 128 rows
        try {
            run_pipeline(cfg);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("stage 'sketch'") != std::string::npos);
        }
        cfg = small_config();
        cfg.synth.reset();
        cfg.input = (fresh_dir("missing") / "nope.csv").string();
        CHECK_THROWS_AS(run_pipeline(cfg), DataError);
    }

    TEST_CASE("file input with labels")
    {
        auto cfg = small_config();
        const auto X = load_input(cfg);
        const auto dir = fresh_dir("file");
        std::filesystem::create_directories(dir);
        save_matrix(X, dir / "x.csv", MatrixFormat::Csv, CsvOptions{true});
        PipelineConfig fcfg = cfg;
        fcfg.synth.reset();
        fcfg.input = (dir / "x.csv").string();
        fcfg.input_labels = true;
        fcfg.normalize = false;
        const auto a = run_pipeline(fcfg);
        const auto b = run_pipeline(cfg);
        CHECK(a.assignment.labels == b.assignment.labels);
        CHECK(a.report.accuracy == b.report.accuracy);
    }

    TEST_CASE("sweep grid sizes and order")
    {
        auto cfg = small_config();
        CHECK(run_sweep(cfg, {10}, {1}).size() == 1);
        const auto rows = run_sweep(cfg, {20, 10}, {3, 1, 2}, 2);
        REQUIRE(rows.size() == 6);
        for (std::size_t i = 1; i < rows.size(); ++i)
            CHECK(std::tie(rows[i - 1].n, rows[i - 1].seed) < std::tie(rows[i].n, rows[i].seed));
        for (const auto& r : rows)
            CHECK(r.status == "ok");
        CHECK_THROWS_AS(run_sweep(cfg, {}, {1}), ConfigError);

        const auto dir = fresh_dir("sweep");
        std::filesystem::create_directories(dir);
        write_sweep_csv(rows, dir / "s.csv");
        std::ifstream in(dir / "s.csv");
        std::string line;
        int count = 0;
        std::getline(in, line);
        CHECK(line == "n,seed,accuracy,t_sketch,t_solve,t_graph,t_spectral,status");
        while (std::getline(in, line))
            ++count;
        CHECK(count == 6);
    }

    TEST_CASE("sweep records failures and continues")
    {
        auto cfg = small_config();
        cfg.sketch = SketchKind::HadamardFJLT;
        const auto rows = run_sweep(cfg, {10, 500}, {1});
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].status == "ok");
        CHECK(rows[1].status != "ok");
        CHECK_FALSE(rows[1].accuracy.has_value());
    }

    TEST_CASE("accuracy tends to grow with the sketch size")
    {
        // rank 15: n runs from rank/2 to 4 rank
        PipelineConfig cfg;
        cfg.synth = parse_synth_spec("K=5,D=40,dim=3,per=60,noise=0.001");
        cfg.K = 5;
        cfg.normalize = true;
        const std::vector<Index> ns{7, 10, 15, 30, 45, 60};
        const auto rows = run_sweep(cfg, ns, {1, 2, 3});
        std::vector<double> x, y;
        for (const auto& r : rows) {
            REQUIRE(r.accuracy.has_value());
            x.push_back(static_cast<double>(r.n));
            y.push_back(*r.accuracy);
        }
        CHECK(spearman(x, y) > 0);
    }
}
