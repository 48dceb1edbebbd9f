#include "sksc/serialize.hpp"

namespace sksc {

void to_json(json& j, const SolverConfig& c)
{
    j = json{{"lambda", c.lambda}, {"nu0", c.nu0},   {"nu_max", c.nu_max},   {"p", c.p},
             {"tol", c.tol},       {"max_iter", c.max_iter}, {"threads", c.threads}};
}

void from_json(const json& j, SolverConfig& c)
{
    SolverConfig d;
    c.lambda = j.value("lambda", d.lambda);
    c.nu0 = j.value("nu0", d.nu0);
    c.nu_max = j.value("nu_max", d.nu_max);
    c.p = j.value("p", d.p);
    c.tol = j.value("tol", d.tol);
    c.max_iter = j.value("max_iter", d.max_iter);
    c.threads = j.value("threads", d.threads);
}

void to_json(json& j, const SolveDiagnostics& d)
{
    j = json{{"iterations", d.iterations},
             {"final_primal_residual", d.final_primal_residual},
             {"objective_value", d.objective_value},
             {"converged", d.converged},
             {"wall_time", d.wall_time}};
}

void to_json(json& j, const BoundParams& p)
{
    j = json{{"rho", p.rho},         {"r", p.r},           {"n", p.n},
             {"N", p.N},             {"epsilon", p.epsilon}, {"lambda", p.lambda},
             {"sigma_r1", p.sigma_r1}};
}

void to_json(json& j, const BoundCheck& b)
{
    j = json{{"lhs", b.lhs}, {"rhs", b.rhs}, {"holds", b.holds}, {"params", b.params}};
}

void to_json(json& j, const EvalReport& r)
{
    j = json{{"accuracy", r.accuracy ? json(*r.accuracy) : json(nullptr)},
             {"wall_time_s", r.wall_time_s},
             {"n", r.n},
             {"d", r.d ? json(*r.d) : json(nullptr)},
             {"k", r.k},
             {"lambda", r.lambda},
             {"seeds", r.seeds}};
}

void to_json(json& j, const ClusterAssignment& a)
{
    j = json{{"K", a.K}, {"inertia", a.inertia}, {"labels", a.labels}};
}

} // namespace sksc

namespace nlohmann {

void adl_serializer<sksc::SketchOperator>::to_json(json& j, const sksc::SketchOperator& op)
{
    j = json{{"kind", sksc::to_string(op.kind())},
             {"rows", op.rows()},
             {"cols", op.cols()},
             {"seed", op.seed()}};
    if (op.jlt_params()) {
        j["epsilon"] = op.jlt_params()->epsilon;
        j["delta"] = op.jlt_params()->delta;
    }
}

sksc::SketchOperator adl_serializer<sksc::SketchOperator>::from_json(const json& j)
{
    auto op = sksc::SketchOperator::make(sksc::parse_sketch_kind(j.at("kind").get<std::string>()),
                                         j.at("rows").get<sksc::Index>(),
                                         j.at("cols").get<sksc::Index>(),
                                         j.at("seed").get<std::uint64_t>());
    if (j.contains("epsilon"))
        op = op.with_jlt_params({j.at("epsilon").get<double>(), j.value("delta", 0.1)});
    return op;
}

} // namespace nlohmann
