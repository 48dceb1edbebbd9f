#include "sksc/solvers.hpp"

namespace sksc {

SolverMethod parse_solver_method(std::string_view name)
{
    if (name == "lsr")
        return SolverMethod::SketchLSR;
    if (name == "ssc")
        return SolverMethod::SketchSSC;
    if (name == "lrr")
        return SolverMethod::SketchLRR;
    throw ConfigError("unknown method '" + std::string(name) + "' (expected lsr, ssc or lrr)");
}

std::string_view to_string(SolverMethod m)
{
    switch (m) {
    case SolverMethod::SketchLSR:
        return "lsr";
    case SolverMethod::SketchSSC:
        return "ssc";
    case SolverMethod::SketchLRR:
        return "lrr";
    }
    return "?";
}

} // namespace sksc
