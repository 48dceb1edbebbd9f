#ifndef SKSC_SERIALIZE_HPP
#define SKSC_SERIALIZE_HPP

#include "sksc/eval.hpp"
#include "sksc/sketch.hpp"
#include "sksc/solvers.hpp"

#include "json.hpp"

namespace sksc {

using json = nlohmann::json;

void to_json(json& j, const SolverConfig& c);
void from_json(const json& j, SolverConfig& c);

void to_json(json& j, const SolveDiagnostics& d);

void to_json(json& j, const BoundParams& p);
void to_json(json& j, const BoundCheck& b);

void to_json(json& j, const EvalReport& r);

void to_json(json& j, const ClusterAssignment& a);

} // namespace sksc

namespace nlohmann {

/// Operators serialize as their descriptor {kind, rows, cols, seed[, epsilon, delta]}
/// and are rebuilt from it.
template <>
struct adl_serializer<sksc::SketchOperator> {
    static void to_json(json& j, const sksc::SketchOperator& op);
    static sksc::SketchOperator from_json(const json& j);
};

} // namespace nlohmann

#endif
