#pragma once

// JSON problem documents: domains, structure presets, right-hand sides, boundary data and fields.

#include "json.hpp"

#include "acx/dirichlet.hpp"

namespace acx {

using Json = nlohmann::json;

DomainPtr parse_domain(const Json& j);
/// {"preset": id, "params": {...}}; defaults to "standard".
AcxPtr parse_structure(const Json& j, int n);
/// Absent or null => empty (homogeneous); number; {"type": "constant", "value"}; {"type": "radial", "r", "f"}.
ScalarFn parse_rhs(const Json* j);
/// Preset id string or {"preset": id, ...}. Presets: zero, constant, abs2, neg-abs2, abs2-z1, re-z1z2,
/// re-z1-squared, max-x1, sphere-demo, quadratic, trig.
ScalarFn parse_function(const Json& j, int dim);
/// {"csv": path} or a function spec sampled on the domain.
ScalarField parse_field(const Json& j, const DomainPtr& domain);
DirichletProblem parse_problem(const Json& j);
SchemeParams parse_scheme(const Json* j);

Json load_json_file(const std::string& path);

Json to_json(const Vec& v);
Json to_json(const CMat& m);

}  // namespace acx
