#pragma once

#include <string>

#include <json.hpp>

#include "cartan/forms.hpp"
#include "cartan/invariants.hpp"
#include "cartan/oracle.hpp"
#include "cartan/reduction.hpp"

namespace cartan {

/// {"basis": [labels], "terms": {label: Expr}}; two-form labels are "dx^du".
nlohmann::json to_json(const OneForm& w);
nlohmann::json to_json(const TwoForm& w);
/// Reads forms over the coordinate or abstract basis named by "basis".
OneForm one_form_from_json(const nlohmann::json& j);
TwoForm two_form_from_json(const nlohmann::json& j);

/// Documents carry "kind" plus printed expressions (strings that parse back).
nlohmann::json to_json(const ReductionTrace& trace);
nlohmann::json to_json(const InvariantSet& inv, const std::string& operator_text);
nlohmann::json to_json(const CompareReport& rep);
nlohmann::json to_json(const ResidualReport& rep);
nlohmann::json error_json(const Error& e);

/// Rebuilds the operator, variant and final stage of a trace document (loop
/// records are not restored). Constants used by the operator must be declared.
ReductionTrace trace_from_json(const nlohmann::json& doc, const std::set<std::string>& constants = {});

std::string to_text(const ReductionTrace& trace);
std::string to_text(const InvariantSet& inv);
std::string to_text(const CompareReport& rep);
std::string to_text(const ResidualReport& rep);

/// Final structure equations with named invariant slots, followed by the
/// definitions of the names (an align* block).
std::string latex_structure_equations(const ReductionTrace& trace, const NormalizationPlan& plan);
std::string latex_invariants(const InvariantSet& inv);
/// Wraps a body in a standalone article.
std::string latex_document(const std::string& body);

}  // namespace cartan
