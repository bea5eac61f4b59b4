#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dtsel/dataset.hpp"
#include "dtsel/decision.hpp"
#include "dtsel/loss.hpp"
#include "dtsel/modelspace.hpp"
#include "dtsel/network.hpp"
#include "dtsel/scoring.hpp"
#include "dtsel/search.hpp"

namespace dtsel {

using Json = nlohmann::ordered_json;

std::vector<std::string> variable_names(const CategoricalDataset& data);

// digraph with every node declared, then one "parent -> child;" per arc.
std::string to_dot(const DagModel& dag, const std::vector<std::string>& names);
// {"child": ["parent", ...], ...} in variable order.
Json dag_to_json(const DagModel& dag, const std::vector<std::string>& names);

// Accepts DOT or the JSON form (detected by a leading '{').
DagModel parse_dag(const std::string& text, const std::vector<std::string>& names);
DagModel load_dag_file(const std::string& path, const std::vector<std::string>& names);

// One line of comma-separated variable names.
VariableOrdering parse_ordering(const std::string& line, const std::vector<std::string>& names);

// {"type":"zero-one"}
// {"type":"disintegrable","default":{"l0":x,"l1":y},"arcs":{"child:parent":{"l0":x,"l1":y}}}
// {"type":"state-count","h":x,"k":y}
// {"type":"table","child":"X","states":[[],["A"],...],"entries":[[...],...]}
// Table states are parent-name lists; rows/columns are permuted into the
// child's lattice order, so `families` (indexed by variable) is needed.
LossSpec parse_loss_spec(const Json& j, const CategoricalDataset& data,
                         const std::vector<CandidateParents>& families);

// {"X": {"parents":[...], "states":[...], "table":[[row per parent config]]}, ...}
// "states" defaults to "0".."c-1". Variables keep file order.
BayesNetwork parse_network(const Json& j);
Json network_to_json(const BayesNetwork& net);

Json posterior_to_json(const LocalPosterior& lp, const std::vector<std::string>& names);
Json risk_report_to_json(const RiskReport& r);
Json selection_to_json(const LocalSelection& sel, const std::vector<std::string>& names);

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

}  // namespace dtsel
