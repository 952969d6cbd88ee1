#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "graphconc/gp_decompose.hpp"
#include "graphconc/graph_model.hpp"
#include "graphconc/regularize.hpp"

namespace graphconc {

using Json = nlohmann::json;

// Graph files: one JSON header line {"n":..,"directed":..,"weighted":..}
// followed by `i,j,w` lines (0-based, i < j for undirected graphs).
void write_graph(std::ostream& out, const SparseGraph& g);
SparseGraph read_graph(std::istream& in);
void save_graph(const std::string& path, const SparseGraph& g);
SparseGraph load_graph(const std::string& path);

// Models as JSON objects, e.g. {"n":100,"kind":"uniform","p":0.05},
// {"kind":"block_two","n":2000,"a":30,"b":5}, {"kind":"rank_one","theta":[..]},
// {"kind":"degree_profile","degrees":[..]}, {"kind":"explicit","p":[[..],..]}.
Json model_to_json(const ProbabilityModel& model);
ProbabilityModel model_from_json(const Json& j);

// {"scheme":"trim","cap":6}, {"scheme":"tau","tau":5}, {"scheme":"identity"}.
Json scheme_to_json(const RegularizationScheme& scheme);
RegularizationScheme scheme_from_json(const Json& j);

/// `i,j,class` for every assigned pair, class in {N,R,C}. The all-N
/// background is written too, so the file lists all n^2 pairs.
void write_decomposition_csv(std::ostream& out, const EdgeDecomposition& dec);
Json decomposition_trace_json(const EdgeDecomposition& dec);
Json verification_json(const VerificationReport& report);

/// Lowercase hex SHA-1 of "blob <size>\0<content>", as `git hash-object` prints.
std::string git_blob_hash(const std::string& content);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace graphconc
