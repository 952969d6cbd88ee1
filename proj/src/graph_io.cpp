#include "graphconc/graph_io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "graphconc/errors.hpp"

namespace graphconc {

namespace {

std::string format_double(double x) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  return {buf, static_cast<std::size_t>(len)};
}

template <typename T>
T parse_number(std::string_view field, const char* what) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw IoError(std::string("graph file: bad ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

Json index_set_json(const IndexSet& s) { return Json(s); }

}  // namespace

void write_graph(std::ostream& out, const SparseGraph& g) {
  const Json header = {{"n", g.n()}, {"directed", g.directed()}, {"weighted", g.weighted()}};
  out << header.dump() << '\n';
  for (const auto& e : g.edges()) out << e.i << ',' << e.j << ',' << format_double(e.w) << '\n';
}

SparseGraph read_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("graph file: missing header");
  Json header;
  try {
    header = Json::parse(line);
  } catch (const Json::exception& ex) {
    throw IoError(std::string("graph file: bad header: ") + ex.what());
  }
  if (!header.contains("n") || !header.contains("directed")) throw IoError("graph file: header needs n and directed");
  const Index n = header.at("n").get<Index>();
  const bool directed = header.at("directed").get<bool>();

  std::vector<SparseGraph::Edge> edges;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw IoError("graph file: expected i,j,w in '" + line + "'");
    const std::string_view view(line);
    const auto i = parse_number<Index>(view.substr(0, c1), "index");
    const auto j = parse_number<Index>(view.substr(c1 + 1, c2 - c1 - 1), "index");
    const auto w = parse_number<double>(view.substr(c2 + 1), "weight");
    if (i < 0 || j < 0 || i >= n || j >= n) throw IoError("graph file: index out of range in '" + line + "'");
    edges.push_back({i, j, w});
  }
  return SparseGraph::from_edges(n, edges, directed);
}

void save_graph(const std::string& path, const SparseGraph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_graph(out, g);
}

SparseGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_graph(in);
}

Json model_to_json(const ProbabilityModel& model) {
  Json j;
  j["n"] = model.n();
  std::visit(
      [&j, &model](const auto& kind) {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, ProbabilityModel::Uniform>) {
          j["kind"] = "uniform";
          j["p"] = kind.p;
        } else if constexpr (std::is_same_v<K, ProbabilityModel::RankOne>) {
          j["kind"] = "rank_one";
          j["theta"] = std::vector<double>(kind.theta.data(), kind.theta.data() + kind.theta.size());
        } else if constexpr (std::is_same_v<K, ProbabilityModel::BlockTwo>) {
          j["kind"] = "block_two";
          j["a"] = kind.a;
          j["b"] = kind.b;
        } else {
          j["kind"] = "explicit";
          Json rows = Json::array();
          for (Index r = 0; r < model.n(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(model.n()));
            for (Index c = 0; c < model.n(); ++c) row[static_cast<std::size_t>(c)] = kind.p(r, c);
            rows.push_back(std::move(row));
          }
          j["p"] = std::move(rows);
        }
      },
      model.kind());
  return j;
}

ProbabilityModel model_from_json(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    auto to_vector = [](const Json& arr) {
      const auto v = arr.get<std::vector<double>>();
      return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
    };
    if (kind == "uniform") return ProbabilityModel::uniform(j.at("n").get<Index>(), j.at("p").get<double>());
    if (kind == "block_two") {
      return ProbabilityModel::block_two(j.at("n").get<Index>(), j.at("a").get<double>(), j.at("b").get<double>());
    }
    if (kind == "rank_one") return ProbabilityModel::rank_one(to_vector(j.at("theta")));
    if (kind == "degree_profile") return ProbabilityModel::degree_profile(to_vector(j.at("degrees")));
    if (kind == "explicit") {
      const auto rows = j.at("p").get<std::vector<std::vector<double>>>();
      const auto n = static_cast<Index>(rows.size());
      Matrix p(n, n);
      for (Index r = 0; r < n; ++r) {
        if (static_cast<Index>(rows[static_cast<std::size_t>(r)].size()) != n) {
          throw InvalidModel("explicit model: matrix is not square");
        }
        for (Index c = 0; c < n; ++c) p(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      }
      return ProbabilityModel::explicit_matrix(std::move(p));
    }
    throw InvalidModel("unknown model kind '" + kind + "'");
  } catch (const Json::exception& ex) {
    throw InvalidModel(std::string("model json: ") + ex.what());
  }
}

Json scheme_to_json(const RegularizationScheme& scheme) {
  Json j = {{"scheme", scheme.name()}};
  using K = RegularizationScheme::Kind;
  if (scheme.kind == K::TauShift) {
    j["tau"] = scheme.tau;
  } else if (scheme.kind != K::Identity) {
    j["cap"] = scheme.cap;
  }
  return j;
}

RegularizationScheme scheme_from_json(const Json& j) {
  try {
    const std::string name = j.is_string() ? j.get<std::string>() : j.at("scheme").get<std::string>();
    if (name == "identity") return RegularizationScheme::identity();
    if (name == "tau") return RegularizationScheme::tau_shift(j.at("tau").get<double>());
    const double cap = j.at("cap").get<double>();
    if (name == "remove") return RegularizationScheme::remove_vertices(cap);
    if (name == "trim") return RegularizationScheme::trim_edges(cap);
    if (name == "reweight") return RegularizationScheme::proportional_reweight(cap);
    throw InvalidArgument("unknown scheme '" + name + "'");
  } catch (const Json::exception& ex) {
    throw InvalidArgument(std::string("scheme json: ") + ex.what());
  }
}

void write_decomposition_csv(std::ostream& out, const EdgeDecomposition& dec) {
  out << "i,j,class\n";
  for (Index i = 0; i < dec.n(); ++i) {
    for (Index j = 0; j < dec.n(); ++j) out << i << ',' << j << ',' << class_letter(dec.class_of(i, j)) << '\n';
  }
}

Json decomposition_trace_json(const EdgeDecomposition& dec) {
  Json rounds = Json::array();
  for (const RoundTrace& t : dec.trace()) {
    rounds.push_back({
        {"round", t.round},
        {"rows", t.rows.size()},
        {"cols", t.cols.size()},
        {"alpha", t.alpha},
        {"light_threshold", t.light_threshold},
        {"light_rows", t.light_rows.size()},
        {"light_cols", t.light_cols.size()},
        {"gp_excluded_rows", index_set_json(t.gp_excluded_rows)},
        {"gp_excluded_cols", index_set_json(t.gp_excluded_cols)},
        {"heavy_excluded_rows", index_set_json(t.heavy_excluded_rows)},
        {"heavy_excluded_cols", index_set_json(t.heavy_excluded_cols)},
        {"overflow_rows", index_set_json(t.overflow_rows)},
        {"overflow_cols", index_set_json(t.overflow_cols)},
        {"exceptional_rows", index_set_json(t.exceptional_rows)},
        {"exceptional_cols", index_set_json(t.exceptional_cols)},
        {"row_filter_empty", t.row_filter_empty},
        {"col_filter_empty", t.col_filter_empty},
        {"degenerate", t.degenerate},
        {"gp_converged", t.gp_converged},
    });
  }
  return {{"n", dec.n()}, {"r", dec.r()}, {"d", dec.d()}, {"block_trace", std::move(rounds)}};
}

Json verification_json(const VerificationReport& v) {
  return {
      {"partition_ok", v.partition_ok},     {"unassigned", v.unassigned},
      {"max_r_row_ones", v.max_r_row_ones}, {"r_rows_ok", v.r_rows_ok},
      {"max_c_col_ones", v.max_c_col_ones}, {"c_cols_ok", v.c_cols_ok},
      {"r_columns", v.r_columns},           {"c_rows", v.c_rows},
      {"footprint_limit", v.footprint_limit}, {"footprint_ok", v.footprint_ok},
      {"core_norm", v.core_norm},           {"core_ratio", v.core_ratio},
      {"norm_converged", v.norm_converged}, {"structural_ok", v.structural_ok()},
  };
}

std::string git_blob_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw IoError("sha1 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex.push_back(kHex[digest[k] >> 4]);
    hex.push_back(kHex[digest[k] & 15]);
  }
  return hex;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
}

}  // namespace graphconc
