#include "gibbs/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gibbs {

using nlohmann::json;

PotentialInput PotentialSpec::materialize(const SubshiftSpec& spec) const {
  switch (kind) {
    case Kind::Zero:
      return PotentialInput::zero();
    case Kind::Constant:
      return PotentialInput::from_table(Potential::constant(spec, constant));
    case Kind::Trig:
      return PotentialInput::from_trig(trig);
    case Kind::Table: {
      WordIndexer idx(spec, table_depth);
      std::vector<double> vals(idx.count(), 0.0);
      std::vector<char> seen(idx.count(), 0);
      for (const auto& [key, value] : table_values) {
        std::vector<Symbol> w;
        std::stringstream ss(key);
        std::string tok;
        while (std::getline(ss, tok, ','))
          w.push_back(static_cast<Symbol>(std::stoi(tok)));
        if (static_cast<int>(w.size()) != table_depth)
          fail(ErrorCode::BadInput,
               "table key '" + key + "' does not have the declared depth");
        const std::size_t r = idx.rank(w);
        vals[r] = value;
        seen[r] = 1;
      }
      for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
          fail(ErrorCode::BadInput,
               "table missing value for admissible word " +
                   idx.word_at(i).str());
      return PotentialInput::from_table(
          Potential(spec, table_depth, vals, holder));
    }
  }
  fail(ErrorCode::BadInput, "unknown potential kind");
}

namespace {

PotentialSpec parse_potential(const json& j) {
  PotentialSpec p;
  if (j.is_null()) return p;
  if (j.contains("holder")) {
    HolderData h;
    h.c = j.at("holder").value("c", 0.0);
    h.beta = j.at("holder").value("beta", 0.5);
    p.holder = h;
  }
  if (j.contains("zero")) return p;
  if (j.contains("constant")) {
    p.kind = PotentialSpec::Kind::Constant;
    p.constant = j.at("constant").get<double>();
    return p;
  }
  if (j.contains("table")) {
    p.kind = PotentialSpec::Kind::Table;
    const json& t = j.at("table");
    p.table_depth = t.at("depth").get<int>();
    for (const auto& [key, value] : t.at("values").items())
      p.table_values.push_back({key, value.get<double>()});
    return p;
  }
  if (j.contains("trig")) {
    p.kind = PotentialSpec::Kind::Trig;
    for (const json& t : j.at("trig").at("terms")) {
      TrigPolynomial::Term term;
      term.m = t.at("m").get<int>();
      term.n = t.at("n").get<int>();
      term.cos_coeff = t.value("a", 0.0);
      term.sin_coeff = t.value("b", 0.0);
      p.trig.terms.push_back(term);
    }
    return p;
  }
  fail(ErrorCode::BadInput,
       "potential must be one of zero/constant/table/trig");
}

json potential_echo(const PotentialSpec& p) {
  json j;
  switch (p.kind) {
    case PotentialSpec::Kind::Zero:
      j["zero"] = true;
      break;
    case PotentialSpec::Kind::Constant:
      j["constant"] = p.constant;
      break;
    case PotentialSpec::Kind::Table: {
      json values = json::object();
      for (const auto& [k, v] : p.table_values) values[k] = v;
      j["table"] = {{"depth", p.table_depth}, {"values", values}};
      break;
    }
    case PotentialSpec::Kind::Trig: {
      json terms = json::array();
      for (const auto& t : p.trig.terms)
        terms.push_back({{"m", t.m},
                         {"n", t.n},
                         {"a", t.cos_coeff},
                         {"b", t.sin_coeff}});
      j["trig"] = {{"terms", terms}};
      break;
    }
  }
  return j;
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::BadInput, std::string("config parse error: ") + e.what());
  }
  RunConfig cfg;
  try {
    if (j.contains("matrix")) {
      const auto& m = j.at("matrix");
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
          cfg.matrix[i][k] = m.at(i).at(k).get<long long>();
    }
    cfg.potential_u = parse_potential(j.value("potential_u", json()));
    cfg.potential_s = parse_potential(j.value("potential_s", json()));
    cfg.depth = j.value("depth", 12);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.output_dir = j.value("output_dir", std::string("out"));
    cfg.partition_file = j.value("partition_file", std::string());
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      cfg.tol.series_tol = t.value("series_tol", cfg.tol.series_tol);
      cfg.tol.livshitz_tol = t.value("livshitz_tol", cfg.tol.livshitz_tol);
      cfg.tol.eigen_tol = t.value("eigen_tol", cfg.tol.eigen_tol);
      cfg.tol.boundary_threshold =
          t.value("boundary_threshold", cfg.tol.boundary_threshold);
      cfg.tol.variational_tol =
          t.value("variational_tol", cfg.tol.variational_tol);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::BadInput, std::string("config field error: ") + e.what());
  }
  if (cfg.depth < 2 || cfg.depth > 24)
    fail(ErrorCode::BadInput, "depth must lie in [2, 24]");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::BadInput, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

std::string RunConfig::echo_json() const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["matrix"] = {{matrix[0][0], matrix[0][1]}, {matrix[1][0], matrix[1][1]}};
  j["potential_u"] = potential_echo(potential_u);
  j["potential_s"] = potential_echo(potential_s);
  j["depth"] = depth;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["tolerances"] = {{"series_tol", tol.series_tol},
                     {"livshitz_tol", tol.livshitz_tol},
                     {"eigen_tol", tol.eigen_tol},
                     {"boundary_threshold", tol.boundary_threshold},
                     {"variational_tol", tol.variational_tol}};
  if (!partition_file.empty()) j["partition_file"] = partition_file;
  return j.dump();
}

MarkovPartition partition_from_file(const ToralAutomorphism& aut,
                                    const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::BadInput, "cannot open partition file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::BadInput,
         std::string("partition parse error: ") + e.what());
  }
  std::vector<EigenBox> boxes;
  for (const json& b : j.at("rectangles")) {
    boxes.push_back(EigenBox{b.at("u").at(0).get<double>(),
                             b.at("u").at(1).get<double>(),
                             b.at("s").at(0).get<double>(),
                             b.at("s").at(1).get<double>()});
  }
  Matrix01 A;
  for (const json& row : j.at("transition")) {
    A.push_back(row.get<std::vector<int>>());
  }
  return build_partition(aut, std::move(boxes), A);
}

MarkovPartition partition_for(const RunConfig& cfg) {
  ToralAutomorphism aut = build_automorphism(cfg.matrix);
  if (!cfg.partition_file.empty())
    return partition_from_file(aut, cfg.partition_file);
  return catmap_partition(aut);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::BadInput, "cannot write " + tmp);
    out << contents;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    fail(ErrorCode::BadInput, "cannot rename into " + path);
}

}  // namespace gibbs
