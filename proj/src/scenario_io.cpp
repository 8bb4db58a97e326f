#include "sgne/scenario_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#ifndef SGNE_DATA_DIR
#define SGNE_DATA_DIR "data"
#endif

namespace sgne {

using json = nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw InputError(std::string(where) + ": unknown key '" + it.key() + "'");
    }
  }
}

double require_number(const json& obj, const char* where, const char* key) {
  if (!obj.contains(key)) {
    throw InputError(std::string(where) + ": missing key '" + key + "'");
  }
  if (!obj[key].is_number()) {
    throw InputError(std::string(where) + ": '" + key + "' must be a number");
  }
  return obj[key].get<double>();
}

CommGraph parse_graph(const json& g, int n) {
  if (!g.is_object()) {
    throw InputError("graph: expected an object");
  }
  reject_unknown_keys(g, "graph", {"edges", "builtin"});
  if (g.contains("edges") == g.contains("builtin")) {
    throw InputError("graph: give exactly one of 'edges' or 'builtin'");
  }
  if (g.contains("builtin")) {
    const std::string name = g["builtin"].get<std::string>();
    if (name == "complete") return CommGraph::complete(n);
    if (name == "path") return CommGraph::path(n);
    if (name == "cycle") return CommGraph::cycle(n);
    if (name == "ieee123") {
      return CommGraph::from_edge_list_file(
          (data_dir() / "ieee123_edges.txt").string());
    }
    throw InputError("graph: unknown builtin '" + name + "'");
  }
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : g["edges"]) {
    if (!e.is_array() || e.size() != 2) {
      throw InputError("graph.edges: each entry must be a [u, v] pair");
    }
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return CommGraph::from_edges(n, std::move(edges));
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("scenario: ") + e.what());
  }
  if (!doc.is_object()) {
    throw InputError("scenario: top level must be an object");
  }
  reject_unknown_keys(doc, "scenario",
                      {"prosumers", "graph", "step_sizes", "eta", "tolerances",
                       "seed"});
  if (!doc.contains("prosumers") || !doc["prosumers"].is_array()) {
    throw InputError("scenario: 'prosumers' array is required");
  }
  if (!doc.contains("graph")) {
    throw InputError("scenario: 'graph' is required");
  }

  const auto& plist = doc["prosumers"];
  const int n = static_cast<int>(plist.size());
  Eigen::VectorXd a(n);
  std::vector<ProsumerParams> prosumers(n);
  for (int i = 0; i < n; ++i) {
    const std::string where = "prosumers[" + std::to_string(i) + "]";
    const auto& pj = plist[i];
    if (!pj.is_object()) {
      throw InputError(where + ": expected an object");
    }
    reject_unknown_keys(pj, where.c_str(),
                        {"a", "c", "d", "D", "p_min", "p_max"});
    a[i] = require_number(pj, where.c_str(), "a");
    prosumers[i].c = require_number(pj, where.c_str(), "c");
    prosumers[i].d = require_number(pj, where.c_str(), "d");
    prosumers[i].D = require_number(pj, where.c_str(), "D");
    prosumers[i].p_min = require_number(pj, where.c_str(), "p_min");
    prosumers[i].p_max = require_number(pj, where.c_str(), "p_max");
  }

  ScenarioConfig config;
  config.instance.market = MarketParams::make(a);
  config.instance.prosumers = std::move(prosumers);
  config.instance.graph = parse_graph(doc["graph"], n);
  config.instance.validate();

  config.step_sizes = default_step_sizes(config.instance.graph);
  if (doc.contains("step_sizes")) {
    const auto& sj = doc["step_sizes"];
    reject_unknown_keys(sj, "step_sizes", {"gamma", "sigma_z", "sigma_mu"});
    if (sj.contains("gamma")) {
      if (sj["gamma"].is_array()) {
        if (static_cast<int>(sj["gamma"].size()) != n) {
          throw InputError("step_sizes.gamma: length must match prosumers");
        }
        for (int i = 0; i < n; ++i) {
          config.step_sizes.gamma[i] = sj["gamma"][i].get<double>();
        }
      } else {
        config.step_sizes.gamma.setConstant(sj["gamma"].get<double>());
      }
    }
    if (sj.contains("sigma_z")) {
      config.step_sizes.sigma_z = sj["sigma_z"].get<double>();
    }
    if (sj.contains("sigma_mu")) {
      config.step_sizes.sigma_mu = sj["sigma_mu"].get<double>();
    }
  }
  if (doc.contains("eta")) {
    config.step_sizes.eta = doc["eta"].get<double>();
  }
  if (doc.contains("tolerances")) {
    const auto& tj = doc["tolerances"];
    reject_unknown_keys(tj, "tolerances", {"step", "consensus", "kkt"});
    if (tj.contains("step")) config.tolerances.step = tj["step"].get<double>();
    if (tj.contains("consensus")) {
      config.tolerances.consensus = tj["consensus"].get<double>();
    }
    if (tj.contains("kkt")) config.tolerances.kkt = tj["kkt"].get<double>();
  }
  if (doc.contains("seed")) {
    config.seed = doc["seed"].get<unsigned long>();
  }
  return config;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open scenario file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string canonical_scenario_json(const ScenarioConfig& config) {
  json doc;  // nlohmann::json keeps object keys sorted
  json plist = json::array();
  for (int i = 0; i < config.instance.n(); ++i) {
    const auto& pr = config.instance.prosumers[i];
    plist.push_back({{"a", config.instance.market.a[i]},
                     {"c", pr.c},
                     {"d", pr.d},
                     {"D", pr.D},
                     {"p_min", pr.p_min},
                     {"p_max", pr.p_max}});
  }
  doc["prosumers"] = std::move(plist);
  json edges = json::array();
  for (auto [u, v] : config.instance.graph.edges()) {
    edges.push_back({u, v});
  }
  doc["graph"] = {{"edges", std::move(edges)}};
  doc["step_sizes"] = {
      {"gamma", std::vector<double>(config.step_sizes.gamma.begin(),
                                    config.step_sizes.gamma.end())},
      {"sigma_z", config.step_sizes.sigma_z},
      {"sigma_mu", config.step_sizes.sigma_mu}};
  doc["eta"] = config.step_sizes.eta;
  doc["tolerances"] = {{"step", config.tolerances.step},
                       {"consensus", config.tolerances.consensus},
                       {"kkt", config.tolerances.kkt}};
  doc["seed"] = config.seed;
  return doc.dump(2) + "\n";
}

bool is_builtin_scenario(const std::string& name) {
  return name == "three_stage1" || name == "three_stage2" || name == "ieee123";
}

ScenarioConfig builtin_scenario(const std::string& name) {
  if (name == "three_stage1" || name == "three_stage2") {
    ScenarioConfig config;
    Eigen::VectorXd a = Eigen::VectorXd::Constant(3, -1000.0);
    config.instance.market = MarketParams::make(a);
    const double demand2 = name == "three_stage1" ? 365.0 : 0.0;
    const double c[3] = {0.00075, 0.0006, 0.001};
    const double D[3] = {730.0, demand2, 0.0};
    for (int i = 0; i < 3; ++i) {
      config.instance.prosumers.push_back({c[i], 0.0, D[i], 0.0, 1000.0});
    }
    config.instance.graph = CommGraph::cycle(3);
    config.step_sizes = default_step_sizes(config.instance.graph);
    return config;
  }
  if (name == "ieee123") {
    ScenarioConfig config;
    const int n = 123;
    Eigen::VectorXd a = Eigen::VectorXd::Constant(n, -0.1);
    config.instance.market = MarketParams::make(a);
    for (int i = 0; i < n; ++i) {
      // prosumer i carries bus number i+1
      config.instance.prosumers.push_back(
          {1.0 + (i + 1) / 123.0, 1.0, 1.0, 0.0, 5.0});
    }
    config.instance.graph = CommGraph::from_edge_list_file(
        (data_dir() / "ieee123_edges.txt").string());
    config.step_sizes = default_step_sizes(config.instance.graph);
    return config;
  }
  throw InputError("unknown builtin scenario '" + name + "'");
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("SGNE_DATA_DIR")) {
    return env;
  }
  return SGNE_DATA_DIR;
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot open trace file for writing: " + path);
  }
  out << "iter,res_step,res_kkt,consensus_gap,rel_err\n";
  out.precision(17);
  for (const auto& row : trace) {
    out << row.iter << ',' << row.res_step << ',' << row.res_kkt << ','
        << row.consensus_gap << ',' << row.rel_err << '\n';
  }
}

void write_report_json(const std::string& path, const SolveReport& report,
                       const std::string& method) {
  json doc;
  doc["method"] = method;
  doc["converged"] = report.stop_reason == StopReason::Converged;
  doc["iterations"] = report.iterations;
  doc["mu_c"] = report.mu_c;
  doc["p"] = std::vector<double>(report.p.begin(), report.p.end());
  doc["b"] = std::vector<double>(report.b.begin(), report.b.end());
  if (!report.trace.empty()) {
    const auto& last = report.trace.back();
    doc["residuals"] = {{"step", last.res_step},
                        {"kkt", last.res_kkt},
                        {"consensus_gap", last.consensus_gap}};
  }
  doc["messages_sent"] = report.messages_sent;
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot open report file for writing: " + path);
  }
  out << doc.dump(2) << "\n";
}

}  // namespace sgne
