#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sbg/flatten.hpp"
#include "sbg/graph_io.hpp"
#include "sbg/oracle.hpp"

namespace {

using namespace sbg;

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Params parseParams(const std::vector<std::string>& defs) {
  Params params;
  for (const auto& def : defs) {
    std::size_t eq = def.find('=');
    std::string usage = "bad --param '" + def + "'; expected NAME=VALUE";
    if (eq == std::string::npos || eq == 0) throw ModelError(usage);
    errno = 0;
    char* endp = nullptr;
    long long v = std::strtoll(def.c_str() + eq + 1, &endp, 10);
    if (errno == ERANGE || endp != def.c_str() + def.size() ||
        eq + 1 == def.size())
      throw ModelError(usage);
    params[def.substr(0, eq)] = v;
  }
  return params;
}

nlohmann::json setJson(const IntervalSet& s) {
  nlohmann::json boxes = nlohmann::json::array();
  for (const auto& box : s.pieces()) {
    nlohmann::json b = nlohmann::json::array();
    for (int j = 0; j < box.dim(); ++j)
      b.push_back({box.start()[j], box.step()[j], box.end()[j]});
    boxes.push_back(std::move(b));
  }
  return boxes;
}

nlohmann::json mapJson(const PWLMap& m) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : m.pieces()) {
    nlohmann::json gain = nlohmann::json::array();
    nlohmann::json off = nlohmann::json::array();
    for (const auto& r : p.fn.gain) gain.push_back(ratStr(r));
    for (const auto& r : p.fn.offset) off.push_back(ratStr(r));
    pieces.push_back({{"dom", setJson(p.dom)},
                      {"gain", std::move(gain)},
                      {"offset", std::move(off)}});
  }
  return pieces;
}

nlohmann::json statsJson(const ConnectStats& st) {
  return {{"iterations", st.iterations},
          {"passes", st.passes},
          {"pieces", st.finalPieces}};
}

void printStats(const ConnectStats& st) {
  std::cout << "iterations " << st.iterations << "\n"
            << "passes " << st.passes << "\n"
            << "pieces " << st.finalPieces << "\n";
}

void oracleCheck(const SBGraph& g, const PWLMap& rmap,
                 unsigned long long limit, int& exitCode) {
  try {
    OracleCheck check = checkAgainstOracle(g, rmap, limit);
    if (check.ok()) {
      std::cout << "oracle check: ok (" << check.checked << " points)\n";
    } else {
      std::cerr << "oracle check failed:\n" << check.str();
      exitCode = 2;
    }
  } catch (const PieceLimitError&) {
    std::cerr << "oracle check skipped: expansion exceeds " << limit
              << " points\n";
  }
}

int cmdConnect(const std::string& file, bool stats, long long check,
               bool json) {
  SBGraph g = parseGraphFile(readFile(file));
  ValidationReport rep = validate(g);
  if (!rep.ok()) throw ModelError("graph validation failed:\n" + rep.str());
  ConnectResult res = connectComp(g);
  int exitCode = 0;
  if (json) {
    nlohmann::json doc;
    doc["graph"] = nlohmann::json::parse(graphJson(g));
    doc["rmap"] = mapJson(res.rmap);
    doc["stats"] = statsJson(res.stats);
    std::cout << doc.dump(2) << "\n";
  } else {
    std::string body = res.rmap.str();
    if (!body.empty()) std::cout << body << "\n";
    if (stats) printStats(res.stats);
  }
  if (check >= 0)
    oracleCheck(g, res.rmap, static_cast<unsigned long long>(check), exitCode);
  return exitCode;
}

int cmdFlatten(const std::string& file, const std::vector<std::string>& defs,
               bool emitGraph, bool emitMap, bool stats, bool json) {
  ConnectModel model = parseModel(readFile(file));
  FlattenOutput out = flattenModel(model, parseParams(defs));
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
  if (json) {
    nlohmann::json doc;
    doc["graph"] = nlohmann::json::parse(graphJson(out.graph));
    doc["rmap"] = mapJson(out.components.rmap);
    doc["stats"] = statsJson(out.components.stats);
    doc["equations"] = out.equations.str();
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  if (emitGraph) std::cout << printGraphFile(out.graph);
  if (emitMap) {
    std::string body = out.components.rmap.str();
    if (!body.empty()) std::cout << body << "\n";
  }
  if (!emitGraph && !emitMap) {
    std::string body = out.equations.str();
    if (!body.empty()) std::cout << body;
  }
  if (stats) printStats(out.components.stats);
  return 0;
}

int cmdBench(const std::string& file, const std::string& sweep,
             const std::vector<std::string>& defs) {
  std::size_t eq = sweep.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == sweep.size())
    throw ModelError("bad --param-sweep '" + sweep +
                     "'; expected NAME=V1,V2,...");
  std::string name = sweep.substr(0, eq);
  std::vector<long long> values;
  std::size_t pos = eq + 1;
  while (pos <= sweep.size()) {
    std::size_t comma = sweep.find(',', pos);
    std::string item = sweep.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    errno = 0;
    char* endp = nullptr;
    long long v = std::strtoll(item.c_str(), &endp, 10);
    if (item.empty() || errno == ERANGE || endp != item.c_str() + item.size())
      throw ModelError("bad sweep value '" + item + "'");
    values.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }

  ConnectModel model = parseModel(readFile(file));
  Params base = parseParams(defs);
  std::cout << name << " iterations pieces wall_ms\n";
  for (long long v : values) {
    Params params = base;
    params[name] = v;
    // Timing is the minimum over three runs; the first run also supplies
    // the reported stats.
    std::optional<FlattenOutput> out;
    double best = 0;
    for (int rep = 0; rep < 3; ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      FlattenOutput run = flattenModel(model, params);
      auto t1 = std::chrono::steady_clock::now();
      double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      if (rep == 0 || ms < best) best = ms;
      if (rep == 0) out = std::move(run);
    }
    for (const auto& w : out->warnings) std::cerr << "warning: " << w << "\n";
    std::ostringstream ms;
    ms.setf(std::ios::fixed);
    ms.precision(3);
    ms << best;
    std::cout << v << " " << out->components.stats.iterations << " "
              << out->components.stats.finalPieces << " " << ms.str() << "\n";
  }
  return 0;
}

void applyPieceLimitEnv() {
  const char* env = std::getenv("SBG_PIECE_LIMIT");
  if (!env) return;
  errno = 0;
  char* endp = nullptr;
  unsigned long long v = std::strtoull(env, &endp, 10);
  if (*env == '\0' || errno == ERANGE || *endp != '\0' || v == 0) {
    std::cerr << "warning: ignoring invalid SBG_PIECE_LIMIT '" << env << "'\n";
    return;
  }
  setPieceLimit(v);
}

} // namespace

int main(int argc, char** argv) {
  applyPieceLimitEnv();

  CLI::App app{"Set-based graph connected components and model flattening"};
  app.require_subcommand(1);

  std::string connectFile;
  bool connectStats = false, connectJson = false;
  long long connectCheck = -1;
  auto* connect = app.add_subcommand(
      "connect", "Connected components of a graph file");
  connect->add_option("graph-file", connectFile)->required();
  connect->add_flag("--stats", connectStats, "print iteration statistics");
  connect->add_option("--check", connectCheck,
                      "verify against enumeration when at most N points");
  connect->add_flag("--json", connectJson, "machine-readable output");

  std::string flattenFile;
  std::vector<std::string> flattenDefs;
  bool emitGraph = false, emitMap = false, flattenStats = false,
       flattenJson = false;
  auto* flatten = app.add_subcommand(
      "flatten", "Flatten a connect model into equations");
  flatten->add_option("model-file", flattenFile)->required();
  flatten->add_option("--param", flattenDefs, "bind a parameter, NAME=VALUE");
  flatten->add_flag("--emit-graph", emitGraph,
                    "print the intermediate graph instead of equations");
  flatten->add_flag("--emit-map", emitMap,
                    "print the representative map instead of equations");
  flatten->add_flag("--stats", flattenStats, "print iteration statistics");
  flatten->add_flag("--json", flattenJson, "machine-readable output");

  std::string benchFile, benchSweep;
  std::vector<std::string> benchDefs;
  auto* bench = app.add_subcommand(
      "bench", "Sweep one parameter and tabulate iterations/pieces/time");
  bench->add_option("model-file", benchFile)->required();
  bench->add_option("--param-sweep", benchSweep, "NAME=V1,V2,...")->required();
  bench->add_option("--param", benchDefs, "bind another parameter");

  CLI11_PARSE(app, argc, argv);

  try {
    if (connect->parsed())
      return cmdConnect(connectFile, connectStats, connectCheck, connectJson);
    if (flatten->parsed())
      return cmdFlatten(flattenFile, flattenDefs, emitGraph, emitMap,
                        flattenStats, flattenJson);
    return cmdBench(benchFile, benchSweep, benchDefs);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const UnboundParamError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const PieceLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const OverflowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    // ModelError, PreconditionError, DomainError, DimensionError.
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
