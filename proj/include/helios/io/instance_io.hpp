#pragma once

// Instance documents: one JSON file for network, costs and tariffs; demand and capacity factors inline
// or as CSV files referenced by {"file": "..."} relative to the document.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "helios/core/json.hpp"
#include "helios/core/validate.hpp"
#include "helios/io/csv.hpp"

namespace helios::io {

namespace fs = std::filesystem;

struct InstancePaths {
  fs::path instance;
  std::optional<fs::path> demand;            // overrides the document's demand
  std::optional<fs::path> capacity_factors;  // overrides the document's capacity_factors
};

struct LoadedInstance {
  PlanningInstance instance;
  std::optional<CapacityFactorDataset> dataset;
  int first_year = 2025;
  std::vector<std::string> warnings;
};

inline std::string read_text(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) fail(ErrorCode::parse, p.string() + ": cannot open");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) fail(ErrorCode::validation, p.string() + ": cannot write");
  os << text;
}

// JSON with parse errors reported as file:line:column.
inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorCode::parse, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

inline CapacityFactorDataset load_capacity_factors(const fs::path& p, std::vector<std::string> sites = {}) {
  std::ifstream is(p);
  if (!is) fail(ErrorCode::parse, p.string() + ": cannot open");
  return read_capacity_factors(is, p.string(), std::move(sites));
}

// Decodes an instance document. `base` resolves relative file references.
inline LoadedInstance load_instance_document(json j, const fs::path& base, const std::string& source,
                                             const InstancePaths* overrides = nullptr) {
  if (!j.is_object()) fail(ErrorCode::schema, source + ": instance document must be an object");
  LoadedInstance out;
  if (j.contains("schema_version") && j["schema_version"] != kSchemaVersion)
    fail(ErrorCode::schema, source + ": unsupported schema_version " + j["schema_version"].dump());
  if (j.contains("time") && j["time"].is_object()) out.first_year = j["time"].value("first_year", 2025);

  std::optional<fs::path> demand_file = overrides ? overrides->demand : std::nullopt;
  std::optional<fs::path> cf_file = overrides ? overrides->capacity_factors : std::nullopt;
  if (!demand_file && j.contains("demand") && j["demand"].is_object() && j["demand"].contains("file"))
    demand_file = base / j["demand"]["file"].get<std::string>();
  if (demand_file || !j.contains("demand")) j["demand"] = DemandProfile{};
  if (!cf_file && j.contains("capacity_factors") && j["capacity_factors"].is_object() &&
      j["capacity_factors"].contains("file"))
    cf_file = base / j["capacity_factors"]["file"].get<std::string>();

  out.instance = decode<PlanningInstance>(j, source);
  auto& inst = out.instance;
  if (demand_file) {
    std::ifstream is(*demand_file);
    if (!is) fail(ErrorCode::parse, demand_file->string() + ": cannot open");
    inst.demand = read_demand(is, demand_file->string(), inst.network, inst.years(), out.first_year);
  } else if (!j.contains("demand") || j["demand"].value("sites", 0) == 0) {
    fail(ErrorCode::schema, source + ": demand missing");
  }
  if (cf_file) {
    out.dataset = load_capacity_factors(*cf_file);
  } else if (j.contains("capacity_factors") && j["capacity_factors"].is_object() &&
             j["capacity_factors"].contains("days")) {
    out.dataset = decode<CapacityFactorDataset>(j["capacity_factors"], source + " capacity_factors");
  }
  if (out.dataset)
    for (const auto& s : out.dataset->sites) {
      int n = inst.network.site_index(s);
      if (n < 0) fail(ErrorCode::schema, source + ": capacity factors for unknown site " + s);
      if (!inst.network.sites[n].solar_allowed)
        out.warnings.push_back("capacity factors given for site " + s + ", which may not host solar");
    }
  auto rep = validate_instance(inst);
  if (!rep.ok()) fail(ErrorCode::validation, source + ":\n" + rep.str());
  for (const auto& v : rep.items) out.warnings.push_back(v.path + ": " + v.message);
  return out;
}

inline LoadedInstance load_instance(const InstancePaths& paths) {
  const auto& p = paths.instance;
  return load_instance_document(parse_json(read_text(p), p.string()), p.parent_path(), p.string(), &paths);
}

inline LoadedInstance load_instance(const fs::path& p) { return load_instance(InstancePaths{p, {}, {}}); }

// Writes instance.json with demand.csv and capacity_factors.csv beside it.
inline void save_instance(const fs::path& dir, const PlanningInstance& inst, const CapacityFactorDataset* data,
                          int first_year = 2025) {
  fs::create_directories(dir);
  json j = inst;
  j["time"]["first_year"] = first_year;
  std::ostringstream dem;
  if (inst.demand.months == 12) {
    write_demand(dem, inst.demand, inst.network, first_year);
    write_text(dir / "demand.csv", dem.str());
    j["demand"] = {{"file", "demand.csv"}};
  }
  if (data) {
    std::ostringstream cf;
    write_capacity_factors(cf, *data);
    write_text(dir / "capacity_factors.csv", cf.str());
    j["capacity_factors"] = {{"file", "capacity_factors.csv"}};
  }
  write_text(dir / "instance.json", j.dump(2) + "\n");
}

}  // namespace helios::io
