#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"
#include "musyn/lti/plant.hpp"
#include "musyn/util/matrix_json.hpp"

namespace musyn::lti {

struct PlantFile {
  PartitionedPlant plant;
  std::optional<double> ts;  // recorded when the source data was continuous
};

/// Parses the plant JSON schema: keys A, Bw, Bd, Bu, Cv, Ce, Duv, Due as
/// row-major nested arrays plus optional "ts". Unknown keys are rejected so
/// that disturbance feedthrough blocks cannot sneak in unvalidated.
inline PlantFile plant_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("plant: expected JSON object");
  static const std::set<std::string> known = {"A",  "Bw", "Bd",  "Bu", "Cv",
                                              "Ce", "Duv", "Due", "ts"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ParseError("plant: unknown key '" + key + "'");
  for (const auto& key : {"A", "Bw", "Bd", "Bu", "Cv", "Ce", "Duv", "Due"})
    if (!j.contains(key)) throw ParseError(std::string("plant: missing key '") + key + "'");

  const Eigen::MatrixXd A = matrix_from_json(j.at("A"), "A");
  const Eigen::MatrixXd Bw = matrix_from_json(j.at("Bw"), "Bw");
  const Eigen::MatrixXd Bd = matrix_from_json(j.at("Bd"), "Bd");
  const Eigen::MatrixXd Bu = matrix_from_json(j.at("Bu"), "Bu");
  const Eigen::MatrixXd Cv = matrix_from_json(j.at("Cv"), "Cv");
  const Eigen::MatrixXd Ce = matrix_from_json(j.at("Ce"), "Ce");
  const Eigen::MatrixXd Duv = matrix_from_json(j.at("Duv"), "Duv");
  const Eigen::MatrixXd Due = matrix_from_json(j.at("Due"), "Due");

  PlantFile out;
  out.plant = PartitionedPlant(A, Bw, Bd, Bu, Cv, Ce, Duv, Due);
  if (j.contains("ts")) {
    if (!j.at("ts").is_number()) throw ParseError("plant: ts must be a number");
    out.ts = j.at("ts").get<double>();
    if (!(*out.ts > 0.0)) throw ParseError("plant: ts must be positive");
  }
  return out;
}

inline nlohmann::json plant_to_json(const PartitionedPlant& G,
                                    std::optional<double> ts = std::nullopt) {
  nlohmann::json j;
  j["A"] = matrix_to_json(G.A);
  j["Bw"] = matrix_to_json(G.Bw);
  j["Bd"] = matrix_to_json(G.Bd);
  j["Bu"] = matrix_to_json(G.Bu);
  j["Cv"] = matrix_to_json(G.Cv);
  j["Ce"] = matrix_to_json(G.Ce);
  j["Duv"] = matrix_to_json(G.Duv);
  j["Due"] = matrix_to_json(G.Due);
  if (ts) j["ts"] = *ts;
  return j;
}

inline PlantFile load_plant(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("plant: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("plant: invalid JSON in '" + path + "': " + ex.what());
  }
  return plant_from_json(j);
}

inline void save_plant(const std::string& path, const PartitionedPlant& G,
                       std::optional<double> ts = std::nullopt) {
  std::ofstream out(path);
  if (!out) throw Error("plant: cannot write '" + path + "'");
  out << plant_to_json(G, ts).dump(2) << "\n";
}

}  // namespace musyn::lti
