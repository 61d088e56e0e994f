#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgmi/core/error.hpp"
#include "cgmi/model/classifier.hpp"

namespace cgmi::model {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ClassifierParams params;
  std::vector<std::string> genders;
  std::vector<std::string> vocab;  ///< softmax support in model order
  std::uint64_t vocab_hash = 0;
  nlohmann::json metadata = nlohmann::json::object();
};

inline nlohmann::json to_json(const Checkpoint& c) {
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(c.vocab_hash));
  return {
      {"format", "cgmi-classifier"},
      {"version", kCheckpointVersion},
      {"hidden", c.params.hidden},
      {"adjective_dim", c.params.adjective_dim},
      {"noun_dim", c.params.noun_dim},
      {"genders", c.genders},
      {"activation", to_string(c.params.activation)},
      {"weights", c.params.weights},
      {"vocab", c.vocab},
      {"vocab_hash", hash},
      {"metadata", c.metadata},
  };
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "cgmi-classifier") throw ConfigError("not a classifier checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion) throw ConfigError("unsupported checkpoint version");
    Checkpoint c;
    c.genders = j.at("genders").get<std::vector<std::string>>();
    c.params.hidden = j.at("hidden").get<std::size_t>();
    c.params.adjective_dim = j.at("adjective_dim").get<std::size_t>();
    c.params.noun_dim = j.at("noun_dim").get<std::size_t>();
    c.params.genders = c.genders.size();
    c.params.activation = parse_activation(j.at("activation").get<std::string>());
    c.params.weights = j.at("weights").get<std::vector<double>>();
    c.vocab = j.at("vocab").get<std::vector<std::string>>();
    c.vocab_hash = std::stoull(j.at("vocab_hash").get<std::string>(), nullptr, 16);
    if (j.contains("metadata")) c.metadata = j.at("metadata");
    c.params.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace cgmi::model
