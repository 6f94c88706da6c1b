#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "qcmi/channels.hpp"
#include "qcmi/entropy.hpp"
#include "qcmi/experiments.hpp"
#include "qcmi/markov.hpp"
#include "qcmi/states.hpp"

namespace qcmi {

// JSON state format:
//   {"subsystems":[{"label":"B","dim":2},...],
//    "matrix_re":[[...],...], "matrix_im":[[...],...]}   (row-major)
// Channels add "input" and "output" subsystem blocks and store the Choi
// matrix in matrix_re / matrix_im.

nlohmann::json to_json(const MultipartiteState& s);
MultipartiteState state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Channel& ch);
Channel channel_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OptimizerResult& r);
nlohmann::json to_json(const EntropyReport& r);
nlohmann::json to_json(const ClassicalExampleReport& r);
nlohmann::json to_json(const SuiteReport& r);

/// Finite numbers pass through; infinities become null and set
/// `<key>_infinite` to true beside them.
void put_number(nlohmann::json& obj, const std::string& key, double value);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

MultipartiteState load_state(const std::filesystem::path& path);
Channel load_channel(const std::filesystem::path& path);

}  // namespace qcmi
