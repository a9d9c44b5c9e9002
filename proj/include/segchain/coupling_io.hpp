#pragma once

#include "segchain/coupling.hpp"
#include "segchain/separation.hpp"

#include "json.hpp"

#include <filesystem>

namespace segchain {

// Coupling document:
//   {"chain": <chain document>,
//    "transitions": [{"from": ["a", "b"], "to": ["c", "d"], "p": "1/2"}, ...]}
// or, for one kernel per step, "steps": [[<transition>, ...], ...].
// Pair states with no listed transitions move as the independent product.
MarkovianCouplingKernel coupling_from_json(const nlohmann::json& doc);
nlohmann::json coupling_to_json(const MarkovianCouplingKernel& kernel);
MarkovianCouplingKernel load_coupling(const std::filesystem::path& path);

// Separating-sequence document: one array of state labels per time.
SeparatingSequence sequence_from_json(const nlohmann::json& doc, const MarkovChain& chain);
nlohmann::json sequence_to_json(const SeparatingSequence& seq, const MarkovChain& chain);

} // namespace segchain
