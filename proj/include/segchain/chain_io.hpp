#pragma once

#include "segchain/chain.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace segchain {

// Chain document:
//   {"states": ["a", "b"],
//    "transitions": [{"from": "a", "to": "b", "p": "1/2"}, ...]}
// Missing pairs have probability 0; "p" is "num/den" or an integer string.
nlohmann::json chain_to_json(const MarkovChain& chain);
MarkovChain chain_from_json(const nlohmann::json& doc);

MarkovChain read_chain(std::istream& in);
MarkovChain load_chain(const std::filesystem::path& path);
void write_chain(std::ostream& out, const MarkovChain& chain);

// Parses a document from text; any JSON syntax error becomes ParseError.
nlohmann::json parse_document(std::istream& in);
nlohmann::json load_document(const std::filesystem::path& path);

// Sidecar written next to zoo chains: named states and construction
// parameters, all as strings.
//   {"designated": {"x": "x", "y": "y", ...}, "params": {"p": "7/10"}}
struct Designation {
    std::map<std::string, std::string> designated;
    std::map<std::string, std::string> params;
};

nlohmann::json designation_to_json(const Designation& d);
Designation designation_from_json(const nlohmann::json& doc);

// "<stem>.designated.json" next to a chain file "<stem>.json".
std::filesystem::path sidecar_path(const std::filesystem::path& chain_file);

} // namespace segchain
