#include "segchain/chain_io.hpp"

#include "segchain/errors.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace segchain {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key)
{
    if (!doc.is_object() || !doc.contains(key))
        throw ParseError(std::string("missing field \"") + key + "\"");
    return doc.at(key);
}

std::string require_string(const json& value, const char* what)
{
    if (!value.is_string())
        throw ParseError(std::string(what) + " must be a string");
    return value.get<std::string>();
}

} // namespace

json chain_to_json(const MarkovChain& chain)
{
    json doc;
    doc["states"] = chain.states();
    json transitions = json::array();
    for (State s = 0; s < chain.size(); ++s)
        for (auto& t : chain.row(s))
            transitions.push_back(
                {{"from", chain.label(s)}, {"to", chain.label(t.to)}, {"p", to_string(t.p)}});
    doc["transitions"] = std::move(transitions);
    return doc;
}

MarkovChain chain_from_json(const json& doc)
{
    const json& states = require(doc, "states");
    if (!states.is_array())
        throw ParseError("\"states\" must be an array of labels");
    std::vector<std::string> labels;
    std::unordered_map<std::string, State> index;
    for (auto& s : states) {
        labels.push_back(require_string(s, "state label"));
        if (!index.emplace(labels.back(), labels.size() - 1).second)
            throw ParseError("duplicate state label \"" + labels.back() + "\"");
    }

    const json& transitions = require(doc, "transitions");
    if (!transitions.is_array())
        throw ParseError("\"transitions\" must be an array");
    auto lookup = [&](const json& v) {
        auto label = require_string(v, "transition endpoint");
        auto it = index.find(label);
        if (it == index.end())
            throw ParseError("transition refers to unknown state \"" + label + "\"");
        return it->second;
    };

    std::vector<std::vector<Transition>> rows(labels.size());
    for (auto& t : transitions) {
        State from = lookup(require(t, "from"));
        State to = lookup(require(t, "to"));
        Rational p = parse_rational(require_string(require(t, "p"), "\"p\""));
        rows[from].push_back({to, p});
    }
    return MarkovChain(std::move(labels), std::move(rows));
}

json parse_document(std::istream& in)
{
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed document: ") + e.what());
    }
}

json load_document(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    return parse_document(in);
}

MarkovChain read_chain(std::istream& in)
{
    return chain_from_json(parse_document(in));
}

MarkovChain load_chain(const std::filesystem::path& path)
{
    return chain_from_json(load_document(path));
}

void write_chain(std::ostream& out, const MarkovChain& chain)
{
    out << chain_to_json(chain).dump(2) << '\n';
}

json designation_to_json(const Designation& d)
{
    return json{{"designated", d.designated}, {"params", d.params}};
}

Designation designation_from_json(const json& doc)
{
    Designation d;
    try {
        if (doc.contains("designated"))
            d.designated = doc.at("designated").get<std::map<std::string, std::string>>();
        if (doc.contains("params"))
            d.params = doc.at("params").get<std::map<std::string, std::string>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed designation sidecar: ") + e.what());
    }
    return d;
}

std::filesystem::path sidecar_path(const std::filesystem::path& chain_file)
{
    auto p = chain_file;
    p.replace_extension(".designated.json");
    return p;
}

} // namespace segchain
