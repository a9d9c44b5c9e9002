#include "segchain/coupling_io.hpp"

#include "segchain/chain_io.hpp"
#include "segchain/errors.hpp"

namespace segchain {

using nlohmann::json;

namespace {

State label_at(const MarkovChain& chain, const json& v)
{
    if (!v.is_string())
        throw ParseError("state labels must be strings");
    return chain.index_of(v.get<std::string>());
}

PairState pair_at(const MarkovChain& chain, const json& v)
{
    if (!v.is_array() || v.size() != 2)
        throw ParseError("pair states must be two-element arrays");
    return {label_at(chain, v[0]), label_at(chain, v[1])};
}

JointKernel kernel_from(const MarkovChain& chain, const json& transitions)
{
    if (!transitions.is_array())
        throw ParseError("coupling transitions must be an array");
    const std::size_t n = chain.size();
    std::vector<std::vector<JointTransition>> rows(n * n);
    std::vector<bool> listed(n * n, false);
    for (auto& t : transitions) {
        if (!t.is_object() || !t.contains("from") || !t.contains("to") || !t.contains("p"))
            throw ParseError("coupling transition needs \"from\", \"to\" and \"p\"");
        auto from = pair_at(chain, t.at("from"));
        auto to = pair_at(chain, t.at("to"));
        if (!t.at("p").is_string())
            throw ParseError("\"p\" must be a string");
        rows[from.x * n + from.y].push_back({to.x, to.y, parse_rational(t.at("p").get<std::string>())});
        listed[from.x * n + from.y] = true;
    }
    JointKernel k = JointKernel::independent(chain);
    for (State a = 0; a < n; ++a)
        for (State b = 0; b < n; ++b)
            if (listed[a * n + b])
                k.set_row(a, b, std::move(rows[a * n + b]));
    return k;
}

json kernel_to(const MarkovChain& chain, const JointKernel& k)
{
    json out = json::array();
    for (State a = 0; a < chain.size(); ++a)
        for (State b = 0; b < chain.size(); ++b)
            for (auto& t : k.row(a, b))
                out.push_back({{"from", {chain.label(a), chain.label(b)}},
                               {"to", {chain.label(t.x), chain.label(t.y)}},
                               {"p", to_string(t.p)}});
    return out;
}

} // namespace

MarkovianCouplingKernel coupling_from_json(const json& doc)
{
    if (!doc.is_object() || !doc.contains("chain"))
        throw ParseError("coupling document needs a \"chain\" field");
    MarkovChain chain = chain_from_json(doc.at("chain"));
    if (doc.contains("steps")) {
        const json& steps = doc.at("steps");
        if (!steps.is_array())
            throw ParseError("\"steps\" must be an array of transition lists");
        std::vector<JointKernel> kernels;
        for (auto& s : steps)
            kernels.push_back(kernel_from(chain, s));
        return MarkovianCouplingKernel(std::move(chain), std::move(kernels));
    }
    if (!doc.contains("transitions"))
        throw ParseError("coupling document needs \"transitions\" or \"steps\"");
    JointKernel k = kernel_from(chain, doc.at("transitions"));
    return MarkovianCouplingKernel(std::move(chain), std::move(k));
}

json coupling_to_json(const MarkovianCouplingKernel& kernel)
{
    json doc{{"chain", chain_to_json(kernel.chain())}};
    if (kernel.time_homogeneous()) {
        doc["transitions"] = kernel_to(kernel.chain(), kernel.steps().front());
    } else {
        json steps = json::array();
        for (auto& k : kernel.steps())
            steps.push_back(kernel_to(kernel.chain(), k));
        doc["steps"] = std::move(steps);
    }
    return doc;
}

MarkovianCouplingKernel load_coupling(const std::filesystem::path& path)
{
    return coupling_from_json(load_document(path));
}

SeparatingSequence sequence_from_json(const json& doc, const MarkovChain& chain)
{
    if (!doc.is_array() || doc.empty())
        throw ParseError("a separating sequence is a non-empty array of label arrays");
    std::vector<StateSet> sets;
    for (auto& layer : doc) {
        if (!layer.is_array())
            throw ParseError("each A_t must be an array of state labels");
        StateSet s(chain.size());
        for (auto& label : layer)
            s.insert(label_at(chain, label));
        sets.push_back(std::move(s));
    }
    return SeparatingSequence(std::move(sets));
}

json sequence_to_json(const SeparatingSequence& seq, const MarkovChain& chain)
{
    json out = json::array();
    for (auto& s : seq.sets()) {
        json layer = json::array();
        for (State st : s.elements())
            layer.push_back(chain.label(st));
        out.push_back(std::move(layer));
    }
    return out;
}

} // namespace segchain
