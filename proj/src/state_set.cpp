#include "segchain/state_set.hpp"

#include "segchain/errors.hpp"

#include <algorithm>

namespace segchain {

StateSet::StateSet(std::size_t universe, bool full) : members_(universe, full) {}

StateSet StateSet::from_mask(std::size_t universe, std::uint64_t mask)
{
    if (universe > 64)
        throw DimensionMismatch("StateSet::from_mask: universe larger than 64");
    StateSet set(universe);
    for (std::size_t i = 0; i < universe; ++i)
        set.members_[i] = (mask >> i) & 1u;
    return set;
}

StateSet StateSet::of(std::size_t universe, std::initializer_list<State> members)
{
    StateSet set(universe);
    for (State s : members)
        set.members_.at(s) = true;
    return set;
}

std::size_t StateSet::count() const
{
    return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), true));
}

StateSet StateSet::complement() const
{
    StateSet out(*this);
    out.members_.flip();
    return out;
}

std::uint64_t StateSet::mask() const
{
    if (members_.size() > 64)
        throw DimensionMismatch("StateSet::mask: universe larger than 64");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < members_.size(); ++i)
        if (members_[i])
            m |= std::uint64_t{1} << i;
    return m;
}

std::vector<State> StateSet::elements() const
{
    std::vector<State> out;
    for (std::size_t i = 0; i < members_.size(); ++i)
        if (members_[i])
            out.push_back(i);
    return out;
}

} // namespace segchain
