#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace segchain {

using State = std::size_t;

enum class Execution { serial, parallel };

// Subset of a chain's dense state indices {0, ..., universe-1}.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(std::size_t universe, bool full = false);

    static StateSet from_mask(std::size_t universe, std::uint64_t mask);
    static StateSet of(std::size_t universe, std::initializer_list<State> members);

    std::size_t universe() const { return members_.size(); }
    bool contains(State s) const { return members_[s]; }
    void insert(State s) { members_[s] = true; }
    void erase(State s) { members_[s] = false; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }

    StateSet complement() const;
    // Requires universe() <= 64.
    std::uint64_t mask() const;
    std::vector<State> elements() const;

    friend bool operator==(const StateSet&, const StateSet&) = default;

private:
    std::vector<bool> members_;
};

} // namespace segchain
