#pragma once

#include <cstddef>
#include <vector>

namespace gvecf {

// Binary implicit-feedback matrix kept as per-user sorted item lists.
// Duplicate (user, item) pairs are ignored on insert.
class InteractionMatrix {
public:
    InteractionMatrix() = default;
    InteractionMatrix(std::size_t n_users, std::size_t n_items);

    std::size_t n_users() const { return n_users_; }
    std::size_t n_items() const { return n_items_; }
    std::size_t nnz() const { return nnz_; }

    // Inserts (u, i) keeping the user's list sorted; no-op when already present.
    void add(std::size_t u, std::size_t i);

    bool has(std::size_t u, std::size_t i) const;

    const std::vector<int>& items_of(std::size_t u) const;
    std::size_t user_degree(std::size_t u) const { return items_of(u).size(); }
    std::vector<std::size_t> item_degrees() const;

private:
    std::size_t n_users_ = 0;
    std::size_t n_items_ = 0;
    std::size_t nnz_ = 0;
    std::vector<std::vector<int>> items_;
};

}  // namespace gvecf
