#include "gvecf/interaction.hpp"

#include <algorithm>
#include <stdexcept>

namespace gvecf {

InteractionMatrix::InteractionMatrix(std::size_t n_users, std::size_t n_items)
    : n_users_(n_users), n_items_(n_items), items_(n_users) {}

void InteractionMatrix::add(std::size_t u, std::size_t i) {
    if (u >= n_users_ || i >= n_items_) {
        throw std::out_of_range("InteractionMatrix::add: index out of range");
    }
    auto& list = items_[u];
    const auto it = std::lower_bound(list.begin(), list.end(), static_cast<int>(i));
    if (it != list.end() && *it == static_cast<int>(i)) {
        return;
    }
    list.insert(it, static_cast<int>(i));
    ++nnz_;
}

bool InteractionMatrix::has(std::size_t u, std::size_t i) const {
    if (u >= n_users_ || i >= n_items_) {
        return false;
    }
    const auto& list = items_[u];
    return std::binary_search(list.begin(), list.end(), static_cast<int>(i));
}

const std::vector<int>& InteractionMatrix::items_of(std::size_t u) const {
    if (u >= n_users_) {
        throw std::out_of_range("InteractionMatrix::items_of: user out of range");
    }
    return items_[u];
}

std::vector<std::size_t> InteractionMatrix::item_degrees() const {
    std::vector<std::size_t> degrees(n_items_, 0);
    for (const auto& list : items_) {
        for (int i : list) {
            ++degrees[static_cast<std::size_t>(i)];
        }
    }
    return degrees;
}

}  // namespace gvecf
