#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gvecf/evaluator.hpp"
#include "gvecf/interaction.hpp"

namespace gvecf {

struct DatasetStats {
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::size_t n_interactions = 0;  // train + test
    double density = 0.0;            // interactions / (users * items)
};

struct DatasetSplit {
    std::string name;
    InteractionMatrix train;
    std::vector<std::vector<int>> test_items;  // per user, sorted, disjoint from train
    std::size_t dropped_test_users = 0;        // test lines for users absent from train

    DatasetStats stats() const;
    EvalSplit eval_view() const { return {&train, &test_items}; }
};

// Adjacency-list split format: one user per line, "user_id item_id item_id ...",
// whitespace separated. A bare user id is a valid zero-interaction line. Id
// spaces are unified across the two files; ids with gaps are remapped densely
// in ascending order. Test interactions of users absent from train are
// dropped and counted.
DatasetSplit load_split(const std::string& train_path, const std::string& test_path);

void write_split(const DatasetSplit& ds, const std::string& train_path,
                 const std::string& test_path);

// Planted-block bipartite graph: users and items are partitioned into
// n_blocks communities, with edge probability intra_p inside a community and
// inter_p across. Each user with at least two interactions holds out
// clamp(round(test_fraction * degree), 1, degree - 1) of them for testing.
DatasetSplit generate_synthetic(std::size_t n_users, std::size_t n_items, std::size_t n_blocks,
                                double intra_p, double inter_p, double test_fraction,
                                std::uint64_t seed);

}  // namespace gvecf
