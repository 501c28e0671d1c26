#include "gvecf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gvecf/rng.hpp"

namespace gvecf {

DatasetStats DatasetSplit::stats() const {
    DatasetStats s;
    s.n_users = train.n_users();
    s.n_items = train.n_items();
    s.n_interactions = train.nnz();
    for (const auto& items : test_items) {
        s.n_interactions += items.size();
    }
    if (s.n_users > 0 && s.n_items > 0) {
        s.density = static_cast<double>(s.n_interactions) /
                    (static_cast<double>(s.n_users) * static_cast<double>(s.n_items));
    }
    return s;
}

namespace {

struct RawLine {
    long long user = 0;
    std::vector<long long> items;
};

std::vector<RawLine> parse_adjacency_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_split: cannot open " + path);
    }
    std::vector<RawLine> lines;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;  // blank line
        }
        std::istringstream row(text);
        RawLine parsed;
        std::string token;
        bool first = true;
        while (row >> token) {
            long long value = 0;
            std::size_t consumed = 0;
            try {
                value = std::stoll(token, &consumed);
            } catch (const std::exception&) {
                consumed = 0;
            }
            if (consumed != token.size() || value < 0) {
                std::ostringstream msg;
                msg << "load_split: malformed token '" << token << "' at " << path << ":"
                    << line_no;
                throw std::runtime_error(msg.str());
            }
            if (first) {
                parsed.user = value;
                first = false;
            } else {
                parsed.items.push_back(value);
            }
        }
        lines.push_back(std::move(parsed));
    }
    return lines;
}

}  // namespace

DatasetSplit load_split(const std::string& train_path, const std::string& test_path) {
    const std::vector<RawLine> train_lines = parse_adjacency_file(train_path);
    const std::vector<RawLine> test_lines = parse_adjacency_file(test_path);
    if (train_lines.empty()) {
        throw std::runtime_error("load_split: train file has no interactions: " + train_path);
    }

    // Users are defined by the train file; test-only users are dropped.
    std::map<long long, std::size_t> user_ids;
    for (const auto& line : train_lines) {
        user_ids.emplace(line.user, 0);
    }
    std::map<long long, std::size_t> item_ids;
    for (const auto& line : train_lines) {
        for (long long i : line.items) {
            item_ids.emplace(i, 0);
        }
    }
    std::size_t dropped = 0;
    for (const auto& line : test_lines) {
        if (!user_ids.contains(line.user)) {
            ++dropped;
            continue;
        }
        for (long long i : line.items) {
            item_ids.emplace(i, 0);
        }
    }
    // Dense re-indexing in ascending id order (identity when ids are dense).
    std::size_t next = 0;
    for (auto& [id, idx] : user_ids) {
        idx = next++;
    }
    next = 0;
    for (auto& [id, idx] : item_ids) {
        idx = next++;
    }

    DatasetSplit ds;
    ds.dropped_test_users = dropped;
    ds.train = InteractionMatrix(user_ids.size(), item_ids.size());
    for (const auto& line : train_lines) {
        const std::size_t u = user_ids.at(line.user);
        for (long long i : line.items) {
            ds.train.add(u, item_ids.at(i));
        }
    }
    ds.test_items.assign(user_ids.size(), {});
    for (const auto& line : test_lines) {
        const auto it = user_ids.find(line.user);
        if (it == user_ids.end()) {
            continue;
        }
        auto& list = ds.test_items[it->second];
        for (long long i : line.items) {
            const std::size_t item = item_ids.at(i);
            if (!ds.train.has(it->second, item)) {  // keep train and test disjoint
                list.push_back(static_cast<int>(item));
            }
        }
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return ds;
}

void write_split(const DatasetSplit& ds, const std::string& train_path,
                 const std::string& test_path) {
    std::ofstream train_out(train_path);
    if (!train_out) {
        throw std::runtime_error("write_split: cannot open " + train_path);
    }
    for (std::size_t u = 0; u < ds.train.n_users(); ++u) {
        train_out << u;
        for (int i : ds.train.items_of(u)) {
            train_out << ' ' << i;
        }
        train_out << '\n';
    }
    std::ofstream test_out(test_path);
    if (!test_out) {
        throw std::runtime_error("write_split: cannot open " + test_path);
    }
    for (std::size_t u = 0; u < ds.test_items.size(); ++u) {
        if (ds.test_items[u].empty()) {
            continue;
        }
        test_out << u;
        for (int i : ds.test_items[u]) {
            test_out << ' ' << i;
        }
        test_out << '\n';
    }
}

DatasetSplit generate_synthetic(std::size_t n_users, std::size_t n_items, std::size_t n_blocks,
                                double intra_p, double inter_p, double test_fraction,
                                std::uint64_t seed) {
    if (n_users == 0 || n_items == 0 || n_blocks == 0) {
        throw std::invalid_argument("generate_synthetic: sizes must be positive");
    }
    if (!(intra_p >= 0.0 && intra_p <= 1.0) || !(inter_p >= 0.0 && inter_p <= 1.0)) {
        throw std::invalid_argument("generate_synthetic: probabilities must lie in [0, 1]");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("generate_synthetic: test_fraction must lie in (0, 1)");
    }

    Rng rng(seed);
    const auto user_block = [&](std::size_t u) { return u * n_blocks / n_users; };
    const auto item_block = [&](std::size_t i) { return i * n_blocks / n_items; };

    std::vector<std::vector<int>> edges(n_users);
    std::size_t total_edges = 0;
    for (std::size_t u = 0; u < n_users; ++u) {
        for (std::size_t i = 0; i < n_items; ++i) {
            const double p = user_block(u) == item_block(i) ? intra_p : inter_p;
            if (rng.uniform() < p) {
                edges[u].push_back(static_cast<int>(i));
                ++total_edges;
            }
        }
    }
    if (total_edges == 0) {
        throw std::runtime_error("generate_synthetic: parameters yield an empty graph");
    }

    DatasetSplit ds;
    ds.name = "synthetic";
    ds.train = InteractionMatrix(n_users, n_items);
    ds.test_items.assign(n_users, {});
    for (std::size_t u = 0; u < n_users; ++u) {
        auto& items = edges[u];
        const std::size_t deg = items.size();
        std::size_t n_test = 0;
        if (deg >= 2) {
            const auto want = static_cast<std::size_t>(
                std::llround(test_fraction * static_cast<double>(deg)));
            n_test = std::clamp<std::size_t>(want, 1, deg - 1);
        }
        // Partial Fisher-Yates: the first n_test positions become the holdout.
        for (std::size_t pos = 0; pos < n_test; ++pos) {
            const std::size_t pick = pos + rng.uniform_index(deg - pos);
            std::swap(items[pos], items[pick]);
        }
        auto& test = ds.test_items[u];
        test.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n_test));
        std::sort(test.begin(), test.end());
        for (std::size_t pos = n_test; pos < deg; ++pos) {
            ds.train.add(u, static_cast<std::size_t>(items[pos]));
        }
    }
    return ds;
}

}  // namespace gvecf
