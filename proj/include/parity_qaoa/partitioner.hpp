#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "parity_qaoa/errors.hpp"
#include "parity_qaoa/problem_model.hpp"

namespace parity_qaoa {

/// Inclusive rectangle of grid cells.
struct ModuleBounds {
    int row0 = 0;
    int col0 = 0;
    int row1 = 0;
    int col1 = 0;

    bool contains(GridPos p) const {
        return p.row >= row0 && p.row <= row1 && p.col >= col0 && p.col <= col1;
    }
    bool operator==(const ModuleBounds &) const = default;
};

/// Split of the layout's constraints into explicitly enforced and implicitly preserved sets.
class ConstraintPartition {
   public:
    static ConstraintPartition create(const ParityLayout &layout, std::vector<int> explicit_ids,
                                      std::optional<int> l_max = std::nullopt,
                                      std::vector<ModuleBounds> modules = {}) {
        std::size_t total = layout.constraints().size();
        std::sort(explicit_ids.begin(), explicit_ids.end());
        if (std::adjacent_find(explicit_ids.begin(), explicit_ids.end()) != explicit_ids.end()) {
            throw InvalidArgument("explicit constraint listed twice");
        }
        ConstraintPartition p;
        p.is_explicit_.assign(total, false);
        for (int id : explicit_ids) {
            if (id < 0 || static_cast<std::size_t>(id) >= total) {
                throw InvalidArgument("explicit constraint id out of range: " + std::to_string(id));
            }
            p.is_explicit_[static_cast<std::size_t>(id)] = true;
        }
        for (std::size_t id = 0; id < total; id++) {
            if (!p.is_explicit_[id]) {
                p.implicit_.push_back(static_cast<int>(id));
            }
        }
        p.explicit_ = std::move(explicit_ids);
        p.l_max_ = l_max;
        p.modules_ = std::move(modules);
        if (!p.modules_.empty()) {
            for (const auto &m : p.modules_) {
                if (l_max && (m.row1 - m.row0 + 1 > *l_max || m.col1 - m.col0 + 1 > *l_max)) {
                    throw InvalidArgument("module larger than l_max");
                }
            }
            for (int id : p.implicit_) {
                if (p.module_index_of_constraint(layout, id) < 0) {
                    throw InvalidArgument("implicit constraint " + std::to_string(id) + " crosses a module boundary");
                }
            }
        }
        return p;
    }

    const std::vector<int> &explicit_ids() const {
        return explicit_;
    }
    const std::vector<int> &implicit_ids() const {
        return implicit_;
    }
    bool is_explicit(int constraint_id) const {
        return is_explicit_[static_cast<std::size_t>(constraint_id)];
    }
    /// n_C
    std::size_t n_explicit() const {
        return explicit_.size();
    }
    /// n_C^tot
    std::size_t n_total() const {
        return is_explicit_.size();
    }
    /// n_r = n_C / n_C^tot (0 for a layout without constraints).
    double ratio() const {
        return n_total() == 0 ? 0.0 : static_cast<double>(n_explicit()) / static_cast<double>(n_total());
    }
    std::optional<int> l_max() const {
        return l_max_;
    }
    const std::vector<ModuleBounds> &modules() const {
        return modules_;
    }

    /// Module index holding every qubit of the constraint, or -1. Without modules the whole layout is module 0.
    int module_index_of_constraint(const ParityLayout &layout, int constraint_id) const {
        if (modules_.empty()) {
            return 0;
        }
        const auto &qs = layout.constraint(constraint_id).qubits;
        int m = module_index_of_qubit(layout, qs.front());
        for (int q : qs) {
            if (module_index_of_qubit(layout, q) != m) {
                return -1;
            }
        }
        return m;
    }
    int module_index_of_qubit(const ParityLayout &layout, int qubit) const {
        if (modules_.empty()) {
            return 0;
        }
        for (std::size_t i = 0; i < modules_.size(); i++) {
            if (modules_[i].contains(layout.qubit(qubit).pos)) {
                return static_cast<int>(i);
            }
        }
        return -1;
    }
    std::size_t module_count() const {
        return modules_.empty() ? 1 : modules_.size();
    }

    bool operator==(const ConstraintPartition &) const = default;

   private:
    std::vector<int> explicit_;
    std::vector<int> implicit_;
    std::vector<bool> is_explicit_;
    std::optional<int> l_max_;
    std::vector<ModuleBounds> modules_;
};

inline ConstraintPartition partition_all_explicit(const ParityLayout &layout) {
    std::vector<int> ids;
    for (const auto &c : layout.constraints()) {
        ids.push_back(c.id);
    }
    return ConstraintPartition::create(layout, std::move(ids));
}

inline ConstraintPartition partition_all_implicit(const ParityLayout &layout) {
    return ConstraintPartition::create(layout, {});
}

namespace detail {

/// Constraints on edge-adjacent plaquettes, ascending id.
inline std::vector<int> plaquette_neighbors(const ParityLayout &layout, int constraint_id) {
    GridPos o = layout.plaquette_origin(constraint_id);
    std::vector<int> out;
    for (auto [dr, dc] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
        int n = layout.constraint_at({o.row + dr, o.col + dc});
        if (n >= 0) {
            out.push_back(n);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// A constraint touches the layout boundary when some edge-adjacent plaquette carries no constraint.
inline bool on_boundary(const ParityLayout &layout, int constraint_id) {
    return plaquette_neighbors(layout, constraint_id).size() < 4;
}

}  // namespace detail

/// All three-body constraints explicit, plus shortest chains that tie isolated
/// explicit groups to the layout boundary.
inline ConstraintPartition partition_three_body_explicit(const ParityLayout &layout) {
    std::size_t n = layout.constraints().size();
    std::vector<bool> expl(n, false);
    for (const auto &c : layout.constraints()) {
        if (c.kind == ConstraintKind::three_body) {
            expl[static_cast<std::size_t>(c.id)] = true;
        }
    }

    // grounded: explicit and connected through explicit constraints to a boundary constraint.
    std::vector<bool> grounded(n, false);
    auto flood_ground = [&](int start) {
        std::deque<int> queue{start};
        grounded[static_cast<std::size_t>(start)] = true;
        while (!queue.empty()) {
            int c = queue.front();
            queue.pop_front();
            for (int nb : detail::plaquette_neighbors(layout, c)) {
                if (expl[static_cast<std::size_t>(nb)] && !grounded[static_cast<std::size_t>(nb)]) {
                    grounded[static_cast<std::size_t>(nb)] = true;
                    queue.push_back(nb);
                }
            }
        }
    };
    for (std::size_t c = 0; c < n; c++) {
        if (expl[c] && !grounded[c] && detail::on_boundary(layout, static_cast<int>(c))) {
            flood_ground(static_cast<int>(c));
        }
    }

    for (std::size_t start = 0; start < n; start++) {
        if (!expl[start] || grounded[start]) {
            continue;
        }
        // Collect the isolated group containing `start`.
        std::vector<int> group;
        {
            std::vector<bool> seen(n, false);
            std::deque<int> queue{static_cast<int>(start)};
            seen[start] = true;
            while (!queue.empty()) {
                int c = queue.front();
                queue.pop_front();
                group.push_back(c);
                for (int nb : detail::plaquette_neighbors(layout, c)) {
                    if (expl[static_cast<std::size_t>(nb)] && !seen[static_cast<std::size_t>(nb)]) {
                        seen[static_cast<std::size_t>(nb)] = true;
                        queue.push_back(nb);
                    }
                }
            }
            std::sort(group.begin(), group.end());
        }
        // Layered BFS to the nearest boundary or grounded constraint; ties go to the lowest id.
        std::vector<int> parent(n, -2);
        std::vector<int> frontier = group;
        for (int g : group) {
            parent[static_cast<std::size_t>(g)] = -1;
        }
        int target = -1;
        while (!frontier.empty() && target < 0) {
            std::vector<int> next;
            for (int c : frontier) {
                for (int nb : detail::plaquette_neighbors(layout, c)) {
                    if (parent[static_cast<std::size_t>(nb)] != -2) {
                        continue;
                    }
                    parent[static_cast<std::size_t>(nb)] = c;
                    next.push_back(nb);
                }
            }
            std::sort(next.begin(), next.end());
            for (int c : next) {
                if (grounded[static_cast<std::size_t>(c)] || detail::on_boundary(layout, c)) {
                    target = c;
                    break;
                }
            }
            frontier = std::move(next);
        }
        if (target < 0) {
            // Group covers a whole closed region; nothing to connect to.
            for (int g : group) {
                grounded[static_cast<std::size_t>(g)] = true;
            }
            continue;
        }
        for (int c = target; c >= 0; c = parent[static_cast<std::size_t>(c)]) {
            expl[static_cast<std::size_t>(c)] = true;
        }
        flood_ground(target);
    }

    std::vector<int> ids;
    for (std::size_t c = 0; c < n; c++) {
        if (expl[c]) {
            ids.push_back(static_cast<int>(c));
        }
    }
    return ConstraintPartition::create(layout, std::move(ids));
}

/// Cuts the occupied grid into l_max x l_max modules; every constraint straddling
/// a cut becomes explicit. Cuts sit at multiples of l_max from the minimum occupied row/col.
inline ConstraintPartition modularize(const ParityLayout &layout, int l_max, const ConstraintPartition &base) {
    if (l_max < 2) {
        throw InvalidArgument("l_max must be at least 2");
    }
    int r_min = 1 << 30, c_min = 1 << 30, r_max = -(1 << 30), c_max = -(1 << 30);
    for (const auto &q : layout.qubits()) {
        r_min = std::min(r_min, q.pos.row);
        r_max = std::max(r_max, q.pos.row);
        c_min = std::min(c_min, q.pos.col);
        c_max = std::max(c_max, q.pos.col);
    }
    auto block_row = [&](int r) { return (r - r_min) / l_max; };
    auto block_col = [&](int c) { return (c - c_min) / l_max; };

    std::vector<int> expl = base.explicit_ids();
    for (const auto &c : layout.constraints()) {
        if (base.is_explicit(c.id)) {
            continue;
        }
        const auto &first = layout.qubit(c.qubits.front()).pos;
        bool cut = false;
        for (int q : c.qubits) {
            const auto &p = layout.qubit(q).pos;
            cut |= block_row(p.row) != block_row(first.row) || block_col(p.col) != block_col(first.col);
        }
        if (cut) {
            expl.push_back(c.id);
        }
    }

    std::vector<ModuleBounds> modules;
    std::set<std::pair<int, int>> occupied;
    for (const auto &q : layout.qubits()) {
        occupied.insert({block_row(q.pos.row), block_col(q.pos.col)});
    }
    for (auto [br, bc] : occupied) {
        ModuleBounds m;
        m.row0 = r_min + br * l_max;
        m.col0 = c_min + bc * l_max;
        m.row1 = std::min(m.row0 + l_max - 1, r_max);
        m.col1 = std::min(m.col0 + l_max - 1, c_max);
        modules.push_back(m);
    }
    return ConstraintPartition::create(layout, std::move(expl), l_max, std::move(modules));
}

inline nlohmann::json partition_to_json(const ConstraintPartition &p) {
    nlohmann::json modules = nlohmann::json::array();
    for (const auto &m : p.modules()) {
        modules.push_back({{"row0", m.row0}, {"col0", m.col0}, {"row1", m.row1}, {"col1", m.col1}});
    }
    nlohmann::json out = {{"explicit", p.explicit_ids()}, {"implicit", p.implicit_ids()}, {"modules", modules}};
    out["l_max"] = p.l_max() ? nlohmann::json(*p.l_max()) : nlohmann::json(nullptr);
    return out;
}

inline std::string serialize_partition(const ConstraintPartition &p) {
    return partition_to_json(p).dump(2) + "\n";
}

inline ConstraintPartition load_partition(const std::string &text, const ParityLayout &layout) {
    try {
        auto doc = nlohmann::json::parse(text);
        auto expl = doc.at("explicit").get<std::vector<int>>();
        auto impl = doc.at("implicit").get<std::vector<int>>();
        std::optional<int> l_max;
        if (doc.contains("l_max") && !doc.at("l_max").is_null()) {
            l_max = doc.at("l_max").get<int>();
        }
        std::vector<ModuleBounds> modules;
        if (doc.contains("modules")) {
            for (const auto &m : doc.at("modules")) {
                modules.push_back({m.at("row0").get<int>(), m.at("col0").get<int>(), m.at("row1").get<int>(),
                                   m.at("col1").get<int>()});
            }
        }
        auto p = ConstraintPartition::create(layout, std::move(expl), l_max, std::move(modules));
        std::sort(impl.begin(), impl.end());
        if (impl != p.implicit_ids()) {
            throw ValidationError("partition: explicit and implicit sets do not partition the layout's constraints");
        }
        return p;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("partition: ") + e.what());
    } catch (const InvalidArgument &e) {
        throw ValidationError(std::string("partition: ") + e.what());
    }
}

}  // namespace parity_qaoa
