#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "parity_qaoa/errors.hpp"
#include "parity_qaoa/gf2.hpp"
#include "parity_qaoa/partitioner.hpp"
#include "parity_qaoa/problem_model.hpp"

namespace parity_qaoa {

enum class LineShape { horizontal, vertical, tree };

inline const char *to_string(LineShape s) {
    switch (s) {
        case LineShape::horizontal:
            return "horizontal";
        case LineShape::vertical:
            return "vertical";
        case LineShape::tree:
            return "tree";
    }
    return "tree";
}

/// A set of qubits flipped together by one driver term X^(line).
struct DriverLine {
    std::vector<int> qubits;  // sorted ascending
    LineShape shape = LineShape::horizontal;

    std::size_t length() const {
        return qubits.size();
    }
    bool contains(int q) const {
        return std::binary_search(qubits.begin(), qubits.end(), q);
    }
    bool operator==(const DriverLine &) const = default;
};

struct DriverSet {
    std::vector<DriverLine> lines;
    std::vector<int> priorities;  // empty until assign_priorities
    std::vector<int> anchors;     // qubit id per line, empty until assign_priorities

    bool has_priorities() const {
        return !lines.empty() && priorities.size() == lines.size() && anchors.size() == lines.size();
    }
};

inline bool is_connected(const ParityLayout &layout, const std::vector<int> &qubits) {
    if (qubits.empty()) {
        return false;
    }
    std::set<int> members(qubits.begin(), qubits.end());
    std::set<int> seen{qubits.front()};
    std::deque<int> queue{qubits.front()};
    while (!queue.empty()) {
        int q = queue.front();
        queue.pop_front();
        for (int n : layout.neighbors(q)) {
            if (members.count(n) && seen.insert(n).second) {
                queue.push_back(n);
            }
        }
    }
    return seen.size() == members.size();
}

inline LineShape classify_line(const ParityLayout &layout, const std::vector<int> &qubits) {
    auto straight = [&](bool horizontal) {
        std::vector<int> along;
        const auto &p0 = layout.qubit(qubits.front()).pos;
        for (int q : qubits) {
            const auto &p = layout.qubit(q).pos;
            if ((horizontal ? p.row : p.col) != (horizontal ? p0.row : p0.col)) {
                return false;
            }
            along.push_back(horizontal ? p.col : p.row);
        }
        std::sort(along.begin(), along.end());
        return along.back() - along.front() + 1 == static_cast<int>(along.size());
    };
    if (straight(true)) {
        return LineShape::horizontal;
    }
    if (straight(false)) {
        return LineShape::vertical;
    }
    return LineShape::tree;
}

inline DriverLine make_line(const ParityLayout &layout, std::vector<int> qubits) {
    std::sort(qubits.begin(), qubits.end());
    DriverLine line;
    line.shape = classify_line(layout, qubits);
    line.qubits = std::move(qubits);
    return line;
}

struct SynthesisOptions {
    /// DFS node budget per seed when growing connected lines.
    std::size_t search_node_budget = 200000;
};

namespace detail {

/// Line synthesis restricted to one module. Works in module-local qubit indices.
class ModuleSynthesizer {
   public:
    ModuleSynthesizer(const ParityLayout &layout, std::vector<int> qubits, std::vector<int> implicit,
                      const SynthesisOptions &options)
        : layout_(layout),
          qubits_(std::move(qubits)),
          implicit_(std::move(implicit)),
          options_(options),
          basis_(qubits_.size()) {
        for (std::size_t i = 0; i < qubits_.size(); i++) {
            local_[qubits_[i]] = static_cast<int>(i);
        }
        is_implicit_.assign(layout.constraints().size(), false);
        for (int c : implicit_) {
            is_implicit_[static_cast<std::size_t>(c)] = true;
        }
        std::vector<gf2::BitVector> rows;
        for (int c : implicit_) {
            rows.push_back(to_local(layout.constraint(c).qubits));
        }
        required_ = qubits_.size() - gf2::rank(rows);
        odd_count_.assign(layout.constraints().size(), 0);
        int r0 = 1 << 30, r1 = -(1 << 30), c0 = 1 << 30, c1 = -(1 << 30);
        for (int q : qubits_) {
            const auto &p = layout.qubit(q).pos;
            r0 = std::min(r0, p.row);
            r1 = std::max(r1, p.row);
            c0 = std::min(c0, p.col);
            c1 = std::max(c1, p.col);
        }
        weight_cap_ = static_cast<std::size_t>((r1 - r0 + 1) + (c1 - c0 + 1));
    }

    std::vector<DriverLine> run() {
        straight_candidates(true);
        straight_candidates(false);
        grow_connected_lines();
        shape_kernel_remainder();
        return std::move(lines_);
    }

   private:
    gf2::BitVector to_local(const std::vector<int> &global) const {
        gf2::BitVector v(qubits_.size());
        for (int q : global) {
            v.flip(static_cast<std::size_t>(local_.at(q)));
        }
        return v;
    }
    std::vector<int> to_global(const gf2::BitVector &v) const {
        std::vector<int> out;
        for (int i : v.indices()) {
            out.push_back(qubits_[static_cast<std::size_t>(i)]);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    bool done() const {
        return basis_.dimension() >= required_;
    }
    void accept(const std::vector<int> &global) {
        if (basis_.insert(to_local(global))) {
            lines_.push_back(make_line(layout_, global));
        }
    }

    // Toggles membership of q and keeps per-constraint parity counts current.
    void toggle(int q, std::vector<int> &touched) {
        for (int c : layout_.constraints_of(q)) {
            if (!is_implicit_[static_cast<std::size_t>(c)]) {
                continue;
            }
            auto &n = odd_count_[static_cast<std::size_t>(c)];
            n ^= 1;
            odd_total_ += n ? 1 : -1;
            touched.push_back(c);
        }
    }

    /// Shortest valid segment from every start cell along rows (or columns).
    void straight_candidates(bool horizontal) {
        std::map<int, std::map<int, int>> lines;  // row -> col -> qubit (or col -> row -> qubit)
        for (int q : qubits_) {
            const auto &p = layout_.qubit(q).pos;
            if (horizontal) {
                lines[p.row][p.col] = q;
            } else {
                lines[p.col][p.row] = q;
            }
        }
        for (const auto &[_, cells] : lines) {
            std::vector<std::vector<int>> runs;
            int prev = 0;
            for (const auto &[coord, q] : cells) {
                if (runs.empty() || coord != prev + 1) {
                    runs.emplace_back();
                }
                runs.back().push_back(q);
                prev = coord;
            }
            for (const auto &run : runs) {
                for (std::size_t s = 0; s < run.size() && !done(); s++) {
                    std::vector<int> touched;
                    for (std::size_t e = s; e < run.size(); e++) {
                        toggle(run[e], touched);
                        if (odd_total_ == 0) {
                            accept(std::vector<int>(run.begin() + static_cast<std::ptrdiff_t>(s),
                                                    run.begin() + static_cast<std::ptrdiff_t>(e) + 1));
                            break;
                        }
                    }
                    reset(touched);
                }
            }
        }
    }

    void reset(std::vector<int> &touched) {
        for (int c : touched) {
            odd_count_[static_cast<std::size_t>(c)] = 0;
        }
        touched.clear();
        odd_total_ = 0;
    }

    /// Grows connected even-overlap sets from seeds, least-covered qubits first.
    void grow_connected_lines() {
        std::vector<bool> tried(qubits_.size(), false);
        while (!done()) {
            std::vector<int> coverage(qubits_.size(), 0);
            for (const auto &line : lines_) {
                for (int q : line.qubits) {
                    coverage[static_cast<std::size_t>(local_.at(q))]++;
                }
            }
            int seed = -1;
            for (std::size_t i = 0; i < qubits_.size(); i++) {
                if (!tried[i] && (seed < 0 || coverage[i] < coverage[static_cast<std::size_t>(seed)])) {
                    seed = static_cast<int>(i);
                }
            }
            if (seed < 0) {
                return;
            }
            tried[static_cast<std::size_t>(seed)] = true;
            members_.clear();
            in_set_.assign(qubits_.size(), false);
            nodes_ = 0;
            std::vector<int> touched;
            add_member(qubits_[static_cast<std::size_t>(seed)], touched);
            if (search()) {
                accept(members_);
            }
            for (int q : std::vector<int>(members_)) {
                remove_member(q, touched);
            }
            reset(touched);
        }
    }

    void add_member(int q, std::vector<int> &touched) {
        members_.push_back(q);
        in_set_[static_cast<std::size_t>(local_.at(q))] = true;
        toggle(q, touched);
    }
    void remove_member(int q, std::vector<int> &touched) {
        members_.erase(std::find(members_.begin(), members_.end(), q));
        in_set_[static_cast<std::size_t>(local_.at(q))] = false;
        toggle(q, touched);
    }

    bool search() {
        if (odd_total_ == 0) {
            return !basis_.contains(to_local(members_));
        }
        if (members_.size() >= weight_cap_ || ++nodes_ > options_.search_node_budget) {
            return false;
        }
        int target = -1;
        for (int q : members_) {
            for (int c : layout_.constraints_of(q)) {
                if (is_implicit_[static_cast<std::size_t>(c)] && odd_count_[static_cast<std::size_t>(c)] &&
                    (target < 0 || c < target)) {
                    target = c;
                }
            }
        }
        struct Option {
            int resulting_odd;
            int qubit;
        };
        std::vector<Option> options;
        for (int q : layout_.constraint(target).qubits) {
            auto it = local_.find(q);
            if (it == local_.end() || in_set_[static_cast<std::size_t>(it->second)]) {
                continue;
            }
            bool touches = false;
            for (int n : layout_.neighbors(q)) {
                auto jt = local_.find(n);
                touches |= jt != local_.end() && in_set_[static_cast<std::size_t>(jt->second)];
            }
            if (!touches) {
                continue;
            }
            int delta = 0;
            for (int c : layout_.constraints_of(q)) {
                if (is_implicit_[static_cast<std::size_t>(c)]) {
                    delta += odd_count_[static_cast<std::size_t>(c)] ? -1 : 1;
                }
            }
            options.push_back({odd_total_ + delta, q});
        }
        std::sort(options.begin(), options.end(), [](const Option &a, const Option &b) {
            return a.resulting_odd != b.resulting_odd ? a.resulting_odd < b.resulting_odd : a.qubit < b.qubit;
        });
        std::vector<int> scratch;
        for (const auto &o : options) {
            add_member(o.qubit, scratch);
            if (search()) {
                return true;
            }
            remove_member(o.qubit, scratch);
        }
        return false;
    }

    /// Last resort: take kernel vectors outside the span and try them, and their sums
    /// with up to two accepted lines, as connected lines.
    void shape_kernel_remainder() {
        if (done()) {
            return;
        }
        std::vector<gf2::BitVector> rows;
        for (int c : implicit_) {
            rows.push_back(to_local(layout_.constraint(c).qubits));
        }
        for (const auto &v : gf2::kernel_basis(std::move(rows), qubits_.size())) {
            if (done()) {
                return;
            }
            if (basis_.contains(v)) {
                continue;
            }
            std::vector<gf2::BitVector> accepted;
            for (const auto &line : lines_) {
                accepted.push_back(to_local(line.qubits));
            }
            auto shaped = try_shape(v, accepted);
            if (!shaped) {
                throw SynthesisFailure("no connected driver line found for kernel element {" + join(to_global(v)) +
                                       "}; enforce more constraints explicitly");
            }
            accept(to_global(*shaped));
        }
        if (!done()) {
            throw SynthesisFailure("driver synthesis could not reach the required line count");
        }
    }

    std::optional<gf2::BitVector> try_shape(const gf2::BitVector &v, const std::vector<gf2::BitVector> &accepted) const {
        auto ok = [&](const gf2::BitVector &w) { return w.any() && is_connected(layout_, to_global(w)); };
        if (ok(v)) {
            return v;
        }
        for (std::size_t a = 0; a < accepted.size(); a++) {
            auto w = v ^ accepted[a];
            if (ok(w)) {
                return w;
            }
        }
        for (std::size_t a = 0; a < accepted.size(); a++) {
            for (std::size_t b = a + 1; b < accepted.size(); b++) {
                auto w = v ^ accepted[a] ^ accepted[b];
                if (ok(w)) {
                    return w;
                }
            }
        }
        return std::nullopt;
    }

    static std::string join(const std::vector<int> &v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); i++) {
            s += (i ? "," : "") + std::to_string(v[i]);
        }
        return s;
    }

    const ParityLayout &layout_;
    std::vector<int> qubits_;
    std::vector<int> implicit_;
    const SynthesisOptions &options_;
    std::map<int, int> local_;
    std::vector<bool> is_implicit_;
    std::size_t required_ = 0;
    std::size_t weight_cap_ = 0;
    gf2::EchelonBasis basis_;
    std::vector<DriverLine> lines_;

    std::vector<int> odd_count_;
    int odd_total_ = 0;
    std::vector<int> members_;
    std::vector<bool> in_set_;
    std::size_t nodes_ = 0;
};

}  // namespace detail

/// Builds an independent set of connected driver lines that spans every
/// bit-flip pattern allowed by the partition's implicit constraints.
///
/// Per module: shortest valid straight segments (rows first, then columns), then
/// connected lines grown from the least-covered qubits, then shaped kernel vectors.
/// Throws SynthesisFailure when no connected representative is found.
inline DriverSet synthesize_driver_set(const ParityLayout &layout, const ConstraintPartition &partition,
                                       const SynthesisOptions &options = {}) {
    std::size_t n_modules = partition.module_count();
    std::vector<std::vector<int>> module_qubits(n_modules);
    std::vector<std::vector<int>> module_implicit(n_modules);
    for (const auto &q : layout.qubits()) {
        int m = partition.module_index_of_qubit(layout, q.id);
        if (m < 0) {
            throw InvalidArgument("qubit " + std::to_string(q.id) + " lies outside every module");
        }
        module_qubits[static_cast<std::size_t>(m)].push_back(q.id);
    }
    for (int c : partition.implicit_ids()) {
        int m = partition.module_index_of_constraint(layout, c);
        module_implicit[static_cast<std::size_t>(m)].push_back(c);
    }
    DriverSet out;
    for (std::size_t m = 0; m < n_modules; m++) {
        if (module_qubits[m].empty()) {
            continue;
        }
        detail::ModuleSynthesizer synth(layout, module_qubits[m], module_implicit[m], options);
        for (auto &line : synth.run()) {
            out.lines.push_back(std::move(line));
        }
    }
    return out;
}

struct ValidityReport {
    bool even_overlap = true;
    std::vector<std::pair<int, int>> odd_overlaps;  // (line index, constraint id)
    bool connected = true;
    bool independent = true;
    bool cardinality_ok = true;
    std::size_t cardinality = 0;
    std::size_t expected_cardinality = 0;  // K - rank of the implicit constraint supports
    bool reachable = true;

    bool passed() const {
        return even_overlap && connected && independent && cardinality_ok && reachable;
    }
};

inline ValidityReport validate_driver_set(const DriverSet &set, const ParityLayout &layout,
                                          const ConstraintPartition &partition) {
    ValidityReport r;
    std::size_t k = layout.qubit_count();
    std::vector<gf2::BitVector> line_vecs;
    for (std::size_t i = 0; i < set.lines.size(); i++) {
        const auto &line = set.lines[i];
        line_vecs.push_back(gf2::BitVector::from_indices(k, line.qubits));
        if (!is_connected(layout, line.qubits)) {
            r.connected = false;
        }
        for (int c : partition.implicit_ids()) {
            std::size_t overlap = 0;
            for (int q : layout.constraint(c).qubits) {
                overlap += line.contains(q);
            }
            if (overlap % 2) {
                r.even_overlap = false;
                r.odd_overlaps.emplace_back(static_cast<int>(i), c);
            }
        }
    }
    r.cardinality = set.lines.size();
    r.independent = gf2::rank(line_vecs) == set.lines.size();

    std::vector<gf2::BitVector> implicit_rows;
    for (int c : partition.implicit_ids()) {
        implicit_rows.push_back(gf2::BitVector::from_indices(k, layout.constraint(c).qubits));
    }
    r.expected_cardinality = k - gf2::rank(implicit_rows);
    r.cardinality_ok = r.cardinality == r.expected_cardinality;

    gf2::EchelonBasis span(k);
    for (const auto &v : line_vecs) {
        span.insert(v);
    }
    std::vector<gf2::BitVector> all_rows;
    for (const auto &c : layout.constraints()) {
        all_rows.push_back(gf2::BitVector::from_indices(k, c.qubits));
    }
    for (const auto &v : gf2::kernel_basis(std::move(all_rows), k)) {
        if (!span.contains(v)) {
            r.reachable = false;
            break;
        }
    }
    return r;
}

/// Preparation priorities and phase-rotation anchors.
///
/// Lines owning a private qubit get priority 0 (anchor: lowest private qubit).
/// Then, round by round, an unassigned line that meets an assigned line at a
/// qubit not shared with any other unassigned line takes that qubit as anchor
/// and priority one above the highest assigned line through it.
inline DriverSet assign_priorities(DriverSet set) {
    std::size_t n = set.lines.size();
    std::map<int, std::vector<int>> lines_at;
    for (std::size_t i = 0; i < n; i++) {
        for (int q : set.lines[i].qubits) {
            lines_at[q].push_back(static_cast<int>(i));
        }
    }
    std::vector<int> priority(n, -1);
    std::vector<int> anchor(n, -1);
    for (std::size_t i = 0; i < n; i++) {
        for (int q : set.lines[i].qubits) {
            if (lines_at[q].size() == 1) {
                priority[i] = 0;
                anchor[i] = q;
                break;
            }
        }
    }
    while (std::count(priority.begin(), priority.end(), -1) > 0) {
        std::vector<std::tuple<std::size_t, int, int>> assigned_now;
        for (std::size_t i = 0; i < n; i++) {
            if (priority[i] >= 0) {
                continue;
            }
            int best_p = -1, best_q = -1;
            for (int q : set.lines[i].qubits) {
                bool blocked = false;
                int max_assigned = -1;
                for (int other : lines_at[q]) {
                    if (other == static_cast<int>(i)) {
                        continue;
                    }
                    if (priority[static_cast<std::size_t>(other)] < 0) {
                        blocked = true;
                        break;
                    }
                    max_assigned = std::max(max_assigned, priority[static_cast<std::size_t>(other)]);
                }
                if (blocked || max_assigned < 0) {
                    continue;
                }
                if (best_p < 0 || max_assigned + 1 < best_p) {
                    best_p = max_assigned + 1;
                    best_q = q;
                }
            }
            if (best_p >= 0) {
                assigned_now.emplace_back(i, best_p, best_q);
            }
        }
        if (assigned_now.empty()) {
            std::string ids;
            for (std::size_t i = 0; i < n; i++) {
                if (priority[i] < 0) {
                    ids += (ids.empty() ? "" : ",") + std::to_string(i);
                }
            }
            throw PrioritizationFailure("driver lines {" + ids +
                                        "} cannot be prioritized; enforce more constraints explicitly");
        }
        for (auto [i, p, q] : assigned_now) {
            priority[i] = p;
            anchor[i] = q;
        }
    }
    set.priorities = std::move(priority);
    set.anchors = std::move(anchor);
    return set;
}

/// Each anchor belongs to its own line and to no other line of equal or higher priority.
inline bool anchors_consistent(const DriverSet &set) {
    if (!set.has_priorities()) {
        return false;
    }
    for (std::size_t i = 0; i < set.lines.size(); i++) {
        if (!set.lines[i].contains(set.anchors[i])) {
            return false;
        }
        for (std::size_t j = 0; j < set.lines.size(); j++) {
            if (j != i && set.lines[j].contains(set.anchors[i]) && set.priorities[j] >= set.priorities[i]) {
                return false;
            }
        }
    }
    return true;
}

inline nlohmann::json driver_set_to_json(const DriverSet &set) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < set.lines.size(); i++) {
        nlohmann::json line = {{"qubits", set.lines[i].qubits}};
        line["priority"] = set.has_priorities() ? nlohmann::json(set.priorities[i]) : nlohmann::json(nullptr);
        line["anchor"] = set.has_priorities() ? nlohmann::json(set.anchors[i]) : nlohmann::json(nullptr);
        out.push_back(line);
    }
    return out;
}

inline std::string serialize_driver_set(const DriverSet &set) {
    return driver_set_to_json(set).dump(2) + "\n";
}

inline DriverSet load_driver_set(const std::string &text, const ParityLayout &layout) {
    try {
        auto doc = nlohmann::json::parse(text);
        DriverSet set;
        bool all_prioritized = true;
        for (const auto &line : doc) {
            auto qs = line.at("qubits").get<std::vector<int>>();
            for (int q : qs) {
                if (q < 0 || static_cast<std::size_t>(q) >= layout.qubit_count()) {
                    throw ValidationError("driver set references unknown qubit " + std::to_string(q));
                }
            }
            if (qs.empty()) {
                throw ValidationError("driver set contains an empty line");
            }
            set.lines.push_back(make_line(layout, std::move(qs)));
            if (line.contains("priority") && !line.at("priority").is_null()) {
                set.priorities.push_back(line.at("priority").get<int>());
                set.anchors.push_back(line.at("anchor").get<int>());
            } else {
                all_prioritized = false;
            }
        }
        if (!all_prioritized) {
            set.priorities.clear();
            set.anchors.clear();
        }
        return set;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("driver set: ") + e.what());
    }
}

}  // namespace parity_qaoa
