#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "parity_qaoa/circuit.hpp"
#include "parity_qaoa/driver_synth.hpp"
#include "parity_qaoa/errors.hpp"
#include "parity_qaoa/partitioner.hpp"
#include "parity_qaoa/problem_model.hpp"

namespace parity_qaoa {

/// CNOT fold of a connected qubit set onto a root along a BFS spanning tree.
struct FoldPlan {
    int root = -1;
    std::vector<std::pair<int, int>> cnots;  // (parent, child), leaves first
    std::size_t fold_depth = 0;
};

inline FoldPlan plan_fold(const ParityLayout &layout, const std::vector<int> &qubits, int root) {
    std::set<int> members(qubits.begin(), qubits.end());
    if (!members.count(root)) {
        throw InvalidArgument("fold root " + std::to_string(root) + " is not in the line");
    }
    std::map<int, std::vector<int>> children;
    std::vector<int> order{root};
    std::set<int> seen{root};
    for (std::size_t i = 0; i < order.size(); i++) {
        for (int n : layout.neighbors(order[i])) {
            if (members.count(n) && seen.insert(n).second) {
                children[order[i]].push_back(n);
                order.push_back(n);
            }
        }
    }
    if (seen.size() != members.size()) {
        throw InvalidArgument("driver line is not connected");
    }
    std::map<int, std::size_t> ready;
    std::vector<std::tuple<std::size_t, int, int>> timed;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        auto kids = children[*it];
        std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) { return ready[a] < ready[b]; });
        std::size_t t = 0;
        for (int k : kids) {
            t = std::max(t, ready[k]);
            timed.emplace_back(t, *it, k);
            t++;
        }
        ready[*it] = t;
    }
    std::sort(timed.begin(), timed.end());
    FoldPlan plan;
    plan.root = root;
    plan.fold_depth = ready[root];
    for (auto [_, parent, child] : timed) {
        plan.cnots.emplace_back(parent, child);
    }
    return plan;
}

/// Root with the shallowest fold; ties go to the lowest qubit id.
inline FoldPlan best_fold(const ParityLayout &layout, const std::vector<int> &qubits) {
    std::optional<FoldPlan> best;
    for (int r : qubits) {
        auto plan = plan_fold(layout, qubits, r);
        if (!best || plan.fold_depth < best->fold_depth) {
            best = std::move(plan);
        }
    }
    if (!best) {
        throw InvalidArgument("empty driver line");
    }
    return *best;
}

/// exp(-i beta X^(line)): fold X-parity onto a root, RX(2 beta), unfold.
inline Circuit driver_term_circuit(const ParityLayout &layout, const DriverLine &line, double beta,
                                   std::optional<int> root = std::nullopt) {
    auto plan = root ? plan_fold(layout, line.qubits, *root) : best_fold(layout, line.qubits);
    Circuit c(layout.qubit_count());
    for (auto [p, ch] : plan.cnots) {
        c.add(Gate::cnot(p, ch));
    }
    c.add(Gate::rx(plan.root, 2 * beta));
    for (auto it = plan.cnots.rbegin(); it != plan.cnots.rend(); ++it) {
        c.add(Gate::cnot(it->first, it->second));
    }
    return c;
}

/// exp(-i gamma sum_m J_m Z_m).
inline Circuit phase_separator_circuit(const HamiltonianSpec &spec, double gamma) {
    Circuit c(spec.qubit_count());
    for (std::size_t m = 0; m < spec.z_terms.size(); m++) {
        c.add(Gate::rz(static_cast<int>(m), 2 * gamma * spec.z_terms[m]));
    }
    return c;
}

/// Qubits of a constraint in cyclic order around its plaquette, so that
/// consecutive entries are grid neighbours.
inline std::vector<int> cyclic_order(const ParityLayout &layout, int constraint_id) {
    GridPos o = layout.plaquette_origin(constraint_id);
    std::vector<int> out;
    for (GridPos p : {GridPos{o.row, o.col}, GridPos{o.row, o.col + 1}, GridPos{o.row + 1, o.col + 1},
                      GridPos{o.row + 1, o.col}}) {
        int q = layout.qubit_at(p);
        if (q >= 0 && layout.constraint(constraint_id).qubits.end() !=
                          std::find(layout.constraint(constraint_id).qubits.begin(),
                                    layout.constraint(constraint_id).qubits.end(), q)) {
            out.push_back(q);
        }
    }
    return out;
}

/// exp(-i omega c [odd parity]) up to global phase, for qubits listed in ladder order.
inline Circuit constraint_circuit(std::span<const int> ordered_qubits, double strength, double omega,
                                  std::size_t qubit_count) {
    if (ordered_qubits.size() != 3 && ordered_qubits.size() != 4) {
        throw InvalidArgument("constraint circuit needs 3 or 4 qubits");
    }
    Circuit c(qubit_count);
    for (std::size_t i = 0; i + 1 < ordered_qubits.size(); i++) {
        c.add(Gate::cnot(ordered_qubits[i], ordered_qubits[i + 1]));
    }
    c.add(Gate::rz(ordered_qubits.back(), -strength * omega));
    for (std::size_t i = ordered_qubits.size() - 1; i > 0; i--) {
        c.add(Gate::cnot(ordered_qubits[i - 1], ordered_qubits[i]));
    }
    return c;
}

inline Circuit constraint_circuit(const ParityLayout &layout, int constraint_id, double strength, double omega) {
    auto order = cyclic_order(layout, constraint_id);
    return constraint_circuit(order, strength, omega, layout.qubit_count());
}

/// Equal superposition over the partition's codespace, starting from all-up.
/// Lines are prepared in descending priority: exp(-i pi/4 X^(line)) then RZ(pi/2) on the anchor.
inline Circuit init_state_circuit(const ParityLayout &layout, const DriverSet &drivers,
                                  const ConstraintPartition &partition) {
    Circuit c(layout.qubit_count());
    if (partition.implicit_ids().empty()) {
        for (std::size_t q = 0; q < layout.qubit_count(); q++) {
            c.add(Gate::h(static_cast<int>(q)));
        }
        return c;
    }
    if (!drivers.has_priorities()) {
        throw InvalidArgument("initial state needs driver priorities");
    }
    std::vector<std::size_t> order(drivers.lines.size());
    for (std::size_t i = 0; i < order.size(); i++) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return drivers.priorities[a] > drivers.priorities[b]; });
    for (std::size_t i : order) {
        c.append(driver_term_circuit(layout, drivers.lines[i], std::numbers::pi / 4));
        c.add(Gate::rz(drivers.anchors[i], std::numbers::pi / 2));
    }
    return c;
}

/// All driver terms with a common beta, horizontal lines first, then vertical, then trees.
inline Circuit driver_stage_circuit(const ParityLayout &layout, const DriverSet &drivers, double beta) {
    Circuit c(layout.qubit_count());
    for (auto shape : {LineShape::horizontal, LineShape::vertical, LineShape::tree}) {
        for (const auto &line : drivers.lines) {
            if (line.shape == shape) {
                c.append(driver_term_circuit(layout, line, beta));
            }
        }
    }
    return c;
}

enum class Mode { explicit_, implicit, hybrid };

inline const char *to_string(Mode m) {
    switch (m) {
        case Mode::explicit_:
            return "explicit";
        case Mode::implicit:
            return "implicit";
        case Mode::hybrid:
            return "hybrid";
    }
    return "hybrid";
}

inline Mode parse_mode(const std::string &s) {
    if (s == "explicit") {
        return Mode::explicit_;
    }
    if (s == "implicit") {
        return Mode::implicit;
    }
    if (s == "hybrid") {
        return Mode::hybrid;
    }
    throw InvalidArgument("unknown mode '" + s + "'");
}

inline void check_mode(Mode mode, const ConstraintPartition &partition) {
    if (mode == Mode::explicit_ && !partition.implicit_ids().empty()) {
        throw InvalidArgument("explicit mode requires every constraint to be explicit");
    }
    if (mode == Mode::implicit && partition.n_explicit() != 0) {
        throw InvalidArgument("implicit mode requires every constraint to be implicit");
    }
}

struct CycleParams {
    std::optional<double> omega;  // present iff the partition has explicit constraints
    double gamma = 0;
    double beta = 0;
};

inline std::size_t params_per_cycle(const ConstraintPartition &partition) {
    return partition.n_explicit() > 0 ? 3 : 2;
}

/// Splits a flat parameter vector [omega?, gamma, beta] per cycle.
inline std::vector<CycleParams> unpack_params(std::span<const double> flat, const ConstraintPartition &partition) {
    std::size_t per = params_per_cycle(partition);
    if (flat.empty() || flat.size() % per != 0) {
        throw InvalidArgument("parameter count " + std::to_string(flat.size()) + " is not a multiple of " +
                              std::to_string(per));
    }
    std::vector<CycleParams> out;
    for (std::size_t i = 0; i < flat.size(); i += per) {
        CycleParams cp;
        if (per == 3) {
            cp.omega = flat[i];
        }
        cp.gamma = flat[i + per - 2];
        cp.beta = flat[i + per - 1];
        out.push_back(cp);
    }
    return out;
}

/// All listed constraints with a common omega, emitted in four rounds by plaquette-origin
/// parity; plaquettes within a round are disjoint, so the stage depth does not grow with
/// the layout.
inline Circuit constraint_stage_circuit(const ParityLayout &layout, std::span<const int> constraint_ids,
                                        const HamiltonianSpec &spec, double omega) {
    std::vector<std::pair<int, int>> order;
    for (int cid : constraint_ids) {
        GridPos o = layout.plaquette_origin(cid);
        order.emplace_back(((o.row & 1) << 1) | (o.col & 1), cid);
    }
    std::sort(order.begin(), order.end());
    Circuit c(layout.qubit_count());
    for (const auto &[round, cid] : order) {
        c.append(constraint_circuit(layout, cid, spec.constraint_terms.at(static_cast<std::size_t>(cid)).strength,
                                    omega));
    }
    return c;
}

/// One QAOA cycle: constraint stage (if any explicit constraints), phase separator, driver stage.
inline Circuit cycle_circuit(const ParityLayout &layout, const ConstraintPartition &partition,
                             const DriverSet &drivers, const HamiltonianSpec &spec, const CycleParams &cp) {
    bool has_explicit = partition.n_explicit() > 0;
    if (cp.omega.has_value() != has_explicit) {
        throw InvalidArgument(has_explicit ? "omega missing for a partition with explicit constraints"
                                           : "omega given for a partition without explicit constraints");
    }
    Circuit c(layout.qubit_count());
    if (has_explicit) {
        c.append(constraint_stage_circuit(layout, partition.explicit_ids(), spec, *cp.omega));
    }
    c.append(phase_separator_circuit(spec, cp.gamma));
    c.append(driver_stage_circuit(layout, drivers, cp.beta));
    return c;
}

inline Circuit qaoa_circuit(Mode mode, const ParityLayout &layout, const ConstraintPartition &partition,
                            const DriverSet &drivers, const HamiltonianSpec &spec,
                            std::span<const CycleParams> params) {
    check_mode(mode, partition);
    if (params.empty()) {
        throw InvalidArgument("at least one QAOA cycle is required");
    }
    Circuit c = init_state_circuit(layout, drivers, partition);
    for (const auto &cp : params) {
        c.append(cycle_circuit(layout, partition, drivers, spec, cp));
    }
    return c;
}

}  // namespace parity_qaoa
