#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "parity_qaoa/circuit.hpp"
#include "parity_qaoa/circuit_builder.hpp"
#include "parity_qaoa/driver_synth.hpp"
#include "parity_qaoa/errors.hpp"
#include "parity_qaoa/partitioner.hpp"
#include "parity_qaoa/problem_model.hpp"
#include "parity_qaoa/reduce_explicit.hpp"

namespace parity_qaoa {

/// Scheduled depth of one QAOA cycle: constraint stage, phase separator, driver stage.
inline std::size_t cycle_depth(const ParityLayout &layout, const ConstraintPartition &partition,
                               const DriverSet &drivers) {
    auto spec = build_hamiltonians(layout);
    CycleParams cp;
    if (partition.n_explicit() > 0) {
        cp.omega = 0.5;
    }
    cp.gamma = 0.5;
    cp.beta = 0.5;
    return schedule(cycle_circuit(layout, partition, drivers, spec, cp));
}

struct DepthPoint {
    int n_spins = 0;
    double n_r = 0;
    std::size_t depth = 0;
    std::size_t driver_depth = 0;
    bool marker = false;
    std::optional<int> l_max;
};

/// Cycle and driver-stage depth for a partition, or nullopt when no valid driver set exists.
inline std::optional<DepthPoint> depth_point(const ParityLayout &layout, const ConstraintPartition &partition) {
    try {
        auto drivers = assign_priorities(synthesize_driver_set(layout, partition));
        if (!validate_driver_set(drivers, layout, partition).passed()) {
            return std::nullopt;
        }
        DepthPoint p;
        p.n_spins = layout.n_spins();
        p.n_r = partition.ratio();
        p.depth = cycle_depth(layout, partition, drivers);
        p.driver_depth = driver_stage_depth(layout, drivers);
        p.l_max = partition.l_max();
        return p;
    } catch (const SynthesisFailure &) {
        return std::nullopt;
    } catch (const PrioritizationFailure &) {
        return std::nullopt;
    }
}

/// Partition points for a complete graph of n_spins, in order of increasing n_r: fully
/// implicit; (sweep only) growing prefixes of the three-body constraints by id; all
/// three-body constraints (the marker); (sweep only) modules of decreasing l_max; fully
/// explicit. Points without a valid driver set and repeated partitions are skipped.
inline std::vector<DepthPoint> depth_scan(int n_spins, bool sweep) {
    auto layout = generate_complete_layout(n_spins);
    std::vector<DepthPoint> out;
    std::vector<std::vector<int>> seen;
    auto add = [&](const ConstraintPartition &partition, bool marker) {
        if (std::find(seen.begin(), seen.end(), partition.explicit_ids()) != seen.end() && !marker) {
            return;
        }
        auto p = depth_point(layout, partition);
        if (!p) {
            return;
        }
        seen.push_back(partition.explicit_ids());
        p->marker = marker;
        out.push_back(*p);
    };
    add(partition_all_implicit(layout), false);
    auto three = partition_three_body_explicit(layout);
    if (sweep) {
        std::vector<int> prefix;
        for (int cid : three.explicit_ids()) {
            if (prefix.size() + 1 >= three.explicit_ids().size()) {
                break;
            }
            prefix.push_back(cid);
            add(ConstraintPartition::create(layout, prefix), false);
        }
    }
    if (three.n_explicit() > 0) {
        add(three, true);
    }
    if (sweep) {
        int side = 0;
        for (const auto &q : layout.qubits()) {
            side = std::max({side, q.pos.row + 1, q.pos.col + 1});
        }
        for (int l = side - 1; l >= 2; l--) {
            add(modularize(layout, l, three), false);
        }
    }
    add(partition_all_explicit(layout), false);
    return out;
}

}  // namespace parity_qaoa
