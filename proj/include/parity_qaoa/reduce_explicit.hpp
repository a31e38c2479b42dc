#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "parity_qaoa/circuit.hpp"
#include "parity_qaoa/circuit_builder.hpp"
#include "parity_qaoa/driver_synth.hpp"
#include "parity_qaoa/errors.hpp"
#include "parity_qaoa/partitioner.hpp"
#include "parity_qaoa/problem_model.hpp"

namespace parity_qaoa {

/// Scheduled depth of one driver stage (all driver terms of a cycle).
inline std::size_t driver_stage_depth(const ParityLayout &layout, const DriverSet &drivers) {
    return schedule(driver_stage_circuit(layout, drivers, 0.5));
}

/// Driver-stage depth for a partition, or nullopt when synthesis or prioritization fails.
inline std::optional<std::size_t> partition_driver_depth(const ParityLayout &layout,
                                                         const ConstraintPartition &partition) {
    try {
        auto drivers = assign_priorities(synthesize_driver_set(layout, partition));
        if (!validate_driver_set(drivers, layout, partition).passed()) {
            return std::nullopt;
        }
        return driver_stage_depth(layout, drivers);
    } catch (const SynthesisFailure &) {
        return std::nullopt;
    } catch (const PrioritizationFailure &) {
        return std::nullopt;
    }
}

/// Greedy: scan explicit three-body constraints by id and move each to the implicit
/// set when drivers still synthesize and the driver-stage depth stays within budget.
/// Repeats until a full scan makes no move.
inline ConstraintPartition reduce_explicit(const ParityLayout &layout, const ConstraintPartition &partition,
                                           std::size_t depth_budget) {
    auto depth = partition_driver_depth(layout, partition);
    if (!depth) {
        throw InvalidArgument("the starting partition has no valid driver set");
    }
    if (*depth > depth_budget) {
        throw BudgetInfeasible("driver-stage depth " + std::to_string(*depth) + " exceeds the budget " +
                               std::to_string(depth_budget));
    }
    ConstraintPartition current = partition;
    bool moved = true;
    while (moved) {
        moved = false;
        for (int cid : current.explicit_ids()) {
            if (layout.constraint(cid).kind != ConstraintKind::three_body ||
                current.module_index_of_constraint(layout, cid) < 0) {
                continue;
            }
            std::vector<int> expl;
            std::copy_if(current.explicit_ids().begin(), current.explicit_ids().end(), std::back_inserter(expl),
                         [&](int id) { return id != cid; });
            auto candidate =
                ConstraintPartition::create(layout, std::move(expl), current.l_max(), current.modules());
            auto d = partition_driver_depth(layout, candidate);
            if (d && *d <= depth_budget) {
                current = std::move(candidate);
                moved = true;
                break;
            }
        }
    }
    return current;
}

}  // namespace parity_qaoa
