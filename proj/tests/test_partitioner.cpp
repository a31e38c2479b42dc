#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "parity_qaoa/parity_qaoa.hpp"

using namespace parity_qaoa;

namespace {

void expect_covers(const ParityLayout &l, const ConstraintPartition &p) {
    std::vector<int> all(p.explicit_ids());
    all.insert(all.end(), p.implicit_ids().begin(), p.implicit_ids().end());
    std::sort(all.begin(), all.end());
    std::vector<int> want(l.constraints().size());
    for (std::size_t i = 0; i < want.size(); i++) {
        want[i] = static_cast<int>(i);
    }
    EXPECT_EQ(all, want);
    EXPECT_EQ(p.n_explicit() + p.implicit_ids().size(), p.n_total());
    EXPECT_EQ(p.ratio(), static_cast<double>(p.n_explicit()) / static_cast<double>(p.n_total()));
}

// Interior hole at cell (3, 3) of an 8 x 8 patch: four three-body plaquettes around it,
// two plaquettes away from the boundary ring.
ParityLayout hole_layout() {
    return oracle::grid_patch({0, 1, 2, 3, 4, 5, 6, 7}, {8, 9, 10, 3, 12, 13, 14, 15});
}

bool explicit_connected(const ParityLayout &l, const std::vector<int> &ids) {
    auto adj = oracle::plaquette_graph(l);
    std::set<int> members(ids.begin(), ids.end()), seen{ids.front()};
    std::vector<int> stack{ids.front()};
    while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        for (int n : adj[static_cast<std::size_t>(c)]) {
            if (members.count(n) && seen.insert(n).second) {
                stack.push_back(n);
            }
        }
    }
    return seen.size() == members.size();
}

}  // namespace

TEST(PartitionLimits, SixSpinsAllExplicit) {
    auto l = generate_complete_layout(6);
    auto p = partition_all_explicit(l);
    EXPECT_EQ(p.n_explicit(), 10u);
    EXPECT_EQ(p.ratio(), 1.0);
    expect_covers(l, p);
}

TEST(PartitionLimits, SixSpinsAllImplicit) {
    auto l = generate_complete_layout(6);
    auto p = partition_all_implicit(l);
    EXPECT_EQ(p.n_explicit(), 0u);
    EXPECT_EQ(p.ratio(), 0.0);
    expect_covers(l, p);
}

TEST(PartitionLimits, NoConstraintsGivesEmptyPartitions) {
    auto l = generate_complete_layout(2);
    for (const auto &p : {partition_all_explicit(l), partition_all_implicit(l), partition_three_body_explicit(l)}) {
        EXPECT_TRUE(p.explicit_ids().empty());
        EXPECT_TRUE(p.implicit_ids().empty());
    }
}

TEST(ThreeBodyExplicit, SixSpinsSelectsTheFourTriangles) {
    auto l = generate_complete_layout(6);
    auto p = partition_three_body_explicit(l);
    std::vector<int> want;
    for (const auto &c : l.constraints()) {
        if (c.kind == ConstraintKind::three_body) {
            want.push_back(c.id);
        }
    }
    EXPECT_EQ(p.explicit_ids(), want);
    EXPECT_EQ(p.n_explicit(), 4u);
    EXPECT_DOUBLE_EQ(p.ratio(), 0.4);
    expect_covers(l, p);
}

TEST(ThreeBodyExplicit, FourBodyPatchHasNothingExplicit) {
    auto l = oracle::grid_patch({0, 1, 2, 3}, {4, 5, 6, 7});
    EXPECT_TRUE(partition_three_body_explicit(l).explicit_ids().empty());
}

TEST(ThreeBodyExplicit, InteriorGroupIsJoinedToTheBoundaryByAShortestChain) {
    auto l = hole_layout();
    std::vector<int> three;
    for (const auto &c : l.constraints()) {
        if (c.kind == ConstraintKind::three_body) {
            three.push_back(c.id);
        }
    }
    ASSERT_EQ(three.size(), 4u);
    int dist = oracle::distance_to_boundary(l, three);
    ASSERT_EQ(dist, 2);
    auto p = partition_three_body_explicit(l);
    EXPECT_EQ(p.n_explicit(), three.size() + static_cast<std::size_t>(dist));
    for (int c : three) {
        EXPECT_TRUE(p.is_explicit(c));
    }
    EXPECT_TRUE(explicit_connected(l, p.explicit_ids()));
    auto adj = oracle::plaquette_graph(l);
    bool touches = false;
    for (int c : p.explicit_ids()) {
        touches |= adj[static_cast<std::size_t>(c)].size() < 4;
    }
    EXPECT_TRUE(touches);
    expect_covers(l, p);
}

TEST(ThreeBodyExplicit, GroupAlreadyOnBoundaryAddsNothing) {
    auto l = oracle::grid_patch({0, 1, 2, 3, 4}, {0, 6, 7, 8, 9});
    auto p = partition_three_body_explicit(l);
    EXPECT_FALSE(p.explicit_ids().empty());
    for (int c : p.explicit_ids()) {
        EXPECT_EQ(l.constraint(c).kind, ConstraintKind::three_body);
    }
}

TEST(Modularize, LargeModuleLeavesSixSpinsUnchanged) {
    auto l = generate_complete_layout(6);
    auto base = partition_three_body_explicit(l);
    for (int lm : {5, 6, 9}) {
        auto p = modularize(l, lm, base);
        EXPECT_EQ(p.explicit_ids(), base.explicit_ids()) << lm;
        EXPECT_EQ(p.module_count(), 1u) << lm;
    }
}

TEST(Modularize, ModulesBoundedAndImplicitConstraintsInside) {
    for (int n : {8, 12, 16}) {
        auto l = generate_complete_layout(n);
        auto base = partition_three_body_explicit(l);
        for (int lm : {2, 3, 4, 5}) {
            auto p = modularize(l, lm, base);
            ASSERT_EQ(p.l_max(), lm);
            for (const auto &m : p.modules()) {
                EXPECT_LE(m.row1 - m.row0 + 1, lm);
                EXPECT_LE(m.col1 - m.col0 + 1, lm);
            }
            for (int c : p.implicit_ids()) {
                EXPECT_GE(p.module_index_of_constraint(l, c), 0);
            }
            for (const auto &c : l.constraints()) {
                if (p.module_index_of_constraint(l, c.id) < 0) {
                    EXPECT_TRUE(p.is_explicit(c.id));
                }
            }
            for (int c : base.explicit_ids()) {
                EXPECT_TRUE(p.is_explicit(c));
            }
            expect_covers(l, p);
        }
    }
}

TEST(Modularize, SmallerModulesNeedAtLeastAsManyExplicitConstraints) {
    auto l = generate_complete_layout(12);
    auto base = partition_three_body_explicit(l);
    EXPECT_GE(modularize(l, 3, base).n_explicit(), modularize(l, 6, base).n_explicit());
}

TEST(Modularize, RejectsTinyModules) {
    auto l = generate_complete_layout(6);
    EXPECT_THROW(modularize(l, 1, partition_three_body_explicit(l)), InvalidArgument);
}

TEST(PartitionDocument, RoundTripsAndRejectsInconsistentSets) {
    auto l = generate_complete_layout(12);
    auto p = modularize(l, 4, partition_three_body_explicit(l));
    auto back = load_partition(serialize_partition(p), l);
    EXPECT_TRUE(back == p);
    EXPECT_THROW(load_partition(R"({"explicit":[0],"implicit":[0],"l_max":null,"modules":[]})", l), ValidationError);
    EXPECT_THROW(load_partition("[", l), ValidationError);
}

TEST(PartitionCreate, RejectsBadIds) {
    auto l = generate_complete_layout(5);
    EXPECT_THROW(ConstraintPartition::create(l, {0, 0}), InvalidArgument);
    EXPECT_THROW(ConstraintPartition::create(l, {99}), InvalidArgument);
}

TEST(ReduceExplicit, PreservedTriangleMovesToImplicit) {
    auto l = generate_complete_layout(6);
    auto base = partition_three_body_explicit(l);
    auto depth = partition_driver_depth(l, base);
    ASSERT_TRUE(depth.has_value());
    auto r = reduce_explicit(l, base, *depth);
    EXPECT_LE(r.n_explicit() + 1, base.n_explicit());
    auto d = partition_driver_depth(l, r);
    ASSERT_TRUE(d.has_value());
    EXPECT_LE(*d, *depth);
}

TEST(ReduceExplicit, LocalMinimumIsAFixedPoint) {
    auto l = generate_complete_layout(8);
    auto base = modularize(l, 4, partition_three_body_explicit(l));
    auto once = reduce_explicit(l, base, 14);
    auto depth = partition_driver_depth(l, once);
    ASSERT_TRUE(depth.has_value());
    EXPECT_TRUE(reduce_explicit(l, once, *depth) == once);
}

TEST(ReduceExplicit, GenerousBudgetStaysValid) {
    auto l = generate_complete_layout(6);
    auto r = reduce_explicit(l, partition_three_body_explicit(l), 100);
    auto drivers = assign_priorities(synthesize_driver_set(l, r));
    EXPECT_TRUE(validate_driver_set(drivers, l, r).passed());
    expect_covers(l, r);
}

TEST(ReduceExplicit, InfeasibleBudget) {
    auto l = generate_complete_layout(6);
    EXPECT_THROW(reduce_explicit(l, partition_three_body_explicit(l), 1), BudgetInfeasible);
}
