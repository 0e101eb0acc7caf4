// Shape, labeling, and dimension identities of the deterministic fixture
// families, plus the lazy column-arc family arithmetic.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "sclab/constructions.hpp"
#include "sclab/dimensions.hpp"
#include "sclab/graph.hpp"

using namespace sclab;

namespace {

int log2i(int k) {
    int b = 0;
    while ((1 << b) < k) ++b;
    return b;
}

// Recompute a binary-representation member straight from the digit encoding:
// copy c's choice j_c marks leaf (c, i, j_c) for every set bit i of j_c mod k.
Hypothesis binrep_member_oracle(int d, int k, long long code) {
    const int b = log2i(k);
    const auto idx = [b, k](int c, int i, int j) { return c * b * (k + 1) + i * (k + 1) + j; };
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(d * b * (k + 1)), 0);
    for (int c = 0; c < d; ++c) {
        long long pow = 1;
        for (int rep = 0; rep < d - 1 - c; ++rep) pow *= k;
        const int j = static_cast<int>((code / pow) % k) + 1;
        const int bits = j % k;
        for (int i = 0; i < b; ++i)
            if ((bits >> i) & 1) labels[static_cast<std::size_t>(idx(c, i, j))] = 1;
    }
    return Hypothesis(std::move(labels));
}

}  // namespace

TEST_CASE("binary-representation family has the advertised shape") {
    struct Case {
        int d, k;
    };
    for (Case c : {Case{1, 2}, Case{1, 4}, Case{2, 2}, Case{1, 8}, Case{2, 4}}) {
        Fixture fx = binary_rep_construction(c.d, c.k);
        const int b = log2i(c.k);
        REQUIRE(fx.graph.has_value());
        CHECK_FALSE(fx.graphs.has_value());
        CHECK_FALSE(fx.target_hypothesis.has_value());

        const int universe = c.d * b * (c.k + 1);
        CHECK(fx.graph->size() == universe);
        CHECK(fx.cls.universe() == universe);
        CHECK(static_cast<int>(fx.vertex_names.size()) == universe);
        CHECK(std::set<std::string>(fx.vertex_names.begin(), fx.vertex_names.end()).size() ==
              static_cast<std::size_t>(universe));

        long long count = 1;
        for (int i = 0; i < c.d; ++i) count *= c.k;
        CHECK(fx.cls.size() == count);

        // Hubs fan out to their k leaves; leaves are sinks.
        CHECK(fx.graph->max_out_degree() == c.k);
        CHECK(fx.graph->declared_k() == c.k);
        CHECK(fx.graph->arc_count() == c.d * b * c.k);
        const auto idx = [b, c](int cc, int i, int j) {
            return cc * b * (c.k + 1) + i * (c.k + 1) + j;
        };
        for (int cc = 0; cc < c.d; ++cc)
            for (int i = 0; i < b; ++i) {
                CHECK(static_cast<int>(fx.graph->neighbors(idx(cc, i, 0)).size()) == c.k);
                for (int j = 1; j <= c.k; ++j) {
                    CHECK(fx.graph->has_arc(idx(cc, i, 0), idx(cc, i, j)));
                    CHECK(fx.graph->neighbors(idx(cc, i, j)).empty());
                }
            }

        // Exact member labels, hub never positive, and the all-zero digit
        // (j_c = k) contributing no positive leaf in its copy.
        for (long long code = 0; code < count; ++code) {
            CHECK(fx.cls.at(static_cast<int>(code)) == binrep_member_oracle(c.d, c.k, code));
            for (int cc = 0; cc < c.d; ++cc)
                for (int i = 0; i < b; ++i)
                    CHECK(fx.cls.at(static_cast<int>(code))(idx(cc, i, 0)) == 0);
        }
    }
}

TEST_CASE("binary-representation dimensions: base d, induced d*log2(k)") {
    struct Case {
        int d, k, base, induced;
    };
    for (Case c : {Case{1, 2, 1, 1}, Case{1, 4, 1, 2}, Case{1, 8, 1, 3}, Case{2, 2, 2, 2},
                   Case{2, 4, 2, 4}}) {
        Fixture fx = binary_rep_construction(c.d, c.k);
        CHECK(vc_dimension(fx.cls) == c.base);
        CHECK(littlestone_dimension(fx.cls) == c.base);
        HypothesisClass induced = induce_class(*fx.graph, fx.cls);
        CHECK(induced.size() == fx.cls.size());  // the blow-up never merges members
        CHECK(vc_dimension(induced) == c.induced);
        CHECK(littlestone_dimension(induced) == c.induced);
    }
}

TEST_CASE("binary-representation validation and budget") {
    CHECK_THROWS_AS(binary_rep_construction(0, 2), ValidationError);
    CHECK_THROWS_AS(binary_rep_construction(1, 3), ValidationError);
    CHECK_THROWS_AS(binary_rep_construction(1, 1), ValidationError);
    CHECK_THROWS_AS(binary_rep_construction(1, 0), ValidationError);
    CHECK_THROWS_AS(binary_rep_construction(2, 6), ValidationError);
    CHECK_THROWS_AS(binary_rep_construction(1, 1024), ResourceError);  // universe 10250
}

TEST_CASE("star family: one positive leaf per copy, hub always negative") {
    struct Case {
        int d, k;
    };
    for (Case c : {Case{1, 3}, Case{2, 4}, Case{1, 8}, Case{3, 2}}) {
        Fixture fx = star_singletons(c.d, c.k);
        REQUIRE(fx.graph.has_value());
        const int universe = c.d * (c.k + 1);
        CHECK(fx.graph->size() == universe);
        long long count = 1;
        for (int i = 0; i < c.d; ++i) count *= c.k;
        CHECK(fx.cls.size() == count);
        CHECK(fx.graph->max_out_degree() == c.k);

        const auto idx = [c](int cc, int j) { return cc * (c.k + 1) + j; };
        for (int m = 0; m < fx.cls.size(); ++m) {
            const Hypothesis& h = fx.cls.at(m);
            for (int cc = 0; cc < c.d; ++cc) {
                CHECK(h(idx(cc, 0)) == 0);
                int positives = 0;
                for (int j = 1; j <= c.k; ++j) positives += h(idx(cc, j));
                CHECK(positives == 1);
                // The hub reaches the positive leaf, so its induced label is 1.
                CHECK(induced_label(*fx.graph, h, idx(cc, 0)) == 1);
            }
            CHECK(h.positive_count() == c.d);
        }
    }

    // Spelled-out small case: 4 vertices, 3 hypotheses.
    Fixture small = star_singletons(1, 3);
    CHECK(small.graph->size() == 4);
    CHECK(small.cls.size() == 3);
    CHECK(vc_dimension(small.cls) == 1);
    CHECK(littlestone_dimension(small.cls) == 1);

    Fixture two = star_singletons(2, 4);
    CHECK(vc_dimension(two.cls) == 2);
    CHECK(littlestone_dimension(two.cls) == 2);

    CHECK_THROWS_AS(star_singletons(0, 3), ValidationError);
    CHECK_THROWS_AS(star_singletons(1, 0), ValidationError);
}

TEST_CASE("pac lower-bound family wires one optional arc per probe column") {
    const int n = 3, i_star = 2;
    Fixture fx = ug_pac_lb_construction(n, i_star);
    REQUIRE(fx.graphs.has_value());
    REQUIRE(fx.target_graph.has_value());
    REQUIRE(fx.target_hypothesis.has_value());

    const int universe = 1 + (n + 1) * n;
    const auto idx = [n](int i, int j) { return 1 + i * n + (j - 1); };
    CHECK(fx.cls.universe() == universe);
    CHECK(fx.cls.size() == n);
    CHECK(fx.graphs->size() == 64);  // (n+1)^n
    CHECK(fx.graphs->declared_k() == 1);
    CHECK(*fx.target_hypothesis == i_star - 1);

    // Hypothesis i-1 is the indicator of block i.
    for (int i = 1; i <= n; ++i) {
        const Hypothesis& h = fx.cls.at(i - 1);
        CHECK(h.positive_count() == n);
        for (int j = 1; j <= n; ++j) CHECK(h(idx(i, j)) == 1);
        CHECK(h(0) == 0);
    }

    // The committed graph routes every probe column into block i_star.
    const ManipulationGraph& gstar = fx.graphs->at(*fx.target_graph);
    CHECK(gstar.arc_count() == n);
    for (int j = 1; j <= n; ++j) {
        CHECK(gstar.has_arc(idx(0, j), idx(i_star, j)));
        CHECK(static_cast<int>(gstar.neighbors(idx(0, j)).size()) == 1);
    }

    // Every member keeps arcs inside its own column, sourced at block 0.
    for (int g = 0; g < fx.graphs->size(); ++g) {
        const ManipulationGraph& m = fx.graphs->at(g);
        CHECK(m.max_out_degree() <= 1);
        for (int j = 1; j <= n; ++j) {
            for (VertexId to : m.neighbors(idx(0, j))) {
                bool in_column = false;
                for (int i = 1; i <= n; ++i) in_column |= to == idx(i, j);
                CHECK(in_column);
            }
        }
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) CHECK(m.neighbors(idx(i, j)).empty());
        CHECK(m.neighbors(0).empty());
    }

    // The target pair labels the lower-bound distribution perfectly.
    AgentDistribution dist = ug_pac_lb_distribution(n, make_rational(1, 10));
    CHECK(population_strategic_loss(gstar, fx.cls.at(*fx.target_hypothesis), dist) == 0);
    // ... and any fixed graph is wrong for some other block choice, which is
    // what makes the family a lower-bound instrument: same marginal, labels
    // flip with i_star.
    Fixture other = ug_pac_lb_construction(n, 3);
    CHECK(population_strategic_loss(gstar, other.cls.at(*other.target_hypothesis), dist) ==
          make_rational(1, 5));

    CHECK_THROWS_AS(ug_pac_lb_construction(1, 1), ValidationError);
    CHECK_THROWS_AS(ug_pac_lb_construction(3, 0), ValidationError);
    CHECK_THROWS_AS(ug_pac_lb_construction(3, 4), ValidationError);
    CHECK_THROWS_AS(ug_pac_lb_construction(6, 1), ResourceError);  // 7^6 members
}

TEST_CASE("pac lower-bound distribution weights") {
    AgentDistribution dist = ug_pac_lb_distribution(4, make_rational(1, 8));
    REQUIRE(dist.support().size() == 5);
    CHECK(dist.support()[0].first == Agent{0, 0});
    CHECK(dist.support()[0].second == make_rational(3, 4));
    Rational total = dist.support()[0].second;
    for (int j = 1; j <= 4; ++j) {
        CHECK(dist.support()[static_cast<std::size_t>(j)].second == make_rational(1, 16));
        CHECK(dist.support()[static_cast<std::size_t>(j)].first.y == 1);
        total += make_rational(1, 16);
    }
    CHECK(total == 1);
    CHECK_THROWS_AS(ug_pac_lb_distribution(4, make_rational(1, 2)), ValidationError);
    CHECK_THROWS_AS(ug_pac_lb_distribution(4, make_rational(0)), ValidationError);
}

TEST_CASE("online lower-bound family drops the off-support anchor") {
    const int n = 3;
    Fixture fx = ug_online_lb_construction(n);
    REQUIRE(fx.graphs.has_value());
    CHECK_FALSE(fx.target_graph.has_value());
    CHECK_FALSE(fx.target_hypothesis.has_value());
    CHECK(fx.cls.universe() == (n + 1) * n);
    CHECK(fx.cls.size() == n);
    CHECK(fx.graphs->size() == 64);
    CHECK(fx.graphs->declared_k() == 1);

    const auto idx = [n](int i, int j) { return i * n + (j - 1); };
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) CHECK(fx.cls.at(i - 1)(idx(i, j)) == 1);

    CHECK_THROWS_AS(ug_online_lb_construction(1), ValidationError);
}

TEST_CASE("chain family: one two-hop path per hypothesis") {
    const int n = 4;
    Fixture fx = chain_construction(n);
    REQUIRE(fx.graphs.has_value());
    CHECK(fx.cls.universe() == n + 2);
    CHECK(fx.cls.size() == n);
    CHECK(fx.graphs->size() == n);
    for (int i = 0; i < n; ++i) {
        const ManipulationGraph& g = fx.graphs->at(i);
        CHECK(g.arc_count() == 2);
        CHECK(g.has_arc(0, 1));
        CHECK(g.has_arc(1, 2 + i));
        CHECK(fx.cls.at(i)(2 + i) == 1);
        CHECK(fx.cls.at(i).positive_count() == 1);
        // B reaches the positive C_i, and A reaches only B: under graph i the
        // hypothesis pulls B to positive but leaves A stranded at the
        // negative B.
        CHECK(induced_label(g, fx.cls.at(i), 1) == 1);
        CHECK(induced_label(g, fx.cls.at(i), 0) == 0);
    }
    CHECK(fx.vertex_names[0] == "A");
    CHECK(fx.vertex_names[1] == "B");
    CHECK_THROWS_AS(chain_construction(1), ValidationError);
}

TEST_CASE("column-arc family counts and enumerates without materializing") {
    ColumnArcFamily fam(5, {0, 1}, {{2, 3}, {4}});
    CHECK(fam.columns() == 2);
    CHECK(fam.size() == 6);

    ManipulationGraph arcless = fam.at({-1, -1});
    CHECK(arcless.arc_count() == 0);
    ManipulationGraph both = fam.at({1, 0});
    CHECK(both.has_arc(0, 3));
    CHECK(both.has_arc(1, 4));
    CHECK(both.arc_count() == 2);
    CHECK_THROWS_AS(fam.at({0}), ValidationError);
    CHECK_THROWS_AS(fam.at({2, 0}), ValidationError);

    GraphClass all = fam.enumerate();
    REQUIRE(all.size() == 6);
    CHECK(all.at(0).arc_count() == 0);  // the arcless member comes first
    std::set<int> arc_counts;
    for (int i = 0; i < all.size(); ++i) {
        CHECK(fam.contains(all.at(i)));
        arc_counts.insert(all.at(i).arc_count());
        for (int j = i + 1; j < all.size(); ++j)
            CHECK_FALSE(all.at(i).same_neighborhoods(all.at(j)));
    }
    CHECK(arc_counts == std::set<int>{0, 1, 2});

    // Graphs outside the family: wrong target, extra arc, foreign source.
    CHECK_FALSE(fam.contains(ManipulationGraph(5, {{4}, {}, {}, {}, {}}, 1)));
    CHECK_FALSE(fam.contains(ManipulationGraph(5, {{2, 3}, {}, {}, {}, {}}, 2)));
    CHECK_FALSE(fam.contains(ManipulationGraph(5, {{}, {}, {4}, {}, {}}, 1)));
    CHECK(fam.contains(ManipulationGraph(5, {{}, {}, {}, {}, {}}, 0)));

    // Seeded sampling lands inside the family and repeats exactly.
    Rng r1(11), r2(11);
    for (int i = 0; i < 20; ++i) {
        ManipulationGraph s1 = fam.sample(r1);
        CHECK(fam.contains(s1));
        CHECK(s1.same_neighborhoods(fam.sample(r2)));
    }

    // Consistency counting: pin column 0 to target 2, leave column 1 free.
    CHECK(fam.count_consistent({{0, 2}}) == 2);
    CHECK(fam.count_consistent({{0, 2}, {1, 4}}) == 1);
    CHECK(fam.count_consistent({{0, 4}}) == 0);   // 4 is not in column 0
    CHECK(fam.count_consistent({{4, 2}}) == 0);   // 4 is never a source
    CHECK(fam.count_consistent({{0, 2}, {0, 3}}) == 0);  // one arc, two targets
    CHECK(fam.count_consistent({}) == 6);

    CHECK_THROWS_AS(ColumnArcFamily(5, {0, 0}, {{2}, {3}}), ValidationError);
    CHECK_THROWS_AS(ColumnArcFamily(5, {0, 9}, {{2}, {3}}), ValidationError);
    CHECK_THROWS_AS(ColumnArcFamily(5, {0}, {{2}, {3}}), ValidationError);
    CHECK_THROWS_AS(ColumnArcFamily(5, {0, 1}, {{2}, {}}), ValidationError);

    // Enumeration refuses counts past the class budget: (16+1)^3 members.
    std::vector<VertexId> big_sources = {0, 1, 2};
    std::vector<std::vector<VertexId>> big_targets(3);
    for (int j = 0; j < 3; ++j)
        for (VertexId v = 3; v < 19; ++v) big_targets[static_cast<std::size_t>(j)].push_back(v);
    ColumnArcFamily big(19, std::move(big_sources), std::move(big_targets));
    CHECK(big.size() == 17 * 17 * 17);
    CHECK_THROWS_AS(big.enumerate(), ResourceError);
}
