#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "credal/transform.hpp"
#include "support/fixtures.hpp"

using namespace credal;

TEST_CASE("chain network gains one arity-2 selector") {
    auto net = fixtures::chain_net();
    auto t = apply_ccm(net, {fixtures::chain_prior_spec()});
    REQUIRE(t.transparents.size() == 1);
    CHECK(t.transparents[0].arity == 2);
    CHECK(t.transparents[0].source == 0);
    CHECK(t.net.num_vars() == 3);
    CHECK(t.net.parents[0] == std::vector<int>{2});
    CHECK(validate_network(t.net).empty());

    // CPT slices are the vertices, exactly
    auto c0 = detail::cpt_column(t.net, 0, 0);
    auto c1 = detail::cpt_column(t.net, 0, 1);
    CHECK(c0 == std::vector<double>{0.8, 0.2});
    CHECK(c1 == std::vector<double>{0.6, 0.4});
}

TEST_CASE("single-vertex credal set behaves precisely") {
    auto net = fixtures::chain_net(0.6);
    CredalSpec spec;
    spec.node = 0;
    spec.column_sets = {make_polytope(2, {{0.6, 0.4}})};
    auto t = apply_ccm(net, {spec});
    REQUIRE(t.transparents.size() == 1);
    CHECK(t.transparents[0].arity == 1);
    auto precise = instantiate_transparent(t, {0});
    auto j0 = brute_force_joint(precise);
    auto j1 = brute_force_joint(net);
    for (std::size_t k = 0; k < j0.values.size(); ++k)
        CHECK(j0.values[k] == doctest::Approx(j1.values[k]).epsilon(1e-15));
}

TEST_CASE("two credal nodes multiply their arities") {
    DiscreteNetwork net;
    net.variables = {{0, "a", 2}, {1, "b", 3}};
    net.parents = {{}, {}};
    net.cpts.resize(2);
    net.cpts[0] = make_cpt(net, 0, {{0.5, 0.5}});
    net.cpts[1] = make_cpt(net, 1, {{0.2, 0.3, 0.5}});
    CredalSpec s1, s2;
    s1.node = 0;
    s1.column_sets = {make_polytope(2, {{0.8, 0.2}, {0.6, 0.4}})};
    s2.node = 1;
    s2.column_sets = {make_polytope(3, {{0.2, 0.3, 0.5}, {0.5, 0.3, 0.2}, {1.0 / 3, 1.0 / 3, 1.0 / 3}})};
    auto t = apply_ccm(net, {s1, s2});
    REQUIRE(t.transparents.size() == 2);
    CHECK(t.transparents[0].arity == 2);
    CHECK(t.transparents[1].arity == 3);
    CHECK(t.assignment_count() == 6);
}

TEST_CASE("instantiation selects vertices") {
    auto net = fixtures::chain_net();
    auto t = apply_ccm(net, {fixtures::chain_prior_spec()});
    auto n0 = instantiate_transparent(t, {0});
    CHECK(detail::cpt_column(n0, 0, 0) == std::vector<double>{0.8, 0.2});
    auto n1 = instantiate_transparent(t, {1});
    CHECK(detail::cpt_column(n1, 0, 0) == std::vector<double>{0.6, 0.4});
    // non-credal CPTs are preserved bit-identically
    CHECK(n0.cpts[1].values == net.cpts[1].values);
    CHECK_THROWS_AS(instantiate_transparent(t, {2}), std::invalid_argument);
    CHECK_THROWS_AS(instantiate_transparent(t, {}), std::invalid_argument);
}

TEST_CASE("posterior on instantiated net equals conditioning the transformed net") {
    auto net = fixtures::chain_net();
    auto t = apply_ccm(net, {fixtures::chain_prior_spec()});
    for (int j = 0; j < 2; ++j) {
        auto inst = instantiate_transparent(t, {j});
        auto direct = posterior_marginal(inst, 0, {{1, 1}});
        Evidence cond = {{1, 1}, {2, j}};
        auto viaTransformed = posterior_marginal(t.net, 0, cond);
        CHECK(std::abs(direct[0] - viaTransformed[0]) < 1e-12);
        CHECK(std::abs(direct[1] - viaTransformed[1]) < 1e-12);
    }
}

TEST_CASE("separate-mode conditional credal node creates one selector per configuration") {
    DiscreteNetwork net;
    net.variables = {{0, "a", 2}, {1, "b", 2}};
    net.parents = {{}, {0}};
    net.cpts.resize(2);
    net.cpts[0] = make_cpt(net, 0, {{0.5, 0.5}});
    net.cpts[1] = make_cpt(net, 1, {{0.9, 0.1}, {0.2, 0.8}});
    CredalSpec spec;
    spec.node = 1;
    spec.column_sets = {make_polytope(2, {{0.9, 0.1}, {0.7, 0.3}}),
                        make_polytope(2, {{0.2, 0.8}, {0.1, 0.9}, {0.3, 0.7}})};
    auto t = apply_ccm(net, {spec});
    REQUIRE(t.transparents.size() == 2);
    CHECK(t.transparents[0].parent_config == 0);
    CHECK(t.transparents[1].parent_config == 1);
    CHECK(t.transparents[0].arity == 2);
    CHECK(t.transparents[1].arity == 3);
    CHECK(validate_network(t.net).empty());

    auto inst = instantiate_transparent(t, {1, 2});
    CHECK(detail::cpt_column(inst, 1, 0) == std::vector<double>{0.7, 0.3});
    CHECK(detail::cpt_column(inst, 1, 1) == std::vector<double>{0.3, 0.7});
}

TEST_CASE("joint-mode conditional credal node uses whole-table vertices") {
    DiscreteNetwork net;
    net.variables = {{0, "power", 2}, {1, "lights", 2}};
    net.parents = {{}, {0}};
    net.cpts.resize(2);
    net.cpts[0] = make_cpt(net, 0, {{0.7, 0.3}});
    net.cpts[1] = make_cpt(net, 1, {{0.8, 0.2}, {0.0, 1.0}});
    CredalSpec spec;
    spec.node = 1;
    spec.mode = ColumnsMode::joint;
    spec.table_vertices = {{0.8, 0.2, 0.0, 1.0}, {0.944444, 0.055556, 0.0, 1.0}};
    auto t = apply_ccm(net, {spec});
    REQUIRE(t.transparents.size() == 1);
    CHECK(t.transparents[0].arity == 2);
    CHECK(t.transparents[0].parent_config == -1);
    auto inst = instantiate_transparent(t, {1});
    CHECK(detail::cpt_column(inst, 1, 0) == std::vector<double>{0.944444, 0.055556});
    CHECK(detail::cpt_column(inst, 1, 1) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("every instantiation is valid and matches the conditioned transformed joint") {
    int exercised = 0;
    for (std::uint64_t seed = 60; seed < 90 && exercised < 8; ++seed) {
        auto inst = fixtures::random_instance(seed, 4, 2, 2, 2);
        auto t = apply_ccm(inst.net, inst.specs);
        if (t.assignment_count() > 16) continue;
        ++exercised;
        REQUIRE(validate_network(t.net).empty());
        auto jointT = fixtures::oracle_joint(t.net);
        std::vector<int> cardsT;
        for (const auto& v : t.net.variables) cardsT.push_back(v.cardinality);
        std::vector<int> asg(t.transparents.size(), 0);
        bool more = true;
        while (more) {
            auto precise = instantiate_transparent(t, asg);
            CHECK(validate_network(precise).empty());
            // p(z assignment) under placeholder priors
            double pz = 1.0;
            for (std::size_t k = 0; k < asg.size(); ++k) pz /= t.transparents[k].arity;
            auto joint = fixtures::oracle_joint(precise);
            // p(x, z)/p(z) on the transformed net must equal the instantiated p(x)
            std::vector<int> full(t.net.num_vars(), 0);
            for (std::size_t idx = 0; idx < joint.size(); ++idx) {
                std::size_t rem = idx;
                for (int k = inst.net.num_vars() - 1; k >= 0; --k) {
                    full[k] = static_cast<int>(rem % cardsT[k]);
                    rem /= cardsT[k];
                }
                for (std::size_t k = 0; k < asg.size(); ++k) full[t.transparents[k].id] = asg[k];
                double pt = jointT[fixtures::oracle_rank(full, cardsT)];
                CHECK(std::abs(pt / pz - joint[idx]) < 1e-12);
            }
            more = false;
            for (std::size_t k = asg.size(); k-- > 0;) {
                if (++asg[k] < t.transparents[k].arity) {
                    more = true;
                    break;
                }
                asg[k] = 0;
            }
        }
    }
    CHECK(exercised >= 4);
}

TEST_CASE("spec validation errors") {
    auto net = fixtures::chain_net();
    CredalSpec bad;
    bad.node = 0;
    bad.column_sets = {make_polytope(3, {{0.2, 0.3, 0.5}})};
    CHECK_THROWS_AS(apply_ccm(net, {bad}), std::invalid_argument);

    CredalSpec dup = fixtures::chain_prior_spec();
    CHECK_THROWS_AS(apply_ccm(net, {dup, dup}), std::invalid_argument);
}
