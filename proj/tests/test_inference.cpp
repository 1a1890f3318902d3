#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "credal/inference.hpp"
#include "support/fixtures.hpp"

using namespace credal;

namespace {

TransformedNetwork chain_transformed() {
    return apply_ccm(fixtures::chain_net(), {fixtures::chain_prior_spec()});
}

// independent oracle: per-combination full joint, ratio extremes
struct OracleBounds {
    double lower = std::numeric_limits<double>::infinity();
    double upper = -std::numeric_limits<double>::infinity();
};

OracleBounds oracle_bounds(const TransformedNetwork& t, int q, int a, const Evidence& e) {
    OracleBounds ob;
    std::vector<int> arity;
    for (const auto& tv : t.transparents) arity.push_back(tv.arity);
    std::vector<int> asg(arity.size(), 0);
    for (;;) {
        auto net = instantiate_transparent(t, asg);
        auto m = fixtures::oracle_query(net, q, a, e);
        if (m.den > 0.0) {
            ob.lower = std::min(ob.lower, m.num / m.den);
            ob.upper = std::max(ob.upper, m.num / m.den);
        }
        bool more = false;
        for (std::size_t k = asg.size(); k-- > 0;) {
            if (++asg[k] < arity[k]) {
                more = true;
                break;
            }
            asg[k] = 0;
        }
        if (!more) break;
    }
    return ob;
}

} // namespace

TEST_CASE("chain bounds by enumeration") {
    auto t = chain_transformed();
    auto r = bounds_by_enumeration(t, 0, 0, {{1, 1}});
    CHECK(std::abs(r.lower - 27.0 / 31.0) < 1e-9);
    CHECK(std::abs(r.upper - 18.0 / 19.0) < 1e-9);
    REQUIRE(r.argmin == std::vector<int>{1}); // vertex (0.6, 0.4)
    REQUIRE(r.argmax == std::vector<int>{0}); // vertex (0.8, 0.2)
    CHECK(r.evaluations == 2);
    CHECK(r.skipped_zero_mass == 0);
}

TEST_CASE("no evidence: prior vertex extremes") {
    auto t = chain_transformed();
    auto r = bounds_by_enumeration(t, 0, 0, {});
    CHECK(r.lower == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.upper == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("point credal set collapses the interval") {
    auto net = fixtures::chain_net(0.6);
    CredalSpec spec;
    spec.node = 0;
    spec.column_sets = {make_polytope(2, {{0.6, 0.4}})};
    auto t = apply_ccm(net, {spec});
    auto r = bounds_by_enumeration(t, 0, 0, {{1, 1}});
    auto p = posterior_marginal(net, 0, {{1, 1}});
    CHECK(std::abs(r.lower - p[0]) < 1e-12);
    CHECK(std::abs(r.upper - p[0]) < 1e-12);
}

TEST_CASE("joint-max equals enumeration on the chain") {
    auto t = chain_transformed();
    auto e = bounds_by_enumeration(t, 0, 0, {{1, 1}});
    auto j = bounds_by_joint_max(t, 0, 0, {{1, 1}});
    CHECK(std::abs(e.lower - j.lower) < 1e-10);
    CHECK(std::abs(e.upper - j.upper) < 1e-10);
    CHECK(e.argmin == j.argmin);
    CHECK(e.argmax == j.argmax);
}

TEST_CASE("two credal roots with a conjunction node") {
    DiscreteNetwork net;
    net.variables = {{0, "x1", 2}, {1, "x2", 2}, {2, "both", 2}};
    net.parents = {{}, {}, {0, 1}};
    net.cpts.resize(3);
    net.cpts[0] = make_cpt(net, 0, {{0.7, 0.3}});
    net.cpts[1] = make_cpt(net, 1, {{0.7, 0.3}});
    // both=0 iff x1=0 and x2=0
    net.cpts[2] = make_cpt(net, 2, {{1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}});
    CredalSpec s1, s2;
    s1.node = 0;
    s1.column_sets = {make_polytope(2, {{0.8, 0.2}, {0.6, 0.4}})};
    s2.node = 1;
    s2.column_sets = {make_polytope(2, {{0.8, 0.2}, {0.6, 0.4}})};
    auto t = apply_ccm(net, {s1, s2});
    auto r = bounds_by_joint_max(t, 2, 0, {});
    CHECK(std::abs(r.lower - 0.36) < 1e-12);
    CHECK(std::abs(r.upper - 0.64) < 1e-12);
}

TEST_CASE("cross-method equality and oracle agreement on random networks") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        auto inst = fixtures::random_instance(seed, 8, 3, 4, 3);
        auto t = apply_ccm(inst.net, inst.specs);
        BoundsResult e;
        try {
            e = bounds_by_enumeration(t, inst.query, inst.value, inst.evidence);
        } catch (const std::domain_error&) {
            continue; // zero-probability evidence everywhere
        }
        auto j = bounds_by_joint_max(t, inst.query, inst.value, inst.evidence);
        CHECK(std::abs(e.lower - j.lower) < 1e-10);
        CHECK(std::abs(e.upper - j.upper) < 1e-10);
        auto ob = oracle_bounds(t, inst.query, inst.value, inst.evidence);
        CHECK(std::abs(e.lower - ob.lower) < 1e-10);
        CHECK(std::abs(e.upper - ob.upper) < 1e-10);
    }
}

TEST_CASE("mixtures never escape the vertex bounds") {
    auto t = chain_transformed();
    auto r = bounds_by_enumeration(t, 0, 0, {{1, 1}});
    std::mt19937_64 rng(555);
    std::exponential_distribution<double> expd(1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> theta(2);
        double s = 0.0;
        for (double& x : theta) s += (x = expd(rng) + 1e-12);
        for (double& x : theta) x /= s;
        auto net = net_with_priors(t, {theta});
        Factor f = eliminate(net, {0}, {{1, 1}});
        double ratio = f.values[0] / f.sum();
        CHECK(ratio >= r.lower - 1e-12);
        CHECK(ratio <= r.upper + 1e-12);
    }
}

TEST_CASE("dropping a vertex never widens the interval") {
    for (std::uint64_t seed = 200; seed < 212; ++seed) {
        auto inst = fixtures::random_instance(seed, 6, 1, 4, 2);
        if (inst.specs[0].column_sets[0].vertices.size() < 3) continue;
        auto t = apply_ccm(inst.net, inst.specs);
        BoundsResult full;
        try {
            full = bounds_by_enumeration(t, inst.query, inst.value, inst.evidence);
        } catch (const std::domain_error&) {
            continue;
        }
        auto shrunk = inst.specs;
        auto& verts = shrunk[0].column_sets[0].vertices;
        verts.pop_back();
        auto t2 = apply_ccm(inst.net, shrunk);
        auto sub = bounds_by_enumeration(t2, inst.query, inst.value, inst.evidence);
        CHECK(sub.lower >= full.lower - 1e-12);
        CHECK(sub.upper <= full.upper + 1e-12);
    }
}

TEST_CASE("conjugacy through indicator utilities") {
    for (std::uint64_t seed = 300; seed < 315; ++seed) {
        auto inst = fixtures::random_instance(seed, 7, 2, 3, 3);
        auto t = apply_ccm(inst.net, inst.specs);
        BoundsResult direct;
        try {
            direct = bounds_by_enumeration(t, inst.query, inst.value, inst.evidence);
        } catch (const std::domain_error&) {
            continue;
        }
        UtilityFunction comp;
        comp.targets = {inst.query};
        comp.values.assign(inst.net.variables[inst.query].cardinality, 1.0);
        comp.values[inst.value] = 0.0; // indicator of the complement event
        auto c = expectation_bounds(t, comp, inst.evidence);
        CHECK(std::abs(direct.lower - (1.0 - c.upper)) < 1e-10);
        CHECK(std::abs(direct.upper - (1.0 - c.lower)) < 1e-10);
    }
}

TEST_CASE("expectation bounds") {
    DiscreteNetwork net;
    net.variables = {{0, "x", 2}};
    net.parents = {{}};
    net.cpts.resize(1);
    net.cpts[0] = make_cpt(net, 0, {{0.7, 0.3}});
    CredalSpec spec;
    spec.node = 0;
    spec.column_sets = {make_polytope(2, {{0.8, 0.2}, {0.6, 0.4}})};
    auto t = apply_ccm(net, {spec});

    UtilityFunction u;
    u.targets = {0};
    u.values = {10.0, 0.0};
    auto r = expectation_bounds(t, u, {});
    CHECK(r.lower == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(r.upper == doctest::Approx(8.0).epsilon(1e-12));

    UtilityFunction c;
    c.targets = {0};
    c.values = {3.25, 3.25};
    auto rc = expectation_bounds(t, c, {});
    CHECK(rc.lower == doctest::Approx(3.25));
    CHECK(rc.upper == doctest::Approx(3.25));
}

TEST_CASE("indicator utility reduces to probability bounds") {
    auto t = chain_transformed();
    UtilityFunction ind;
    ind.targets = {0};
    ind.values = {1.0, 0.0};
    auto viaU = expectation_bounds(t, ind, {{1, 1}});
    auto direct = bounds_by_enumeration(t, 0, 0, {{1, 1}});
    CHECK(std::abs(viaU.lower - direct.lower) < 1e-12);
    CHECK(std::abs(viaU.upper - direct.upper) < 1e-12);
}

TEST_CASE("variance bounds: hand case and cross-check") {
    DiscreteNetwork net;
    net.variables = {{0, "x", 2}};
    net.parents = {{}};
    net.cpts.resize(1);
    net.cpts[0] = make_cpt(net, 0, {{0.7, 0.3}});
    CredalSpec spec;
    spec.node = 0;
    spec.column_sets = {make_polytope(2, {{0.8, 0.2}, {0.6, 0.4}})};
    auto t = apply_ccm(net, {spec});
    UtilityFunction u;
    u.targets = {0};
    u.values = {0.0, 1.0};
    auto v = variance_bounds(t, u, {});
    CHECK(std::abs(v.bounds.lower - 0.16) < 1e-9);
    CHECK(std::abs(v.bounds.upper - 0.24) < 1e-9);
    CHECK(std::abs(v.iterative_lower - v.bounds.lower) < 1e-6);
    CHECK(std::abs(v.iterative_upper - v.bounds.upper) < 1e-6);
    CHECK(v.envelope_upper >= v.bounds.upper - 1e-9);

    // constant utility: zero variance either way
    UtilityFunction c;
    c.targets = {0};
    c.values = {2.0, 2.0};
    auto vc = variance_bounds(t, c, {});
    CHECK(vc.bounds.lower == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(vc.bounds.upper == doctest::Approx(0.0).epsilon(1e-12));

    // point credal set: both ends equal that net's variance
    CredalSpec pt;
    pt.node = 0;
    pt.column_sets = {make_polytope(2, {{0.7, 0.3}})};
    auto tp = apply_ccm(net, {pt});
    auto vp = variance_bounds(tp, u, {});
    CHECK(std::abs(vp.bounds.lower - 0.21) < 1e-12);
    CHECK(std::abs(vp.bounds.upper - 0.21) < 1e-12);
    CHECK(std::abs(vp.iterative_lower - 0.21) < 1e-9);
}

TEST_CASE("variance cross-check on random two-vertex instances") {
    for (std::uint64_t seed = 400; seed < 420; ++seed) {
        auto inst = fixtures::random_instance(seed, 6, 1, 2, 2);
        if (inst.specs[0].column_sets.size() != 1) continue;
        if (inst.specs[0].column_sets[0].vertices.size() != 2) continue;
        auto t = apply_ccm(inst.net, inst.specs);
        UtilityFunction u;
        u.targets = {inst.query};
        u.values.resize(inst.net.variables[inst.query].cardinality);
        std::mt19937_64 rng(seed * 77);
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        for (double& x : u.values) x = ud(rng);
        VarianceBounds v;
        try {
            v = variance_bounds(t, u, inst.evidence);
        } catch (const std::domain_error&) {
            continue;
        }
        CHECK(std::abs(v.iterative_lower - v.bounds.lower) < 1e-6);
        CHECK(std::abs(v.iterative_upper - v.bounds.upper) < 1e-6);
        CHECK(v.envelope_upper >= v.bounds.upper - 1e-9);
        // oracle agreement for the enumeration itself
        std::vector<int> arity;
        for (const auto& tv : t.transparents) arity.push_back(tv.arity);
        std::vector<int> asg(arity.size(), 0);
        double olo = std::numeric_limits<double>::infinity(), ohi = -olo;
        for (;;) {
            auto net = instantiate_transparent(t, asg);
            auto [m1, m2] = fixtures::oracle_moments(net, u.targets, u.values, inst.evidence);
            olo = std::min(olo, m2 - m1 * m1);
            ohi = std::max(ohi, m2 - m1 * m1);
            bool more = false;
            for (std::size_t k = asg.size(); k-- > 0;) {
                if (++asg[k] < arity[k]) {
                    more = true;
                    break;
                }
                asg[k] = 0;
            }
            if (!more) break;
        }
        CHECK(std::abs(v.bounds.lower - olo) < 1e-10);
        CHECK(std::abs(v.bounds.upper - ohi) < 1e-10);
    }
}

TEST_CASE("variance lower cross-check holds on general instances") {
    for (std::uint64_t seed = 500; seed < 515; ++seed) {
        auto inst = fixtures::random_instance(seed, 7, 3, 4, 3);
        auto t = apply_ccm(inst.net, inst.specs);
        UtilityFunction u;
        u.targets = {inst.query};
        u.values.resize(inst.net.variables[inst.query].cardinality);
        std::mt19937_64 rng(seed * 91);
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        for (double& x : u.values) x = ud(rng);
        VarianceBounds v;
        try {
            v = variance_bounds(t, u, inst.evidence);
        } catch (const std::domain_error&) {
            continue;
        }
        CHECK(std::abs(v.iterative_lower - v.bounds.lower) < 1e-6);
        CHECK(v.iterative_upper <= v.bounds.upper + 1e-9);
        CHECK(v.envelope_upper >= v.bounds.upper - 1e-9);
    }
}

TEST_CASE("enumeration respects its combination cap") {
    auto t = chain_transformed();
    CHECK_THROWS_AS(bounds_by_enumeration(t, 0, 0, {{1, 1}}, 1), std::length_error);
}

TEST_CASE("utility validation") {
    auto t = chain_transformed();
    UtilityFunction bad;
    bad.targets = {1};
    bad.values = {1.0, 0.0};
    CHECK_THROWS_AS(expectation_bounds(t, bad, {{1, 1}}), std::invalid_argument); // target in evidence
    UtilityFunction wrong;
    wrong.targets = {0};
    wrong.values = {1.0};
    CHECK_THROWS_AS(expectation_bounds(t, wrong, {}), std::invalid_argument);
}
