#pragma once

// Shared test fixtures: the two-node chain network used across the suites,
// a seeded random-network generator, and a literal full-joint oracle that
// deliberately avoids the library's elimination path.

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "credal/network.hpp"
#include "credal/polytope.hpp"

namespace fixtures {

// Binary x -> binary y, p(y=1|x=0)=0.9, p(y=1|x=1)=0.2.
inline credal::DiscreteNetwork chain_net(double px0 = 0.6) {
    credal::DiscreteNetwork net;
    net.variables = {{0, "x", 2}, {1, "y", 2}};
    net.parents = {{}, {0}};
    net.cpts.resize(2);
    net.cpts[0] = credal::make_cpt(net, 0, {{px0, 1.0 - px0}});
    net.cpts[1] = credal::make_cpt(net, 1, {{0.1, 0.9}, {0.8, 0.2}});
    return net;
}

// The prior credal set on x used throughout: vertices (0.8,0.2) and (0.6,0.4).
inline credal::CredalSpec chain_prior_spec() {
    credal::CredalSpec spec;
    spec.node = 0;
    spec.column_sets = {credal::make_polytope(2, {{0.8, 0.2}, {0.6, 0.4}})};
    return spec;
}

// ---- independent full-joint oracle --------------------------------------

inline std::size_t oracle_rank(const std::vector<int>& a, const std::vector<int>& cards) {
    std::size_t r = 0;
    for (std::size_t k = 0; k < a.size(); ++k) r = r * cards[k] + a[k];
    return r;
}

// Joint table over all variables by direct multiplication of CPT entries.
inline std::vector<double> oracle_joint(const credal::DiscreteNetwork& net) {
    int n = net.num_vars();
    std::vector<int> cards(n);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) {
        cards[i] = net.variables[i].cardinality;
        total *= cards[i];
    }
    std::vector<double> joint(total);
    std::vector<int> a(n, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        double p = 1.0;
        for (int i = 0; i < n; ++i) {
            const credal::Factor& cpt = net.cpts[i];
            std::vector<int> sub(cpt.scope.size());
            for (std::size_t k = 0; k < cpt.scope.size(); ++k) sub[k] = a[cpt.scope[k]];
            p *= cpt.values[oracle_rank(sub, cpt.cards)];
        }
        joint[idx] = p;
        for (int k = n - 1; k >= 0; --k) {
            if (++a[k] < cards[k]) break;
            a[k] = 0;
        }
    }
    return joint;
}

struct OracleMass {
    double num = 0.0; // p(q = a, e)
    double den = 0.0; // p(e)
};

inline OracleMass oracle_query(const credal::DiscreteNetwork& net, int q, int a,
                               const credal::Evidence& e) {
    int n = net.num_vars();
    std::vector<int> cards(n);
    for (int i = 0; i < n; ++i) cards[i] = net.variables[i].cardinality;
    std::vector<double> joint = oracle_joint(net);
    OracleMass m;
    std::vector<int> asg(n, 0);
    for (std::size_t idx = 0; idx < joint.size(); ++idx) {
        bool consistent = true;
        for (const auto& [var, val] : e)
            if (asg[var] != val) consistent = false;
        if (consistent) {
            m.den += joint[idx];
            if (asg[q] == a) m.num += joint[idx];
        }
        for (int k = n - 1; k >= 0; --k) {
            if (++asg[k] < cards[k]) break;
            asg[k] = 0;
        }
    }
    return m;
}

// E[u|e] and E[u^2|e] for a utility over `targets` under the oracle joint.
inline std::pair<double, double> oracle_moments(const credal::DiscreteNetwork& net,
                                                const std::vector<int>& targets,
                                                const std::vector<double>& utable,
                                                const credal::Evidence& e) {
    int n = net.num_vars();
    std::vector<int> cards(n), tcards;
    for (int i = 0; i < n; ++i) cards[i] = net.variables[i].cardinality;
    for (int t : targets) tcards.push_back(cards[t]);
    std::vector<double> joint = oracle_joint(net);
    double den = 0.0, m1 = 0.0, m2 = 0.0;
    std::vector<int> asg(n, 0), ta(targets.size());
    for (std::size_t idx = 0; idx < joint.size(); ++idx) {
        bool consistent = true;
        for (const auto& [var, val] : e)
            if (asg[var] != val) consistent = false;
        if (consistent) {
            for (std::size_t k = 0; k < targets.size(); ++k) ta[k] = asg[targets[k]];
            double u = utable[oracle_rank(ta, tcards)];
            den += joint[idx];
            m1 += u * joint[idx];
            m2 += u * u * joint[idx];
        }
        for (int k = n - 1; k >= 0; --k) {
            if (++asg[k] < cards[k]) break;
            asg[k] = 0;
        }
    }
    return {m1 / den, m2 / den};
}

// ---- random instances ----------------------------------------------------

struct RandomInstance {
    credal::DiscreteNetwork net;
    std::vector<credal::CredalSpec> specs;
    int query = 0;
    int value = 0;
    credal::Evidence evidence;
};

inline std::vector<double> random_distribution(std::mt19937_64& rng, int card) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> p(card);
    double s = 0.0;
    for (double& x : p) s += (x = u(rng));
    for (double& x : p) x /= s;
    return p;
}

// Random DAG with strictly positive CPTs, a few credal nodes given as vertex
// polytopes (roots and separate-mode conditionals both occur).
inline RandomInstance random_instance(std::uint64_t seed, int max_vars = 10, int max_credal = 3,
                                      int max_vertices = 4, int max_card = 3,
                                      bool with_evidence = true) {
    std::mt19937_64 rng(seed);
    RandomInstance inst;
    std::uniform_int_distribution<int> nv(2, max_vars);
    int n = nv(rng);
    credal::DiscreteNetwork& net = inst.net;
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<int> cd(2, max_card);
        net.variables.push_back({i, "v" + std::to_string(i), cd(rng)});
    }
    net.parents.resize(n);
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> np(0, std::min(i, 2));
        int k = np(rng);
        std::vector<int> pool(i);
        for (int j = 0; j < i; ++j) pool[j] = j;
        std::shuffle(pool.begin(), pool.end(), rng);
        net.parents[i].assign(pool.begin(), pool.begin() + k);
    }
    net.cpts.resize(n);
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<double>> cols;
        for (int cfg = 0; cfg < net.num_parent_configs(i); ++cfg)
            cols.push_back(random_distribution(rng, net.variables[i].cardinality));
        net.cpts[i] = credal::make_cpt(net, i, cols);
    }
    // credal nodes; vertex combinations kept at desk scale
    std::uniform_int_distribution<int> nc(1, max_credal);
    int c = std::min(nc(rng), n);
    std::vector<int> pool(n);
    for (int j = 0; j < n; ++j) pool[j] = j;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::size_t combinations = 1;
    for (int k = 0; k < c; ++k) {
        int node = pool[k];
        int nconf = net.num_parent_configs(node);
        if (nconf > 4) continue;
        credal::CredalSpec spec;
        spec.node = node;
        std::size_t mine = 1;
        for (int cfg = 0; cfg < nconf; ++cfg) {
            // conditional columns stay small; roots may use the full budget
            std::uniform_int_distribution<int> mv(2, nconf > 1 ? 2 : max_vertices);
            int m = mv(rng);
            std::vector<std::vector<double>> verts;
            for (int j = 0; j < m; ++j)
                verts.push_back(random_distribution(rng, net.variables[node].cardinality));
            spec.column_sets.push_back(credal::make_polytope(net.variables[node].cardinality, verts));
            mine *= static_cast<std::size_t>(spec.column_sets.back().vertices.size());
        }
        if (combinations * mine > 256) break;
        combinations *= mine;
        inst.specs.push_back(spec);
    }
    if (inst.specs.empty()) {
        // fall back to a two-vertex credal root so every instance is credal
        credal::CredalSpec spec;
        spec.node = 0; // never has parents by construction
        int card = net.variables[0].cardinality;
        spec.column_sets.push_back(credal::make_polytope(
            card, {random_distribution(rng, card), random_distribution(rng, card)}));
        inst.specs.push_back(spec);
    }
    // query and evidence
    std::uniform_int_distribution<int> qv(0, n - 1);
    inst.query = qv(rng);
    std::uniform_int_distribution<int> av(0, net.variables[inst.query].cardinality - 1);
    inst.value = av(rng);
    if (with_evidence && n > 1) {
        std::uniform_int_distribution<int> ne(0, 2);
        int m = ne(rng);
        for (int k = 0; k < m; ++k) {
            int var = qv(rng);
            if (var == inst.query || inst.evidence.count(var)) continue;
            std::uniform_int_distribution<int> ev(0, net.variables[var].cardinality - 1);
            inst.evidence[var] = ev(rng);
        }
    }
    return inst;
}

} // namespace fixtures
