#pragma once

// Bounds under the largest joint credal set compatible with the local
// specifications: lift every local constraint to the space of joint-
// distribution terms, pose the posterior ratio as a linear-fractional
// program, transform it to an LP, and solve with the embedded simplex.
//
// The decision vector is the full joint table (plus convex-weight columns
// for vertex-specified local sets); precise CPTs contribute equality rows
// only, so no independence beyond those equalities is imposed.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "credal/inference.hpp"
#include "credal/network.hpp"
#include "credal/polytope.hpp"
#include "credal/simplex.hpp"
#include "credal/transform.hpp"

namespace credal {

struct FractionalProgram {
    int n_joint = 0; // joint-distribution terms, row-major over all variables
    int n_aux = 0;   // convex-weight columns appended after the joint terms
    std::vector<double> numerator;   // over the joint terms
    std::vector<double> denominator; // over the joint terms
    std::vector<LPRow> rows;         // width n_joint + n_aux

    int width() const { return n_joint + n_aux; }
};

namespace detail {

// Calls fn(term index, full assignment) for every joint assignment.
template <typename F>
inline void for_each_joint(const std::vector<int>& cards, F&& fn) {
    std::vector<int> a(cards.size(), 0);
    std::size_t idx = 0;
    do {
        fn(idx++, a);
    } while (next_assignment(a, cards));
}

inline bool matches_config(const std::vector<int>& assignment, const std::vector<int>& sorted_parents,
                           const std::vector<int>& parent_cards, int cfg) {
    std::vector<int> pa;
    unrank(static_cast<std::size_t>(cfg), parent_cards, pa);
    for (std::size_t k = 0; k < sorted_parents.size(); ++k)
        if (assignment[sorted_parents[k]] != pa[k]) return false;
    return true;
}

} // namespace detail

inline FractionalProgram build_ne_program(const DiscreteNetwork& net, const std::vector<CredalSpec>& specs,
                                          int q, int a, const Evidence& e, std::size_t cap = (std::size_t{1} << 14)) {
    const int n = net.num_vars();
    if (q < 0 || q >= n) throw std::invalid_argument("query variable out of range");
    if (a < 0 || a >= net.variables[q].cardinality) throw std::invalid_argument("query value out of range");
    if (e.count(q)) throw std::invalid_argument("query variable is in evidence");
    std::vector<int> cards(n);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) {
        cards[i] = net.variables[i].cardinality;
        if (total > cap / static_cast<std::size_t>(cards[i]))
            throw std::length_error("joint term count exceeds cap");
        total *= static_cast<std::size_t>(cards[i]);
    }
    std::vector<bool> credal(n, false);
    for (const auto& spec : specs) {
        detail::check_spec(net, spec);
        if (credal[spec.node]) throw std::invalid_argument("two credal specs target the same node");
        credal[spec.node] = true;
    }

    FractionalProgram fp;
    fp.n_joint = static_cast<int>(total);
    fp.numerator.assign(total, 0.0);
    fp.denominator.assign(total, 0.0);
    detail::for_each_joint(cards, [&](std::size_t idx, const std::vector<int>& asg) {
        bool consistent = true;
        for (const auto& [var, val] : e)
            if (asg[var] != val) consistent = false;
        if (!consistent) return;
        fp.denominator[idx] = 1.0;
        if (asg[q] == a) fp.numerator[idx] = 1.0;
    });

    // the per-configuration column polytopes of every credal node; joint-mode
    // tables contribute their column projections (cross-column coupling is
    // not linear in the joint terms)
    struct ColumnSet {
        int node;
        int cfg;
        std::vector<std::vector<double>> vertices;
        const LinearConstraintSet* facets; // may be null
    };
    std::vector<ColumnSet> columns;
    for (const auto& spec : specs) {
        const int card = net.variables[spec.node].cardinality;
        const int nconf = net.num_parent_configs(spec.node);
        for (int cfg = 0; cfg < nconf; ++cfg) {
            ColumnSet cs;
            cs.node = spec.node;
            cs.cfg = cfg;
            cs.facets = nullptr;
            if (spec.mode == ColumnsMode::separate) {
                cs.vertices = spec.column_sets[cfg].vertices;
                if (cfg < static_cast<int>(spec.column_constraints.size()) &&
                    !spec.column_constraints[cfg].rows.empty())
                    cs.facets = &spec.column_constraints[cfg];
            } else {
                for (const auto& tv : spec.table_vertices) {
                    std::vector<double> col(card);
                    for (int v = 0; v < card; ++v) col[v] = tv[cfg * card + v];
                    bool dup = false;
                    for (const auto& w : cs.vertices) dup = dup || detail::same_point(col, w);
                    if (!dup) cs.vertices.push_back(std::move(col));
                }
            }
            columns.push_back(std::move(cs));
        }
    }
    int aux = 0;
    std::vector<int> aux_offset(columns.size(), -1);
    for (std::size_t k = 0; k < columns.size(); ++k) {
        const auto& cs = columns[k];
        const int dim = net.variables[cs.node].cardinality;
        bool needs_aux = cs.facets == nullptr && dim > 2 && cs.vertices.size() > 1;
        if (needs_aux) {
            aux_offset[k] = fp.n_joint + aux;
            aux += static_cast<int>(cs.vertices.size());
        }
    }
    fp.n_aux = aux;
    const int width = fp.width();

    auto blank_row = [&](char sense, double rhs) {
        LPRow r;
        r.coeffs.assign(width, 0.0);
        r.sense = sense;
        r.rhs = rhs;
        return r;
    };

    // (i) normalization
    {
        LPRow r = blank_row('=', 1.0);
        for (int j = 0; j < fp.n_joint; ++j) r.coeffs[j] = 1.0;
        fp.rows.push_back(std::move(r));
    }

    // (ii) precise nodes: p(x_i = v, pa = cfg) - p_i(v|cfg) p(pa = cfg) = 0
    for (int i = 0; i < n; ++i) {
        if (credal[i]) continue;
        std::vector<int> sp = net.sorted_parents(i);
        std::vector<int> pc = detail::parent_cards_of(net, i);
        for (int cfg = 0; cfg < net.num_parent_configs(i); ++cfg) {
            std::vector<double> col = detail::cpt_column(net, i, cfg);
            for (int v = 0; v < cards[i]; ++v) {
                LPRow r = blank_row('=', 0.0);
                detail::for_each_joint(cards, [&](std::size_t idx, const std::vector<int>& asg) {
                    if (!detail::matches_config(asg, sp, pc, cfg)) return;
                    double c = -col[v];
                    if (asg[i] == v) c += 1.0;
                    r.coeffs[idx] = c;
                });
                fp.rows.push_back(std::move(r));
            }
        }
    }

    // (ii') factorization gluing: joint terms that agree on the credal-family
    // scope stay proportional to the precise-CPT mass. The family-marginal
    // equalities above do not pin the precise structure on their own (they
    // constrain each family pairwise), and without this the program would
    // relax conditional independences that every member of the joint set is
    // supposed to respect.
    {
        std::vector<int> fscope; // sorted union of credal families
        for (const auto& spec : specs) {
            fscope.push_back(spec.node);
            for (int p : net.parents[spec.node]) fscope.push_back(p);
        }
        std::sort(fscope.begin(), fscope.end());
        fscope.erase(std::unique(fscope.begin(), fscope.end()), fscope.end());
        std::vector<int> fcards;
        for (int v : fscope) fcards.push_back(cards[v]);
        std::size_t groups = 1;
        for (int c : fcards) groups *= static_cast<std::size_t>(c);

        std::vector<double> precise_mass(total, 1.0);
        detail::for_each_joint(cards, [&](std::size_t idx, const std::vector<int>& asg) {
            double m = 1.0;
            for (int i = 0; i < n; ++i) {
                if (credal[i]) continue;
                const Factor& cpt = net.cpts[i];
                std::vector<int> sub(cpt.scope.size());
                for (std::size_t k = 0; k < cpt.scope.size(); ++k) sub[k] = asg[cpt.scope[k]];
                m *= cpt.at(sub);
            }
            precise_mass[idx] = m;
        });
        std::vector<std::vector<std::size_t>> members(groups);
        detail::for_each_joint(cards, [&](std::size_t idx, const std::vector<int>& asg) {
            std::vector<int> fa(fscope.size());
            for (std::size_t k = 0; k < fscope.size(); ++k) fa[k] = asg[fscope[k]];
            members[detail::rank_of(fa, fcards)].push_back(idx);
        });
        for (const auto& group : members) {
            if (group.size() < 2) continue;
            std::size_t ref = group[0];
            for (std::size_t idx : group)
                if (precise_mass[idx] > precise_mass[ref]) ref = idx;
            if (precise_mass[ref] <= 0.0) {
                for (std::size_t idx : group) {
                    LPRow r = blank_row('=', 0.0);
                    r.coeffs[idx] = 1.0;
                    fp.rows.push_back(std::move(r));
                }
                continue;
            }
            for (std::size_t idx : group) {
                if (idx == ref) continue;
                LPRow r = blank_row('=', 0.0);
                r.coeffs[idx] = precise_mass[ref];
                r.coeffs[ref] = -precise_mass[idx];
                fp.rows.push_back(std::move(r));
            }
        }
    }

    // (iii) credal columns
    for (std::size_t k = 0; k < columns.size(); ++k) {
        const auto& cs = columns[k];
        const int i = cs.node;
        const int dim = cards[i];
        std::vector<int> sp = net.sorted_parents(i);
        std::vector<int> pc = detail::parent_cards_of(net, i);
        auto add_facet = [&](const std::vector<double>& coeff, double bound) {
            // coeff . p(x_i | cfg) <= bound lifts to
            // coeff . p(x_i, cfg) - bound p(cfg) <= 0
            LPRow r = blank_row('<', 0.0);
            detail::for_each_joint(cards, [&](std::size_t idx, const std::vector<int>& asg) {
                if (!detail::matches_config(asg, sp, pc, cs.cfg)) return;
                r.coeffs[idx] = coeff[asg[i]] - bound;
            });
            fp.rows.push_back(std::move(r));
        };
        if (cs.facets) {
            for (const auto& row : cs.facets->rows) add_facet(row.coefficients, row.bound);
            continue;
        }
        if (cs.vertices.size() == 1) {
            // point set: behave like a precise column
            for (int v = 0; v < dim; ++v) {
                LPRow r = blank_row('=', 0.0);
                detail::for_each_joint(cards, [&](std::size_t idx, const std::vector<int>& asg) {
                    if (!detail::matches_config(asg, sp, pc, cs.cfg)) return;
                    double c = -cs.vertices[0][v];
                    if (asg[i] == v) c += 1.0;
                    r.coeffs[idx] = c;
                });
                fp.rows.push_back(std::move(r));
            }
            continue;
        }
        if (dim == 2) {
            // a segment: interval facets on the first value
            double lo = 1.0, hi = 0.0;
            for (const auto& v : cs.vertices) {
                lo = std::min(lo, v[0]);
                hi = std::max(hi, v[0]);
            }
            add_facet({1.0, 0.0}, hi);
            add_facet({-1.0, 0.0}, -lo);
            continue;
        }
        // general vertex set: convex weights w_j >= 0 with
        //   p(x_i = v, cfg) = sum_j w_j vert_j[v]   and   sum_j w_j = p(cfg)
        const int off = aux_offset[k];
        const int m = static_cast<int>(cs.vertices.size());
        for (int v = 0; v < dim; ++v) {
            LPRow r = blank_row('=', 0.0);
            detail::for_each_joint(cards, [&](std::size_t idx, const std::vector<int>& asg) {
                if (!detail::matches_config(asg, sp, pc, cs.cfg)) return;
                if (asg[i] == v) r.coeffs[idx] = 1.0;
            });
            for (int j = 0; j < m; ++j) r.coeffs[off + j] = -cs.vertices[j][v];
            fp.rows.push_back(std::move(r));
        }
        {
            LPRow r = blank_row('=', 0.0);
            detail::for_each_joint(cards, [&](std::size_t idx, const std::vector<int>& asg) {
                if (detail::matches_config(asg, sp, pc, cs.cfg)) r.coeffs[idx] = -1.0;
            });
            for (int j = 0; j < m; ++j) r.coeffs[off + j] = 1.0;
            fp.rows.push_back(std::move(r));
        }
    }
    return fp;
}

// Homogenize: y = t p, minimize c.y subject to d.y = 1, rows become
// G.y - rhs t (sense) 0, y >= 0, t >= 0. With `maximize` the numerator is
// negated; undo the sign on the returned optimum.
inline LinearProgram charnes_cooper(const FractionalProgram& fp, bool maximize = false) {
    LinearProgram lp;
    lp.num_vars = fp.width() + 1; // trailing column is t
    lp.objective.assign(lp.num_vars, 0.0);
    for (int j = 0; j < fp.n_joint; ++j) lp.objective[j] = maximize ? -fp.numerator[j] : fp.numerator[j];
    {
        LPRow den;
        den.coeffs.assign(lp.num_vars, 0.0);
        for (int j = 0; j < fp.n_joint; ++j) den.coeffs[j] = fp.denominator[j];
        den.sense = '=';
        den.rhs = 1.0;
        lp.rows.push_back(std::move(den));
    }
    for (const auto& row : fp.rows) {
        LPRow r;
        r.coeffs = row.coeffs;
        r.coeffs.push_back(-row.rhs);
        r.sense = row.sense;
        r.rhs = 0.0;
        lp.rows.push_back(std::move(r));
    }
    return lp;
}

// Lower and upper posterior bounds under the natural extension.
inline BoundsResult ne_bounds(const DiscreteNetwork& net, const std::vector<CredalSpec>& specs, int q, int a,
                              const Evidence& e, std::size_t cap = (std::size_t{1} << 14),
                              long max_pivots = 1000000) {
    FractionalProgram fp = build_ne_program(net, specs, q, a, e, cap);
    BoundsResult r;
    r.method = "ne-lp";
    auto lo = simplex_solve(charnes_cooper(fp, false), max_pivots);
    if (lo.status == LPStatus::infeasible)
        throw std::domain_error("evidence has zero probability over the whole joint set");
    if (lo.status != LPStatus::optimal) throw std::runtime_error("lower-bound LP did not reach an optimum");
    auto hi = simplex_solve(charnes_cooper(fp, true), max_pivots);
    if (hi.status != LPStatus::optimal) throw std::runtime_error("upper-bound LP did not reach an optimum");
    r.lower = lo.value;
    r.upper = -hi.value;
    r.evaluations = lo.pivots + hi.pivots;
    return r;
}

} // namespace credal
