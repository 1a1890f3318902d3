#pragma once

// Polytopic credal sets: explicit-vertex and linear-constraint forms, the
// standard robust-statistics classes, exact vertex enumeration at desk
// scale, and membership tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "credal/simplex.hpp"

namespace credal {

struct Polytope {
    int dim = 0;
    std::vector<std::vector<double>> vertices; // each normalized, nonnegative
};

// coefficients.p <= bound, on top of the implicit simplex (p >= 0, sum p = 1)
struct LinearConstraintSet {
    int dim = 0;
    struct Row {
        std::vector<double> coefficients;
        double bound = 0.0;
    };
    std::vector<Row> rows;
};

namespace detail {

inline bool same_point(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-9) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (std::abs(a[k] - b[k]) > tol) return false;
    return true;
}

inline void dedup_points(std::vector<std::vector<double>>& pts, double tol = 1e-9) {
    std::vector<std::vector<double>> out;
    for (auto& p : pts) {
        bool dup = false;
        for (const auto& q : out) dup = dup || same_point(p, q, tol);
        if (!dup) out.push_back(std::move(p));
    }
    pts = std::move(out);
}

// Gaussian elimination with partial pivoting; returns false when singular.
inline bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.resize(n);
    for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

inline void check_distribution(const std::vector<double>& p, const char* what) {
    double s = 0.0;
    for (double v : p) {
        if (v < -1e-9) throw std::invalid_argument(std::string(what) + " has a negative entry");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument(std::string(what) + " is not normalized");
}

} // namespace detail

inline Polytope make_polytope(int dim, std::vector<std::vector<double>> vertices) {
    if (vertices.empty()) throw std::invalid_argument("polytope needs at least one vertex");
    for (const auto& v : vertices) {
        if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("vertex dimension mismatch");
        detail::check_distribution(v, "polytope vertex");
    }
    detail::dedup_points(vertices);
    return Polytope{dim, std::move(vertices)};
}

// -------- standard classes -------------------------------------------------

// Mixtures (1-eps) p + eps q for arbitrary q: one vertex per unit mass.
inline Polytope vertices_from_eps_contamination(const std::vector<double>& p, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
    detail::check_distribution(p, "base distribution");
    const int dim = static_cast<int>(p.size());
    std::vector<std::vector<double>> verts(dim, std::vector<double>(dim));
    for (int k = 0; k < dim; ++k)
        for (int x = 0; x < dim; ++x) verts[k][x] = p[x] + eps * ((x == k ? 1.0 : 0.0) - p[x]);
    return make_polytope(dim, std::move(verts));
}

// Basic mass assignment on subsets (bitmask keys). Vertices concentrate each
// non-zero mass on a single element of its subset, one combination at a time.
// Disjoint subsets give the sub-sigma special case.
inline Polytope vertices_from_belief_function(int dim, const std::map<std::uint32_t, double>& masses) {
    if (dim < 1 || dim > 16) throw std::invalid_argument("belief function dimension out of range");
    double total = 0.0;
    std::vector<std::pair<std::uint32_t, double>> active;
    for (const auto& [subset, mass] : masses) {
        if (mass < -1e-12) throw std::invalid_argument("negative basic mass");
        if (subset == 0 || subset >= (std::uint32_t{1} << dim))
            throw std::invalid_argument("mass on an empty or out-of-range subset");
        total += mass;
        if (mass > 0.0) active.push_back({subset, mass});
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("masses must sum to 1");
    std::size_t combos = 1;
    for (const auto& [subset, mass] : active) {
        combos *= static_cast<std::size_t>(__builtin_popcount(subset));
        if (combos > 1000000) throw std::length_error("too many mass concentrations");
    }
    std::vector<std::vector<int>> members(active.size());
    for (std::size_t s = 0; s < active.size(); ++s)
        for (int x = 0; x < dim; ++x)
            if (active[s].first & (std::uint32_t{1} << x)) members[s].push_back(x);
    std::vector<std::vector<double>> verts;
    std::vector<std::size_t> choice(active.size(), 0);
    for (std::size_t c = 0; c < combos; ++c) {
        std::vector<double> v(dim, 0.0);
        std::size_t rem = c;
        for (std::size_t s = 0; s < active.size(); ++s) {
            std::size_t pick = rem % members[s].size();
            rem /= members[s].size();
            v[members[s][pick]] += active[s].second;
        }
        verts.push_back(std::move(v));
    }
    return make_polytope(dim, std::move(verts));
}

// l(x) <= p(x) <= u(x).
inline LinearConstraintSet constraints_from_density_bounds(const std::vector<double>& l,
                                                           const std::vector<double>& u) {
    const int dim = static_cast<int>(l.size());
    if (static_cast<int>(u.size()) != dim) throw std::invalid_argument("bound dimension mismatch");
    double sl = 0.0, su = 0.0;
    for (int x = 0; x < dim; ++x) {
        if (l[x] < -1e-12 || u[x] < l[x] - 1e-12) throw std::invalid_argument("infeasible bounds");
        sl += l[x];
        su += u[x];
    }
    if (sl > 1.0 + 1e-9 || su < 1.0 - 1e-9) throw std::invalid_argument("infeasible bounds");
    LinearConstraintSet cs;
    cs.dim = dim;
    for (int x = 0; x < dim; ++x) {
        LinearConstraintSet::Row hi, lo;
        hi.coefficients.assign(dim, 0.0);
        lo.coefficients.assign(dim, 0.0);
        hi.coefficients[x] = 1.0;
        hi.bound = u[x];
        lo.coefficients[x] = -1.0;
        lo.bound = -l[x];
        cs.rows.push_back(std::move(lo));
        cs.rows.push_back(std::move(hi));
    }
    return cs;
}

// |p(A) - r(A)| <= eps for every event A.
inline LinearConstraintSet constraints_from_total_variation(const std::vector<double>& r, double eps) {
    detail::check_distribution(r, "total-variation center");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const int dim = static_cast<int>(r.size());
    if (dim > 16) throw std::length_error("total variation dimension over cap");
    LinearConstraintSet cs;
    cs.dim = dim;
    const std::uint32_t full = (std::uint32_t{1} << dim) - 1;
    for (std::uint32_t A = 1; A < full; ++A) {
        double rA = 0.0;
        std::vector<double> ind(dim, 0.0);
        for (int x = 0; x < dim; ++x)
            if (A & (std::uint32_t{1} << x)) {
                rA += r[x];
                ind[x] = 1.0;
            }
        LinearConstraintSet::Row up, down;
        up.coefficients = ind;
        up.bound = rA + eps;
        down.coefficients = ind;
        for (double& v : down.coefficients) v = -v;
        down.bound = -(rA - eps);
        cs.rows.push_back(std::move(up));
        cs.rows.push_back(std::move(down));
    }
    return cs;
}

// l'(A)/l''(B) <= p(A)/p(B) <= l''(A)/l'(B) over all disjoint event pairs.
inline LinearConstraintSet constraints_from_density_ratio(const std::vector<double>& lprime,
                                                          const std::vector<double>& ldprime) {
    const int dim = static_cast<int>(lprime.size());
    if (static_cast<int>(ldprime.size()) != dim) throw std::invalid_argument("measure dimension mismatch");
    if (dim > 12) throw std::length_error("density ratio dimension over cap");
    for (int x = 0; x < dim; ++x)
        if (!(lprime[x] > 0.0) || ldprime[x] < lprime[x] - 1e-12)
            throw std::invalid_argument("measures must satisfy 0 < l' <= l''");
    LinearConstraintSet cs;
    cs.dim = dim;
    const std::uint32_t full = (std::uint32_t{1} << dim) - 1;
    // lower odds for (A,B):  l'(A) p(B) - l''(B) p(A) <= 0; the upper odds of
    // (A,B) is the lower odds of (B,A), so ordered pairs cover both sides.
    for (std::uint32_t A = 1; A <= full; ++A) {
        for (std::uint32_t B = 1; B <= full; ++B) {
            if (A & B) continue;
            double lA = 0.0, uB = 0.0;
            for (int x = 0; x < dim; ++x) {
                if (A & (std::uint32_t{1} << x)) lA += lprime[x];
                if (B & (std::uint32_t{1} << x)) uB += ldprime[x];
            }
            LinearConstraintSet::Row row;
            row.coefficients.assign(dim, 0.0);
            for (int x = 0; x < dim; ++x) {
                if (B & (std::uint32_t{1} << x)) row.coefficients[x] += lA;
                if (A & (std::uint32_t{1} << x)) row.coefficients[x] -= uB;
            }
            row.bound = 0.0;
            cs.rows.push_back(std::move(row));
        }
    }
    return cs;
}

// Exact vertex set of {p >= 0, sum p = 1, rows}: brute force over active
// sets of dim-1 facets plus the normalization equality. Empty output means
// the region is infeasible.
inline Polytope enumerate_polytope_vertices(const LinearConstraintSet& c) {
    const int dim = c.dim;
    if (dim < 1 || dim > 12) throw std::length_error("vertex enumeration dimension over cap");
    const int nfacet = static_cast<int>(c.rows.size()) + dim; // rows then nonnegativity facets
    auto facet_coeff = [&](int f, int x) -> double {
        if (f < static_cast<int>(c.rows.size())) return c.rows[f].coefficients[x];
        return (f - static_cast<int>(c.rows.size()) == x) ? -1.0 : 0.0;
    };
    auto facet_bound = [&](int f) -> double {
        return f < static_cast<int>(c.rows.size()) ? c.rows[f].bound : 0.0;
    };
    auto feasible = [&](const std::vector<double>& p) {
        for (double v : p)
            if (v < -1e-9) return false;
        for (const auto& row : c.rows) {
            double s = 0.0;
            for (int x = 0; x < dim; ++x) s += row.coefficients[x] * p[x];
            if (s > row.bound + 1e-9) return false;
        }
        return true;
    };

    std::vector<std::vector<double>> found;
    std::vector<int> combo(dim - 1);
    for (int k = 0; k < dim - 1; ++k) combo[k] = k;
    bool more = dim - 1 <= nfacet;
    if (dim == 1) {
        std::vector<double> p = {1.0};
        if (feasible(p)) found.push_back(p);
        more = false;
    }
    while (more) {
        std::vector<std::vector<double>> a(dim, std::vector<double>(dim));
        std::vector<double> b(dim);
        for (int k = 0; k < dim - 1; ++k) {
            for (int x = 0; x < dim; ++x) a[k][x] = facet_coeff(combo[k], x);
            b[k] = facet_bound(combo[k]);
        }
        for (int x = 0; x < dim; ++x) a[dim - 1][x] = 1.0;
        b[dim - 1] = 1.0;
        std::vector<double> p;
        if (detail::solve_square(a, b, p) && feasible(p)) {
            for (double& v : p)
                if (v < 0.0) v = 0.0; // clip active-facet dust
            found.push_back(std::move(p));
        }
        // next combination
        int k = dim - 2;
        while (k >= 0 && combo[k] == nfacet - (dim - 1) + k) --k;
        if (k < 0) {
            more = false;
        } else {
            ++combo[k];
            for (int j = k + 1; j < dim - 1; ++j) combo[j] = combo[j - 1] + 1;
        }
    }
    detail::dedup_points(found);
    Polytope out;
    out.dim = dim;
    out.vertices = std::move(found);
    return out;
}

// -------- membership -------------------------------------------------------

inline bool contains_distribution(const LinearConstraintSet& c, const std::vector<double>& p) {
    if (static_cast<int>(p.size()) != c.dim) throw std::invalid_argument("dimension mismatch");
    for (const auto& row : c.rows) {
        double s = 0.0;
        for (int x = 0; x < c.dim; ++x) s += row.coefficients[x] * p[x];
        if (s > row.bound + 1e-9) return false;
    }
    return true;
}

// Convex-combination feasibility, decided by a phase-1 simplex run.
inline bool contains_distribution(const Polytope& poly, const std::vector<double>& p) {
    if (static_cast<int>(p.size()) != poly.dim) throw std::invalid_argument("dimension mismatch");
    const int m = static_cast<int>(poly.vertices.size());
    LinearProgram lp;
    lp.num_vars = m;
    lp.objective.assign(m, 0.0);
    for (int x = 0; x < poly.dim; ++x) {
        LPRow row;
        row.sense = '=';
        row.rhs = p[x];
        row.coeffs.resize(m);
        for (int j = 0; j < m; ++j) row.coeffs[j] = poly.vertices[j][x];
        lp.rows.push_back(std::move(row));
    }
    LPRow norm;
    norm.sense = '=';
    norm.rhs = 1.0;
    norm.coeffs.assign(m, 1.0);
    lp.rows.push_back(std::move(norm));
    return simplex_solve(lp).status == LPStatus::optimal;
}

// -------- per-node credal specification ------------------------------------

enum class ColumnsMode { separate, joint };

// Credal set attached to one node. In `separate` mode each parent
// configuration carries its own polytope over the node's values. In `joint`
// mode the vertices span the whole conditional table at once; each table
// vertex concatenates one column per parent configuration (row-major over
// the sorted parent ids), every column normalized.
struct CredalSpec {
    int node = -1;
    ColumnsMode mode = ColumnsMode::separate;
    std::vector<Polytope> column_sets;                      // separate mode
    std::vector<LinearConstraintSet> column_constraints;    // optional facet forms, parallel to column_sets
    std::vector<std::vector<double>> table_vertices;        // joint mode
};

} // namespace credal
