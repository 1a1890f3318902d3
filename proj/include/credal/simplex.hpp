#pragma once

// Dense two-phase primal simplex with Bland's anti-cycling rule.
// Solves  min c.x  subject to  rows (<= or =),  x >= 0.

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace credal {

struct LPRow {
    std::vector<double> coeffs;
    char sense = '<'; // '<' means <=, '=' means equality
    double rhs = 0.0;
};

struct LinearProgram {
    int num_vars = 0;
    std::vector<double> objective; // minimized
    std::vector<LPRow> rows;
};

enum class LPStatus { optimal, infeasible, unbounded, iteration_limit };

struct SimplexSolution {
    LPStatus status = LPStatus::infeasible;
    double value = 0.0;
    std::vector<double> point;
    long pivots = 0;
};

// Plain-text dump: objective row, then one constraint per line as
// "coeffs... sense rhs".
inline std::string dump_lp(const LinearProgram& lp) {
    std::ostringstream os;
    os.precision(17);
    os << "min";
    for (double c : lp.objective) os << ' ' << c;
    os << '\n';
    for (const LPRow& r : lp.rows) {
        for (std::size_t j = 0; j < r.coeffs.size(); ++j) os << (j ? " " : "") << r.coeffs[j];
        os << ' ' << (r.sense == '=' ? "=" : "<=") << ' ' << r.rhs << '\n';
    }
    return os.str();
}

inline SimplexSolution simplex_solve(const LinearProgram& lp, long max_pivots = 1000000) {
    const double tol = 1e-9;
    const int n = lp.num_vars;
    const int m = static_cast<int>(lp.rows.size());
    for (const LPRow& r : lp.rows)
        if (static_cast<int>(r.coeffs.size()) != n)
            throw std::invalid_argument("constraint width mismatch");
    if (static_cast<int>(lp.objective.size()) != n)
        throw std::invalid_argument("objective width mismatch");
    for (double c : lp.objective)
        if (!std::isfinite(c)) throw std::invalid_argument("non-finite objective coefficient");

    // Normalize rows so rhs >= 0; '<' may flip to '>' (surplus + artificial).
    struct NRow {
        std::vector<double> a;
        double b;
        char kind; // '<', '>', '='
    };
    std::vector<NRow> rows(m);
    for (int i = 0; i < m; ++i) {
        rows[i].a = lp.rows[i].coeffs;
        rows[i].b = lp.rows[i].rhs;
        rows[i].kind = lp.rows[i].sense;
        for (double v : rows[i].a)
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite constraint coefficient");
        if (rows[i].b < 0) {
            for (double& v : rows[i].a) v = -v;
            rows[i].b = -rows[i].b;
            rows[i].kind = (rows[i].kind == '<') ? '>' : (rows[i].kind == '>') ? '<' : '=';
        }
    }

    int n_slack = 0, n_art = 0;
    for (const NRow& r : rows) {
        if (r.kind != '=') ++n_slack;
        if (r.kind != '<') ++n_art;
    }
    const int ncols = n + n_slack + n_art;
    const int art0 = n + n_slack;

    // tableau rows: m constraint rows + phase-1 cost + phase-2 cost; last column is rhs
    std::vector<std::vector<double>> T(m + 2, std::vector<double>(ncols + 1, 0.0));
    std::vector<int> basis(m, -1);
    int si = 0, ai = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) T[i][j] = rows[i].a[j];
        T[i][ncols] = rows[i].b;
        if (rows[i].kind == '<') {
            T[i][n + si] = 1.0;
            basis[i] = n + si++;
        } else if (rows[i].kind == '>') {
            T[i][n + si++] = -1.0;
            T[i][art0 + ai] = 1.0;
            basis[i] = art0 + ai++;
        } else {
            T[i][art0 + ai] = 1.0;
            basis[i] = art0 + ai++;
        }
    }
    // phase-1 reduced costs: cost 1 on artificials, canonicalized against the basis
    std::vector<double>& r1 = T[m];
    for (int j = art0; j < ncols; ++j) r1[j] = 1.0;
    for (int i = 0; i < m; ++i)
        if (basis[i] >= art0)
            for (int j = 0; j <= ncols; ++j) r1[j] -= T[i][j];
    // phase-2 reduced costs: original objective (basis vars all have zero cost here)
    std::vector<double>& r2 = T[m + 1];
    for (int j = 0; j < n; ++j) r2[j] = lp.objective[j];

    SimplexSolution sol;
    auto pivot = [&](int pr, int pc) {
        double inv = 1.0 / T[pr][pc];
        for (int j = 0; j <= ncols; ++j) T[pr][j] *= inv;
        T[pr][pc] = 1.0;
        for (int i = 0; i < m + 2; ++i) {
            if (i == pr) continue;
            double f = T[i][pc];
            if (std::abs(f) < 1e-14) {
                T[i][pc] = 0.0;
                continue;
            }
            for (int j = 0; j <= ncols; ++j) T[i][j] -= f * T[pr][j];
            T[i][pc] = 0.0;
        }
        basis[pr] = pc;
        ++sol.pivots;
    };

    // Bland's rule loop over the given cost row; `limit` excludes columns >= limit.
    auto run = [&](int costrow, int limit) -> int {
        for (;;) {
            if (sol.pivots >= max_pivots) return 2; // iteration cap
            int pc = -1;
            for (int j = 0; j < limit; ++j) {
                if (T[costrow][j] < -tol) {
                    pc = j;
                    break;
                }
            }
            if (pc < 0) return 0; // optimal for this phase
            int pr = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (T[i][pc] > tol) {
                    double ratio = T[i][ncols] / T[i][pc];
                    if (ratio < best - 1e-12 || (ratio < best + 1e-12 && (pr < 0 || basis[i] < basis[pr]))) {
                        best = ratio;
                        pr = i;
                    }
                }
            }
            if (pr < 0) return 1; // unbounded
            pivot(pr, pc);
        }
    };

    if (n_art > 0) {
        int rc = run(m, ncols);
        if (rc == 2) {
            sol.status = LPStatus::iteration_limit;
            return sol;
        }
        if (-T[m][ncols] > 1e-7) { // phase-1 objective is -rhs of its cost row
            sol.status = LPStatus::infeasible;
            return sol;
        }
        // drive artificials out of the basis where possible
        for (int i = 0; i < m; ++i) {
            if (basis[i] >= art0) {
                int pc = -1;
                for (int j = 0; j < art0; ++j)
                    if (std::abs(T[i][j]) > tol) {
                        pc = j;
                        break;
                    }
                if (pc >= 0) pivot(i, pc);
                // else: redundant row, artificial stays basic at zero
            }
        }
    }

    int rc = run(m + 1, art0); // artificial columns are blocked in phase 2
    if (rc == 2) {
        sol.status = LPStatus::iteration_limit;
        return sol;
    }
    if (rc == 1) {
        sol.status = LPStatus::unbounded;
        return sol;
    }
    sol.status = LPStatus::optimal;
    sol.point.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) sol.point[basis[i]] = T[i][ncols];
    double v = 0.0;
    for (int j = 0; j < n; ++j) v += lp.objective[j] * sol.point[j];
    sol.value = v;
    return sol;
}

} // namespace credal
