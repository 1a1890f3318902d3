#pragma once

// Globally convergent posterior bounds by bisection on a threshold k. The
// sign oracle min over vertices of p(q=a, e) - k p(e) is exact here: the
// objective is multilinear in the per-set vertex choices, so its minimum is
// attained at a selector assignment and plain enumeration decides the sign.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "credal/inference.hpp"
#include "credal/transform.hpp"

namespace credal {

struct SignedObjective {
    double value = 0.0;
    std::vector<int> argmin;
    long evaluations = 0;
    long zero_mass_skipped = 0; // vertices with p(e) = 0, excluded from the minimum
};

struct BracketState {
    double lo = 0.0;
    double hi = 1.0;
    long evaluations = 0;
    long zero_mass_skipped = 0; // vertices excluded by the sign oracle
    std::vector<std::pair<double, int>> history; // (k, sign of the minimum)
};

// Exact minimum over selector assignments of p(q=a, e) - k p(e); with
// `complement` the numerator event is q != a.
inline SignedObjective signed_objective(const TransformedNetwork& t, int q, int a, const Evidence& e,
                                        double k, bool complement = false, std::size_t cap = 1000000) {
    if (q < 0 || q >= t.original_count) throw std::invalid_argument("query variable out of range");
    if (e.count(q)) throw std::invalid_argument("query variable is in evidence");
    detail::check_cap(t, cap);
    SignedObjective out;
    out.value = std::numeric_limits<double>::infinity();
    std::vector<int> arity = detail::selector_arities(t);
    std::vector<int> asg(arity.size(), 0);
    for (;;) {
        auto net = instantiate_transparent(t, asg);
        auto m = detail::query_mass(net, q, a, e);
        ++out.evaluations;
        if (m.den <= 0.0) {
            ++out.zero_mass_skipped;
        } else {
            double num = complement ? m.den - m.num : m.num;
            double v = num - k * m.den;
            if (v < out.value) {
                out.value = v;
                out.argmin = asg;
            }
        }
        if (arity.empty() || !detail::next_assignment(asg, arity)) break;
    }
    if (!std::isfinite(out.value)) throw std::domain_error("evidence has zero probability at every vertex");
    return out;
}

// Bisection on [0,1]: the lower posterior bound exceeds k exactly when the
// signed minimum is positive. Exactly ceil(log2(1/tol)) sign evaluations.
inline double lavine_lower_bound(const TransformedNetwork& t, int q, int a, const Evidence& e, double tol,
                                 BracketState* state = nullptr, bool complement = false,
                                 std::size_t cap = 1000000) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    BracketState local;
    BracketState& st = state ? *state : local;
    st.lo = 0.0;
    st.hi = 1.0;
    st.evaluations = 0;
    st.zero_mass_skipped = 0;
    st.history.clear();
    while (st.hi - st.lo > tol) {
        double k = (st.lo + st.hi) / 2;
        auto s = signed_objective(t, q, a, e, k, complement, cap);
        st.zero_mass_skipped = s.zero_mass_skipped;
        ++st.evaluations;
        if (s.value > 0.0) {
            st.history.push_back({k, +1});
            st.lo = k;
        } else {
            st.history.push_back({k, -1});
            st.hi = k;
        }
    }
    return (st.lo + st.hi) / 2;
}

inline double lavine_upper_bound(const TransformedNetwork& t, int q, int a, const Evidence& e, double tol,
                                 BracketState* state = nullptr, std::size_t cap = 1000000) {
    return 1.0 - lavine_lower_bound(t, q, a, e, tol, state, /*complement=*/true, cap);
}

} // namespace credal
