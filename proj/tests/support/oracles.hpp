#pragma once

// Independent reference procedures for the property suites.

#include "tbreach/lra.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

namespace oracles {

using tbreach::Rational;

// a . z <= b over n unknowns.
struct Row {
    std::vector<Rational> a;
    Rational b;
};

// Some solution of A_I z = b_I (free unknowns 0), nullopt if inconsistent.
inline std::optional<std::vector<Rational>> solve_equalities(std::vector<Row> rows, std::size_t n)
{
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p].a[c] == 0)
            ++p;
        if (p == rows.size())
            continue;
        std::swap(rows[p], rows[r]);
        const Rational inv = 1 / rows[r].a[c];
        for (auto& x : rows[r].a)
            x *= inv;
        rows[r].b *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i].a[c] == 0)
                continue;
            const Rational f = rows[i].a[c];
            for (std::size_t k = 0; k < n; ++k)
                rows[i].a[k] -= f * rows[r].a[k];
            rows[i].b -= f * rows[r].b;
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows.size(); ++i)
        if (rows[i].b != 0)
            return std::nullopt;
    std::vector<Rational> z(n, Rational(0));
    for (std::size_t i = 0; i < r; ++i)
        z[pivot_col[i]] = rows[i].b;
    return z;
}

// Feasibility by enumerating minimal faces. Strict rows get a slack eps:
// a.x + eps <= b, eps <= 1; feasible iff max eps > 0. The optimum is attained on
// a minimal face of the optimal face, which is the solution set of at most
// n+1 tight rows, so trying every such subset is complete.
inline bool enumeration_feasible(const tbreach::lra::LinearSystem& s)
{
    using tbreach::lra::Relation;
    std::map<tbreach::lra::Unknown, std::size_t> index;
    for (auto u : s.unknowns())
        index.emplace(u, index.size());
    for (const auto& c : s.constraints())
        for (const auto& [u, a] : c.term.coeffs())
            index.emplace(u, index.size());
    const std::size_t n = index.size() + 1;
    const std::size_t eps = n - 1;
    std::vector<Row> rows;
    for (const auto& c : s.constraints()) {
        Row r{std::vector<Rational>(n, Rational(0)), -c.term.constant()};
        for (const auto& [u, a] : c.term.coeffs())
            r.a[index.at(u)] = a;
        if (c.rel == Relation::Lt)
            r.a[eps] = 1;
        rows.push_back(r);
        if (c.rel == Relation::Eq) {
            Row neg = r;
            for (auto& x : neg.a)
                x = -x;
            neg.b = -neg.b;
            rows.push_back(neg);
        }
    }
    Row cap{std::vector<Rational>(n, Rational(0)), Rational(1)};
    cap.a[eps] = 1;
    rows.push_back(cap);

    auto inside = [&](const std::vector<Rational>& z) {
        for (const Row& r : rows) {
            Rational lhs = 0;
            for (std::size_t k = 0; k < n; ++k)
                lhs += r.a[k] * z[k];
            if (lhs > r.b)
                return false;
        }
        return true;
    };
    std::optional<Rational> best;
    std::vector<std::size_t> pick;
    auto rec = [&](auto&& self, std::size_t from) -> void {
        std::vector<Row> eqs;
        for (std::size_t i : pick)
            eqs.push_back(rows[i]);
        if (auto z = solve_equalities(eqs, n); z && inside(*z))
            if (!best || (*z)[eps] > *best)
                best = (*z)[eps];
        if (pick.size() == n)
            return;
        for (std::size_t i = from; i < rows.size(); ++i) {
            pick.push_back(i);
            self(self, i + 1);
            pick.pop_back();
        }
    };
    rec(rec, 0);
    return best && *best > 0;
}

} // namespace oracles
