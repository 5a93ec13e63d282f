#include "tbreach/constraints.hpp"

#include <algorithm>

namespace tbreach {

using lra::LinearTerm;

namespace {

Rational num(const Bound& b) { return Rational(static_cast<long>(b.value)); }

} // namespace

void interval_constraints(const Interval& i, const LinearTerm& v, std::vector<lra::LinearConstraint>& out)
{
    if (i.is_singular()) {
        out.push_back(lra::eq(v, num(i.lo)));
        return;
    }
    if (i.lo.is_finite())
        out.push_back(i.lo_closed ? lra::ge(v, num(i.lo)) : lra::gt(v, num(i.lo)));
    if (i.hi.is_finite())
        out.push_back(i.hi_closed ? lra::le(v, num(i.hi)) : lra::lt(v, num(i.hi)));
}

std::vector<lra::LinearConstraint> guard_constraints(const Guard& g, const std::vector<LinearTerm>& vals)
{
    std::vector<lra::LinearConstraint> out;
    if (g.falsum) {
        out.push_back({LinearTerm(1), lra::Relation::Le});
        return out;
    }
    for (const Atom& a : g.atoms) {
        if (a.kind == Atom::Kind::Rect) {
            interval_constraints(a.interval, vals.at(a.x), out);
            continue;
        }
        const LinearTerm d = vals.at(a.x) - vals.at(a.y);
        const Rational c(static_cast<long>(a.constant));
        switch (a.rel) {
        case Rel::Lt: out.push_back(lra::lt(d, c)); break;
        case Rel::Le: out.push_back(lra::le(d, c)); break;
        case Rel::Eq: out.push_back(lra::eq(d, c)); break;
        case Rel::Ge: out.push_back(lra::ge(d, c)); break;
        case Rel::Gt: out.push_back(lra::gt(d, c)); break;
        }
    }
    return out;
}

std::string canonical_key(const lra::LinearSystem& s)
{
    std::vector<std::string> parts;
    for (const auto& c : s.constraints()) {
        // scale so the first coefficient (or the constant) has magnitude 1
        Rational k = c.term.coeffs().empty() ? c.term.constant() : c.term.coeffs().front().second;
        if (k == 0)
            k = 1;
        if (k < 0 && c.rel != lra::Relation::Eq)
            k = -k;
        const LinearTerm t = c.term * (Rational(1) / k);
        std::string p = c.rel == lra::Relation::Lt ? "<" : c.rel == lra::Relation::Le ? "<=" : "=";
        for (const auto& [u, a] : t.coeffs())
            p += " " + std::to_string(u) + ":" + to_string(a);
        p += " " + to_string(t.constant());
        parts.push_back(std::move(p));
    }
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    std::string key;
    for (const auto& p : parts)
        key += p + ";";
    return key;
}

} // namespace tbreach
