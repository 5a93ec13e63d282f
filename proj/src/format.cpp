#include "tbreach/format.hpp"

namespace tbreach {

namespace {

std::string format_bound(const Bound& b)
{
    switch (b.kind) {
    case Bound::Kind::NegInf: return "-inf";
    case Bound::Kind::PosInf: return "inf";
    case Bound::Kind::Finite: break;
    }
    return std::to_string(b.value);
}

} // namespace

std::string format_interval(const Interval& i)
{
    return std::string(i.lo_closed ? "[" : "(") + format_bound(i.lo) + ", " + format_bound(i.hi) + (i.hi_closed ? "]" : ")");
}

std::string format_rel(Rel r)
{
    switch (r) {
    case Rel::Lt: return "<";
    case Rel::Le: return "<=";
    case Rel::Eq: return "==";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
    }
    return "?";
}

std::string format_atom(const Atom& a, const std::vector<std::string>& vars)
{
    if (a.kind == Atom::Kind::Diag)
        return vars[a.x] + " - " + vars[a.y] + " " + format_rel(a.rel) + " " + std::to_string(a.constant);

    const Interval& i = a.interval;
    const std::string& x = vars[a.x];
    if (i.is_singular())
        return x + " == " + std::to_string(i.lo.value);
    if (i.lo.kind == Bound::Kind::NegInf && i.hi.is_finite())
        return x + (i.hi_closed ? " <= " : " < ") + std::to_string(i.hi.value);
    if (i.hi.kind == Bound::Kind::PosInf && i.lo.is_finite())
        return x + (i.lo_closed ? " >= " : " > ") + std::to_string(i.lo.value);
    return x + " in " + format_interval(i);
}

std::string format_guard(const Guard& g, const std::vector<std::string>& vars)
{
    if (g.falsum)
        return "false";
    if (g.atoms.empty())
        return "true";
    std::string s;
    for (std::size_t k = 0; k < g.atoms.size(); ++k) {
        if (k)
            s += " && ";
        s += format_atom(g.atoms[k], vars);
    }
    return s;
}

} // namespace tbreach
