#include "tbreach/lra.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace tbreach::lra {

// ---------------------------------------------------------------- terms

LinearTerm LinearTerm::var(Unknown u, const Rational& a)
{
    LinearTerm t;
    if (a != 0)
        t.coeffs_.emplace_back(u, a);
    return t;
}

Rational LinearTerm::coeff(Unknown u) const
{
    auto it = std::lower_bound(coeffs_.begin(), coeffs_.end(), u, [](const auto& p, Unknown k) { return p.first < k; });
    return it != coeffs_.end() && it->first == u ? it->second : Rational(0);
}

namespace {

// r = a + k*b over sorted coefficient lists.
std::vector<std::pair<Unknown, Rational>> axpy(const std::vector<std::pair<Unknown, Rational>>& a, const Rational& k,
                                               const std::vector<std::pair<Unknown, Rational>>& b)
{
    std::vector<std::pair<Unknown, Rational>> r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.emplace_back(b[j].first, k * b[j].second);
            ++j;
        } else {
            Rational c = a[i].second + k * b[j].second;
            if (c != 0)
                r.emplace_back(a[i].first, c);
            ++i;
            ++j;
        }
    }
    return r;
}

} // namespace

LinearTerm& LinearTerm::operator+=(const LinearTerm& o)
{
    coeffs_ = axpy(coeffs_, Rational(1), o.coeffs_);
    constant_ += o.constant_;
    return *this;
}

LinearTerm& LinearTerm::operator-=(const LinearTerm& o)
{
    coeffs_ = axpy(coeffs_, Rational(-1), o.coeffs_);
    constant_ -= o.constant_;
    return *this;
}

LinearTerm& LinearTerm::operator*=(const Rational& k)
{
    if (k == 0) {
        coeffs_.clear();
        constant_ = 0;
        return *this;
    }
    for (auto& [u, a] : coeffs_)
        a *= k;
    constant_ *= k;
    return *this;
}

LinearTerm LinearTerm::substitute(Unknown u, const LinearTerm& by) const
{
    Rational a = coeff(u);
    if (a == 0)
        return *this;
    LinearTerm t = *this;
    t.coeffs_.erase(std::find_if(t.coeffs_.begin(), t.coeffs_.end(), [u](const auto& p) { return p.first == u; }));
    t.coeffs_ = axpy(t.coeffs_, a, by.coeffs_);
    t.constant_ += a * by.constant_;
    return t;
}

LinearTerm LinearTerm::rename(const std::map<Unknown, Unknown>& m) const
{
    LinearTerm t(constant_);
    for (const auto& [u, a] : coeffs_) {
        auto it = m.find(u);
        t += var(it == m.end() ? u : it->second, a);
    }
    return t;
}

Rational LinearTerm::eval(const Witness& w) const
{
    Rational v = constant_;
    for (const auto& [u, a] : coeffs_) {
        auto it = w.find(u);
        if (it != w.end())
            v += a * it->second;
    }
    return v;
}

bool LinearConstraint::holds(const Witness& w) const
{
    Rational v = term.eval(w);
    switch (rel) {
    case Relation::Lt: return v < 0;
    case Relation::Le: return v <= 0;
    case Relation::Eq: return v == 0;
    }
    return false;
}

// ---------------------------------------------------------------- systems

Unknown LinearSystem::add_unknown(std::string name)
{
    Unknown u = next_;
    declare(u, std::move(name));
    return u;
}

void LinearSystem::declare(Unknown u, std::string name)
{
    if (declared(u))
        throw std::logic_error("unknown declared twice");
    unknowns_.push_back(u);
    names_[u] = name.empty() ? "u" + std::to_string(u) : std::move(name);
    next_ = std::max<Unknown>(next_, u + 1);
}

void LinearSystem::add_all(const std::vector<LinearConstraint>& cs)
{
    constraints_.insert(constraints_.end(), cs.begin(), cs.end());
}

std::string LinearSystem::name(Unknown u) const
{
    auto it = names_.find(u);
    return it == names_.end() ? "u" + std::to_string(u) : it->second;
}

bool LinearSystem::declared(Unknown u) const
{
    return names_.count(u) != 0;
}

void LinearSystem::drop_unknown(Unknown u)
{
    unknowns_.erase(std::remove(unknowns_.begin(), unknowns_.end(), u), unknowns_.end());
    names_.erase(u);
}

std::string LinearSystem::to_string() const
{
    std::string s;
    for (const LinearConstraint& c : constraints_) {
        bool first = true;
        for (const auto& [u, a] : c.term.coeffs()) {
            s += (first ? "" : " + ") + tbreach::to_string(a) + "*" + name(u);
            first = false;
        }
        if (c.term.constant() != 0 || first)
            s += (first ? "" : " + ") + tbreach::to_string(c.term.constant());
        s += c.rel == Relation::Lt ? " < 0\n" : c.rel == Relation::Le ? " <= 0\n" : " = 0\n";
    }
    return s;
}

// ---------------------------------------------------------------- elimination core

namespace {

struct Record {
    Unknown u;
    bool substitution;               // u = expr
    LinearTerm expr;                 // when substitution
    std::vector<LinearConstraint> bounds; // otherwise: constraints mentioning u
};

LinearConstraint falsum()
{
    return {LinearTerm(1), Relation::Le};
}

// Scales so the first coefficient is +-1 (equalities: +1).
void normalize(LinearConstraint& c)
{
    if (c.term.is_constant())
        return;
    Rational a = c.term.coeffs().front().second;
    if (c.rel != Relation::Eq && a < 0)
        a = -a;
    if (a != 1)
        c.term *= Rational(1) / a;
}

bool constant_holds(const LinearConstraint& c)
{
    const Rational& k = c.term.constant();
    return c.rel == Relation::Lt ? k < 0 : c.rel == Relation::Le ? k <= 0 : k == 0;
}

// Normalizes, drops tautologies, keeps only the tightest constraint per
// direction. Returns false on a contradiction.
bool tidy(std::vector<LinearConstraint>& cs)
{
    struct Best {
        Rational constant;
        Relation rel;
    };
    std::map<std::vector<std::pair<Unknown, Rational>>, Best> ineq;
    std::set<std::vector<std::pair<Unknown, Rational>>> seen_eq;
    std::vector<LinearConstraint> eqs;
    std::vector<std::vector<std::pair<Unknown, Rational>>> order;
    for (LinearConstraint& c : cs) {
        if (c.term.is_constant()) {
            if (!constant_holds(c))
                return false;
            continue;
        }
        normalize(c);
        if (c.rel == Relation::Eq) {
            // Two equalities with equal coefficients but different constants contradict.
            auto key = c.term.coeffs();
            if (seen_eq.insert(key).second)
                eqs.push_back(c);
            else
                for (const LinearConstraint& e : eqs)
                    if (e.term.coeffs() == key && e.term.constant() != c.term.constant())
                        return false;
            continue;
        }
        auto [it, fresh] = ineq.try_emplace(c.term.coeffs(), Best{c.term.constant(), c.rel});
        if (fresh) {
            order.push_back(c.term.coeffs());
            continue;
        }
        // coeffs*x + k REL 0: a larger k is tighter; strict wins ties.
        if (c.term.constant() > it->second.constant ||
            (c.term.constant() == it->second.constant && c.rel == Relation::Lt))
            it->second = Best{c.term.constant(), c.rel};
    }
    std::vector<LinearConstraint> out = std::move(eqs);
    for (const auto& key : order) {
        const Best& b = ineq.at(key);
        LinearTerm t;
        for (const auto& [u, a] : key)
            t += LinearTerm::var(u, a);
        t += LinearTerm(b.constant);
        out.push_back({t, b.rel});
    }
    cs = std::move(out);
    return true;
}

// Eliminates every unknown accepted by `pick` from cs. Returns false when a
// contradiction shows up.
template <typename Pred>
bool eliminate_core(std::vector<LinearConstraint>& cs, Pred pick, std::vector<Record>* log)
{
    // Equalities first: exact substitution.
    for (;;) {
        std::size_t idx = cs.size();
        Unknown u = 0;
        for (std::size_t i = 0; i < cs.size() && idx == cs.size(); ++i) {
            if (cs[i].rel != Relation::Eq)
                continue;
            for (const auto& [v, a] : cs[i].term.coeffs())
                if (pick(v)) {
                    idx = i;
                    u = v;
                    break;
                }
        }
        if (idx == cs.size())
            break;
        LinearTerm t = cs[idx].term;
        Rational a = t.coeff(u);
        t -= LinearTerm::var(u, a);
        LinearTerm expr = t * (Rational(-1) / a);
        cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(idx));
        for (LinearConstraint& c : cs)
            c.term = c.term.substitute(u, expr);
        if (log)
            log->push_back(Record{u, true, expr, {}});
    }
    if (!tidy(cs))
        return false;

    for (;;) {
        // Greedy order: the unknown producing the fewest new constraints.
        std::map<Unknown, std::pair<std::size_t, std::size_t>> occ;
        for (const LinearConstraint& c : cs)
            for (const auto& [v, a] : c.term.coeffs())
                if (pick(v)) {
                    auto& o = occ[v];
                    (a > 0 ? o.first : o.second)++;
                }
        if (occ.empty())
            return true;
        Unknown u = occ.begin()->first;
        long best = 0;
        bool first = true;
        for (const auto& [v, o] : occ) {
            long cost = static_cast<long>(o.first * o.second) - static_cast<long>(o.first + o.second);
            if (first || cost < best) {
                best = cost;
                u = v;
                first = false;
            }
        }
        std::vector<LinearConstraint> upper, lower, rest;
        for (LinearConstraint& c : cs) {
            Rational a = c.term.coeff(u);
            if (a > 0)
                upper.push_back(std::move(c));
            else if (a < 0)
                lower.push_back(std::move(c));
            else
                rest.push_back(std::move(c));
        }
        for (const LinearConstraint& lo : lower)
            for (const LinearConstraint& up : upper) {
                Rational al = -lo.term.coeff(u);
                Rational au = up.term.coeff(u);
                LinearConstraint c{lo.term * au + up.term * al,
                                   (lo.rel == Relation::Lt || up.rel == Relation::Lt) ? Relation::Lt : Relation::Le};
                rest.push_back(std::move(c));
            }
        if (log) {
            Record r{u, false, {}, {}};
            r.bounds.insert(r.bounds.end(), lower.begin(), lower.end());
            r.bounds.insert(r.bounds.end(), upper.begin(), upper.end());
            log->push_back(std::move(r));
        }
        cs = std::move(rest);
        if (!tidy(cs))
            return false;
    }
}

Rational pick_value(Unknown u, const std::vector<LinearConstraint>& bounds, const Witness& w)
{
    bool has_lo = false, has_hi = false, lo_strict = false, hi_strict = false;
    Rational lo, hi;
    for (const LinearConstraint& c : bounds) {
        Rational a = c.term.coeff(u);
        // a*u + rest REL 0  =>  u REL' -rest/a
        Rational rest = (c.term - LinearTerm::var(u, a)).eval(w);
        Rational v = -rest / a;
        bool strict = c.rel == Relation::Lt;
        if (a > 0) {
            if (!has_hi || v < hi || (v == hi && strict)) {
                hi = v;
                hi_strict = strict;
            }
            has_hi = true;
        } else {
            if (!has_lo || v > lo || (v == lo && strict)) {
                lo = v;
                lo_strict = strict;
            }
            has_lo = true;
        }
    }
    if (!has_lo && !has_hi)
        return 0;
    if (!has_hi)
        return lo_strict ? lo + 1 : lo;
    if (!has_lo)
        return hi_strict ? hi - 1 : hi;
    if (!lo_strict)
        return lo;
    if (!hi_strict)
        return hi;
    return (lo + hi) / 2;
}

} // namespace

// ---------------------------------------------------------------- entry points

Feasibility feasible(const LinearSystem& s)
{
    std::vector<LinearConstraint> cs = s.constraints();
    std::vector<Record> log;
    Feasibility f;
    if (!eliminate_core(cs, [](Unknown) { return true; }, &log))
        return f;
    f.sat = true;
    Witness w;
    for (auto it = log.rbegin(); it != log.rend(); ++it) {
        if (it->substitution) {
            w[it->u] = it->expr.eval(w);
            continue;
        }
        w[it->u] = pick_value(it->u, it->bounds, w);
    }
    for (Unknown u : s.unknowns())
        w.emplace(u, Rational(0));
    for (const LinearConstraint& c : s.constraints())
        for (const auto& [u, a] : c.term.coeffs())
            w.emplace(u, Rational(0));
    if (!check_witness(s, w))
        throw std::logic_error("lra: back-substituted witness fails the certificate check");
    f.witness = std::move(w);
    return f;
}

bool is_feasible(const LinearSystem& s)
{
    std::vector<LinearConstraint> cs = s.constraints();
    return eliminate_core(cs, [](Unknown) { return true; }, nullptr);
}

LinearSystem eliminate(const LinearSystem& s, Unknown u)
{
    return project(s, [&] {
        std::vector<Unknown> keep;
        for (Unknown v : s.unknowns())
            if (v != u)
                keep.push_back(v);
        return keep;
    }());
}

LinearSystem project(const LinearSystem& s, const std::vector<Unknown>& keep)
{
    std::set<Unknown> k(keep.begin(), keep.end());
    std::vector<LinearConstraint> cs = s.constraints();
    LinearSystem out;
    for (Unknown u : s.unknowns())
        if (k.count(u))
            out.declare(u, s.name(u));
    if (!eliminate_core(cs, [&](Unknown u) { return k.count(u) == 0; }, nullptr)) {
        out.add(falsum());
        return out;
    }
    out.add_all(cs);
    return out;
}

bool check_witness(const LinearSystem& s, const Witness& w)
{
    for (const LinearConstraint& c : s.constraints())
        if (!c.holds(w))
            return false;
    return true;
}

namespace {

std::vector<LinearConstraint> negations(const LinearConstraint& c)
{
    switch (c.rel) {
    case Relation::Le: return {{-c.term, Relation::Lt}};
    case Relation::Lt: return {{-c.term, Relation::Le}};
    case Relation::Eq: return {{c.term, Relation::Lt}, {-c.term, Relation::Lt}};
    }
    return {};
}

} // namespace

bool implies(const LinearSystem& s, const LinearConstraint& c)
{
    for (const LinearConstraint& n : negations(c)) {
        std::vector<LinearConstraint> cs = s.constraints();
        cs.push_back(n);
        if (eliminate_core(cs, [](Unknown) { return true; }, nullptr))
            return false;
    }
    return true;
}

bool subset(const LinearSystem& p, const LinearSystem& q)
{
    for (const LinearConstraint& c : q.constraints())
        if (!implies(p, c))
            return false;
    return true;
}

LinearSystem remove_redundant(const LinearSystem& s)
{
    std::vector<LinearConstraint> cs = s.constraints();
    if (!tidy(cs)) {
        LinearSystem out;
        for (Unknown u : s.unknowns())
            out.declare(u, s.name(u));
        out.add(falsum());
        return out;
    }
    std::vector<bool> keep(cs.size(), true);
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i].rel == Relation::Eq)
            continue;
        LinearSystem others;
        for (std::size_t j = 0; j < cs.size(); ++j)
            if (j != i && keep[j])
                others.add(cs[j]);
        if (implies(others, cs[i]))
            keep[i] = false;
    }
    LinearSystem out;
    for (Unknown u : s.unknowns())
        out.declare(u, s.name(u));
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (keep[i])
            out.add(cs[i]);
    return out;
}

} // namespace tbreach::lra
