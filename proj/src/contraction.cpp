#include "tbreach/contraction.hpp"

#include "tbreach/semantics.hpp"

#include <algorithm>

namespace tbreach {

bool is_simple_cycle(const Automaton& h, const std::vector<std::size_t>& edges, std::size_t j, std::size_t k)
{
    if (h.edges[edges[k]].trg != h.edges[edges[j]].src)
        return false;
    std::vector<bool> seen(h.locations.size(), false);
    for (std::size_t i = j; i <= k; ++i) {
        const Edge& e = h.edges[edges[i]];
        if (seen[e.src])
            return false;
        seen[e.src] = true;
        if (i < k && e.trg != h.edges[edges[i + 1]].src)
            return false;
    }
    return true;
}

std::optional<CycleRepeat> find_cycle_repeat(const Automaton& h, const std::vector<std::size_t>& edges)
{
    const std::size_t n = edges.size();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j; k < n && k - j < h.locations.size(); ++k) {
            if (!is_simple_cycle(h, edges, j, k))
                continue;
            const std::size_t len = k - j + 1;
            for (std::size_t j2 = k + 1; j2 + len <= n; ++j2)
                if (std::equal(edges.begin() + static_cast<std::ptrdiff_t>(j),
                               edges.begin() + static_cast<std::ptrdiff_t>(k + 1),
                               edges.begin() + static_cast<std::ptrdiff_t>(j2)))
                    return CycleRepeat{j, k, j2, j2 + len - 1};
        }
    return std::nullopt;
}

namespace {

std::vector<std::size_t> edge_ids(const TimedPath& p)
{
    std::vector<std::size_t> ids;
    ids.reserve(p.size());
    for (const TimedStep& s : p)
        ids.push_back(s.edge);
    return ids;
}

TimedStep merge(const Automaton& h, const TimedStep& a, const TimedStep& b)
{
    TimedStep m{a.delay + b.delay, {}, a.edge};
    if (a.rates.empty() && b.rates.empty())
        return m;
    const std::size_t loc = h.edges[a.edge].src;
    auto ra = resolve_rates(h, loc, a.rates);
    auto rb = resolve_rates(h, loc, b.rates);
    m.rates.resize(ra.size());
    for (std::size_t x = 0; x < ra.size(); ++x)
        m.rates[x] = m.delay == 0 ? ra[x] : (ra[x] * a.delay + rb[x] * b.delay) / m.delay;
    return m;
}

} // namespace

namespace {

TimedPath apply(const Automaton& h, const TimedPath& path, const CycleRepeat& rep)
{
    TimedPath out(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(rep.j));
    for (std::size_t i = rep.j; i <= rep.k; ++i)
        out.push_back(merge(h, path[i], path[rep.j2 + (i - rep.j)]));
    out.insert(out.end(), path.begin() + static_cast<std::ptrdiff_t>(rep.k + 1),
               path.begin() + static_cast<std::ptrdiff_t>(rep.j2));
    out.insert(out.end(), path.begin() + static_cast<std::ptrdiff_t>(rep.k2 + 1), path.end());
    return out;
}

void fill_bounds(const Automaton& h, ContractionReport& r)
{
    r.cnt_star_bound = cnt_star_bound(h.locations.size(), h.edges.size());
    r.contraction_bound = contraction_bound(h.vars.size(), r.cnt_star_bound);
}

} // namespace

TimedPath cnt(const Automaton& h, const TimedPath& path)
{
    auto rep = find_cycle_repeat(h, edge_ids(path));
    return rep ? apply(h, path, *rep) : path;
}

Contracted cnt_star(const Automaton& h, const TimedPath& path)
{
    Contracted c{path, {}};
    c.report.input_length = path.size();
    while (auto rep = find_cycle_repeat(h, edge_ids(c.path))) {
        c.path = apply(h, c.path, *rep);
        c.report.repeats.push_back(*rep);
        ++c.report.iterations;
    }
    c.report.output_length = c.path.size();
    fill_bounds(h, c.report);
    return c;
}

std::vector<std::size_t> ResetLandmarks::all() const
{
    std::vector<std::size_t> marks;
    for (const auto& s : per_var)
        marks.insert(marks.end(), s.begin(), s.end());
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    return marks;
}

ResetLandmarks reset_landmarks(const Automaton& h, const TimedPath& path)
{
    ResetLandmarks lm;
    lm.per_var.resize(h.vars.size());
    for (std::size_t x = 0; x < h.vars.size(); ++x) {
        std::optional<std::size_t> first, last;
        for (std::size_t i = 0; i < path.size(); ++i)
            if (h.edges[path[i].edge].reset[x]) {
                if (!first)
                    first = i;
                last = i;
            }
        if (first)
            lm.per_var[x].push_back(*first);
        if (last && *last != *first)
            lm.per_var[x].push_back(*last);
    }
    return lm;
}

BigInt cnt_star_bound(std::size_t locations, std::size_t edges)
{
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, edges + 1);
    return BigInt(static_cast<unsigned long>(locations)) * (p + 1);
}

BigInt contraction_bound(std::size_t vars, const BigInt& cnt_star_len)
{
    BigInt x(static_cast<unsigned long>(vars));
    return 2 * x + (2 * x + 1) * cnt_star_len;
}

Contracted contraction(const Automaton& h, const TimedPath& path)
{
    Contracted res;
    res.report.input_length = path.size();
    res.report.landmarks = reset_landmarks(h, path).all();

    std::size_t from = 0;
    auto flush = [&](std::size_t to) {
        TimedPath seg(path.begin() + static_cast<std::ptrdiff_t>(from), path.begin() + static_cast<std::ptrdiff_t>(to));
        Contracted c = cnt_star(h, seg);
        res.path.insert(res.path.end(), c.path.begin(), c.path.end());
        res.report.iterations += c.report.iterations;
        res.report.repeats.insert(res.report.repeats.end(), c.report.repeats.begin(), c.report.repeats.end());
    };
    for (std::size_t m : res.report.landmarks) {
        flush(m);
        res.report.output_landmarks.push_back(res.path.size());
        res.path.push_back(path[m]);
        from = m + 1;
    }
    flush(path.size());

    res.report.output_length = res.path.size();
    fill_bounds(h, res.report);
    return res;
}

} // namespace tbreach
