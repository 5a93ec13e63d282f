#include "tbreach/json_io.hpp"

#include "tbreach/dsl.hpp"
#include "tbreach/format.hpp"

namespace tbreach {

namespace {

Json valuation_json(const Automaton& h, const std::vector<Rational>& v)
{
    Json j = Json::object();
    for (std::size_t x = 0; x < h.vars.size(); ++x)
        j[h.vars[x]] = to_string(v[x]);
    return j;
}

std::vector<Rational> valuation_from(const Automaton& h, const Json& j, bool fill_zero)
{
    std::vector<Rational> v(h.vars.size(), Rational(0));
    std::vector<bool> seen(h.vars.size(), false);
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto x = h.find_var(it.key());
        if (!x)
            throw ModelError("unknown variable '" + it.key() + "' in JSON");
        v[*x] = rational_from_json(it.value());
        seen[*x] = true;
    }
    if (!fill_zero)
        for (std::size_t x = 0; x < seen.size(); ++x)
            if (!seen[x])
                throw ModelError("missing value for variable '" + h.vars[x] + "'");
    return v;
}

Json guard_json(const Guard& g, const std::vector<std::string>& vars)
{
    if (g.falsum)
        return "false";
    Json arr = Json::array();
    for (const Atom& a : g.atoms) {
        Json o;
        if (a.kind == Atom::Kind::Rect) {
            o["var"] = vars[a.x];
            o["in"] = format_interval(a.interval);
        } else {
            o["diag"] = Json::array({vars[a.x], vars[a.y]});
            o["rel"] = format_rel(a.rel);
            o["const"] = a.constant;
        }
        arr.push_back(o);
    }
    return arr;
}

Guard guard_from(const Json& j, const Automaton& h)
{
    if (j.is_string() && j.get<std::string>() == "false")
        return Guard::bottom();
    Guard g;
    for (const Json& o : j) {
        auto var = [&](const Json& n) {
            auto x = h.find_var(n.get<std::string>());
            if (!x)
                throw ModelError("unknown variable '" + n.get<std::string>() + "' in JSON guard");
            return *x;
        };
        if (o.contains("diag")) {
            static const std::pair<const char*, Rel> rels[] = {
                {"<", Rel::Lt}, {"<=", Rel::Le}, {"==", Rel::Eq}, {">=", Rel::Ge}, {">", Rel::Gt}};
            std::string r = o.at("rel").get<std::string>();
            Rel rel = Rel::Le;
            bool ok = false;
            for (auto [p, v] : rels)
                if (r == p) {
                    rel = v;
                    ok = true;
                }
            if (!ok)
                throw ModelError("unknown relation '" + r + "'");
            g.atoms.push_back(Atom::diag(var(o.at("diag").at(0)), var(o.at("diag").at(1)), rel, o.at("const").get<std::int64_t>()));
        } else {
            g.atoms.push_back(Atom::rect(var(o.at("var")), parse_interval(o.at("in").get<std::string>())));
        }
    }
    return g;
}

} // namespace

Rational rational_from_json(const Json& j)
{
    if (j.is_number_integer())
        return Rational(j.get<long>());
    if (j.is_string())
        return parse_rational(j.get<std::string>());
    throw ModelError("expected a rational (\"num/den\" string or integer)");
}

Json to_json(const Automaton& h)
{
    Json j;
    j["name"] = h.name;
    j["vars"] = h.vars;
    j["init"] = h.locations.at(h.init).name;
    Json locs = Json::array();
    for (const Location& l : h.locations) {
        Json o;
        o["name"] = l.name;
        Json rates = Json::object();
        for (std::size_t x = 0; x < h.vars.size(); ++x)
            rates[h.vars[x]] = format_interval(l.rates[x]);
        o["rates"] = rates;
        o["invariant"] = guard_json(l.invariant, h.vars);
        locs.push_back(o);
    }
    j["locations"] = locs;
    Json edges = Json::array();
    for (const Edge& e : h.edges) {
        Json o;
        o["name"] = e.name;
        o["src"] = h.locations[e.src].name;
        o["trg"] = h.locations[e.trg].name;
        o["guard"] = guard_json(e.guard, h.vars);
        Json reset = Json::object();
        for (std::size_t x = 0; x < h.vars.size(); ++x)
            if (e.reset[x])
                reset[h.vars[x]] = format_interval(*e.reset[x]);
        o["reset"] = reset;
        edges.push_back(o);
    }
    j["edges"] = edges;
    return j;
}

Automaton automaton_from_json(const Json& j)
{
    Automaton h;
    h.name = j.at("name").get<std::string>();
    h.vars = j.at("vars").get<std::vector<std::string>>();
    for (const Json& o : j.at("locations")) {
        Location l;
        l.name = o.at("name").get<std::string>();
        l.rates.assign(h.vars.size(), Interval::point(0));
        for (auto it = o.at("rates").begin(); it != o.at("rates").end(); ++it) {
            auto x = h.find_var(it.key());
            if (!x)
                throw ModelError("unknown variable '" + it.key() + "' in rates");
            l.rates[*x] = parse_interval(it.value().get<std::string>());
        }
        l.invariant = guard_from(o.value("invariant", Json::array()), h);
        h.locations.push_back(std::move(l));
    }
    h.init = h.location(j.at("init").get<std::string>());
    for (const Json& o : j.at("edges")) {
        Edge e;
        e.name = o.at("name").get<std::string>();
        e.src = h.location(o.at("src").get<std::string>());
        e.trg = h.location(o.at("trg").get<std::string>());
        e.guard = guard_from(o.value("guard", Json::array()), h);
        e.reset.assign(h.vars.size(), std::nullopt);
        if (o.contains("reset"))
            for (auto it = o.at("reset").begin(); it != o.at("reset").end(); ++it) {
                auto x = h.find_var(it.key());
                if (!x)
                    throw ModelError("unknown variable '" + it.key() + "' in reset");
                e.reset[*x] = parse_interval(it.value().get<std::string>());
            }
        h.edges.push_back(std::move(e));
    }
    h.validate();
    return h;
}

Json to_json(const Automaton& h, const State& s)
{
    Json j;
    j["loc"] = h.locations.at(s.loc).name;
    j["valuation"] = valuation_json(h, s.val);
    return j;
}

State state_from_json(const Automaton& h, const Json& j)
{
    State s;
    s.loc = h.location(j.at("loc").get<std::string>());
    s.val = valuation_from(h, j.value("valuation", Json::object()), true);
    return s;
}

Json to_json(const Automaton& h, const TimedPath& p)
{
    Json arr = Json::array();
    for (const TimedStep& s : p) {
        Json o;
        o["delay"] = to_string(s.delay);
        if (!s.rates.empty())
            o["rates"] = valuation_json(h, s.rates);
        o["edge"] = h.edges.at(s.edge).name;
        arr.push_back(o);
    }
    return arr;
}

PathInput path_from_json(const Automaton& h, const Json& j)
{
    PathInput in;
    const Json& steps = j.is_object() ? j.at("steps") : j;
    for (const Json& o : steps) {
        TimedStep s;
        s.delay = rational_from_json(o.at("delay"));
        if (o.contains("rates"))
            s.rates = valuation_from(h, o.at("rates"), false);
        s.edge = h.edge(o.at("edge").get<std::string>());
        in.path.push_back(std::move(s));
        ResetChoices c(h.vars.size());
        if (o.contains("resets"))
            for (auto it = o.at("resets").begin(); it != o.at("resets").end(); ++it) {
                auto x = h.find_var(it.key());
                if (!x)
                    throw ModelError("unknown variable '" + it.key() + "' in resets");
                c[*x] = rational_from_json(it.value());
            }
        else if (o.contains("post_state")) {
            // A run's post-states pin down nondeterministic resets.
            auto v = valuation_from(h, o.at("post_state").at("valuation"), false);
            const Edge& e = h.edges[in.path.back().edge];
            for (std::size_t x = 0; x < h.vars.size(); ++x)
                if (e.reset[x])
                    c[x] = v[x];
        }
        in.choices.push_back(std::move(c));
    }
    return in;
}

Json to_json(const Automaton& h, const Run& r)
{
    Json j;
    j["initial"] = to_json(h, r.initial);
    Json steps = Json::array();
    for (const RunStep& s : r.steps) {
        Json o;
        o["delay"] = to_string(s.step.delay);
        o["rates"] = valuation_json(h, resolve_rates(h, h.edges.at(s.step.edge).src, s.step.rates));
        o["edge"] = h.edges.at(s.step.edge).name;
        o["post_state"] = to_json(h, s.post);
        steps.push_back(o);
    }
    j["steps"] = steps;
    j["duration"] = to_string(r.duration());
    return j;
}

} // namespace tbreach
