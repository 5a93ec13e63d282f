#include "tbreach/reductions.hpp"

#include "tbreach/dsl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <sstream>

namespace tbreach {

std::string to_string(Op op)
{
    switch (op) {
    case Op::Inc: return "inc";
    case Op::Zero: return "zero";
    case Op::Dec: return "dec";
    }
    return "?";
}

std::string to_string(Target t) { return t == Target::NegRates ? "negrates" : "diagonal"; }

std::optional<Target> parse_target(std::string_view s)
{
    if (s == "negrates")
        return Target::NegRates;
    if (s == "diagonal")
        return Target::Diagonal;
    return std::nullopt;
}

std::optional<std::size_t> MinskyMachine::find_state(std::string_view n) const
{
    for (std::size_t q = 0; q < states.size(); ++q)
        if (states[q] == n)
            return q;
    return std::nullopt;
}

const Instruction* MinskyMachine::instruction(std::size_t q) const
{
    for (const Instruction& i : instructions)
        if (i.src == q)
            return &i;
    return nullptr;
}

// ---------------------------------------------------------------- machine text

namespace {

struct Word {
    std::string text;
    int col = 0;
};

std::vector<Word> split_line(std::string_view line, int line_no, std::vector<Diagnostic>& diags)
{
    std::vector<Word> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#')
            break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const int col = static_cast<int>(i) + 1;
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_'))
                ++j;
            out.push_back({std::string(line.substr(i, j - i)), col});
            i = j;
        } else if (c == ':') {
            out.push_back({":", col});
            ++i;
        } else if (line.substr(i, 2) == "->") {
            out.push_back({"->", col});
            i += 2;
        } else {
            diags.push_back({line_no, col, std::string("unexpected character '") + c + "'"});
            return {};
        }
    }
    return out;
}

bool is_name(const std::string& s) { return !s.empty() && !std::isdigit(static_cast<unsigned char>(s[0])); }

struct RawInstruction {
    Word src, counter, next, next_dec;
    bool branching = false;
    int line = 0;
};

} // namespace

MinskyMachine parse_machine(std::string_view src)
{
    std::vector<Diagnostic> diags;
    std::vector<RawInstruction> raw;
    std::optional<std::pair<Word, int>> init, final;
    std::optional<std::pair<std::vector<Word>, int>> counters;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= src.size()) {
        const std::size_t end = std::min(src.find('\n', pos), src.size());
        const std::string_view line = src.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const std::size_t before = diags.size();
        const std::vector<Word> w = split_line(line, line_no, diags);
        if (w.empty() || diags.size() != before)
            continue;
        auto expect = [&](std::size_t k, const char* what, bool name) -> bool {
            if (k >= w.size()) {
                diags.push_back({line_no, static_cast<int>(line.size()) + 1, std::string("expected ") + what});
                return false;
            }
            if (name ? !is_name(w[k].text) : w[k].text != what) {
                diags.push_back({line_no, w[k].col,
                                 std::string("expected ") + (name ? what : "'" + std::string(what) + "'") +
                                     ", found '" + w[k].text + "'"});
                return false;
            }
            return true;
        };
        auto trailing = [&](std::size_t k) {
            if (k < w.size()) {
                diags.push_back({line_no, w[k].col, "unexpected '" + w[k].text + "'"});
                return false;
            }
            return true;
        };
        const std::string& head = w[0].text;
        if (head == "counters" && (w.size() < 2 || w[1].text != ":")) {
            std::vector<Word> cs(w.begin() + 1, w.end());
            if (cs.size() != 2) {
                diags.push_back({line_no, w[0].col, "exactly two counters are required"});
                continue;
            }
            if (counters)
                diags.push_back({line_no, w[0].col, "counters declared twice"});
            bool ok = true;
            for (std::size_t k = 1; k < w.size(); ++k)
                ok = expect(k, "counter name", true) && ok;
            if (ok && cs[0].text == cs[1].text)
                diags.push_back({line_no, cs[1].col, "duplicate counter '" + cs[1].text + "'"});
            counters = {cs, line_no};
            continue;
        }
        if ((head == "init" || head == "final") && (w.size() < 2 || w[1].text != ":")) {
            if (!expect(1, "state name", true) || !trailing(2))
                continue;
            auto& slot = head == "init" ? init : final;
            if (slot)
                diags.push_back({line_no, w[0].col, head + " declared twice"});
            slot = {w[1], line_no};
            continue;
        }
        RawInstruction r;
        r.line = line_no;
        if (!expect(0, "state name", true) || !expect(1, ":", false))
            continue;
        r.src = w[0];
        if (w.size() > 2 && w[2].text == "inc") {
            if (!expect(3, "counter name", true) || !expect(4, "->", false) || !expect(5, "state name", true) ||
                !trailing(6))
                continue;
            r.counter = w[3];
            r.next = w[5];
        } else if (w.size() > 2 && w[2].text == "ifz") {
            if (!expect(3, "counter name", true) || !expect(4, "->", false) || !expect(5, "state name", true) ||
                !expect(6, "else", false) || !expect(7, "dec", false) || !expect(8, "->", false) ||
                !expect(9, "state name", true) || !trailing(10))
                continue;
            r.branching = true;
            r.counter = w[3];
            r.next = w[5];
            r.next_dec = w[9];
        } else {
            if (w.size() > 2)
                diags.push_back({line_no, w[2].col, "expected 'inc' or 'ifz', found '" + w[2].text + "'"});
            else
                diags.push_back({line_no, static_cast<int>(line.size()) + 1, "expected 'inc' or 'ifz'"});
            continue;
        }
        raw.push_back(r);
    }

    MinskyMachine m;
    m.counters = counters ? std::vector<std::string>{counters->first[0].text, counters->first[1].text}
                          : std::vector<std::string>{"c", "d"};
    auto state = [&](const std::string& n) {
        if (auto q = m.find_state(n))
            return *q;
        m.states.push_back(n);
        return m.states.size() - 1;
    };
    if (init)
        state(init->first.text);
    for (const RawInstruction& r : raw) {
        Instruction ins;
        ins.src = state(r.src.text);
        ins.branching = r.branching;
        ins.next = state(r.next.text);
        if (r.branching)
            ins.next_dec = state(r.next_dec.text);
        const auto c = std::find(m.counters.begin(), m.counters.end(), r.counter.text);
        if (c == m.counters.end())
            diags.push_back({r.line, r.counter.col, "unknown counter '" + r.counter.text + "'"});
        ins.counter = static_cast<std::size_t>(c - m.counters.begin());
        if (m.instruction(ins.src))
            diags.push_back({r.line, r.src.col, "second instruction for state '" + r.src.text + "'"});
        else
            m.instructions.push_back(ins);
    }
    if (final)
        state(final->first.text);

    if (init) {
        m.initial = *m.find_state(init->first.text);
    } else if (!raw.empty()) {
        m.initial = m.instructions.front().src;
    } else if (diags.empty()) {
        diags.push_back({line_no, 1, "empty machine: no instruction and no init state"});
    }
    if (final) {
        m.final = *m.find_state(final->first.text);
    } else {
        std::vector<std::size_t> halting;
        for (std::size_t q = 0; q < m.states.size(); ++q)
            if (!m.instruction(q))
                halting.push_back(q);
        if (halting.size() == 1)
            m.final = halting.front();
        else if (diags.empty())
            diags.push_back({line_no, 1,
                             halting.empty() ? "no final state: every state has an instruction"
                                             : "final state is ambiguous; declare it with 'final'"});
    }
    if (!diags.empty()) {
        std::stable_sort(diags.begin(), diags.end(),
                         [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
        throw ParseError(std::move(diags));
    }
    return m;
}

std::string print_machine(const MinskyMachine& m)
{
    std::ostringstream out;
    out << "counters " << m.counters[0] << ' ' << m.counters[1] << '\n';
    out << "init " << m.states[m.initial] << '\n';
    out << "final " << m.states[m.final] << '\n';
    for (const Instruction& i : m.instructions) {
        out << m.states[i.src] << ": ";
        if (i.branching)
            out << "ifz " << m.counters[i.counter] << " -> " << m.states[i.next] << " else dec -> "
                << m.states[i.next_dec] << '\n';
        else
            out << "inc " << m.counters[i.counter] << " -> " << m.states[i.next] << '\n';
    }
    return out.str();
}

MachineTrace run_machine(const MinskyMachine& m, std::size_t max_steps)
{
    MachineTrace t;
    MachineConfig cur{m.initial, std::vector<std::int64_t>(m.counters.size(), 0)};
    t.configs.push_back(cur);
    while (true) {
        if (cur.state == m.final) {
            t.accepted = true;
            break;
        }
        const Instruction* ins = m.instruction(cur.state);
        if (!ins) {
            t.stuck = true;
            break;
        }
        if (t.steps() >= max_steps)
            break;
        Op op = Op::Inc;
        if (!ins->branching) {
            ++cur.counters[ins->counter];
            cur.state = ins->next;
        } else if (cur.counters[ins->counter] == 0) {
            op = Op::Zero;
            cur.state = ins->next;
        } else {
            op = Op::Dec;
            --cur.counters[ins->counter];
            cur.state = ins->next_dec;
        }
        t.ops.push_back(op);
        t.op_counter.push_back(ins->counter);
        t.configs.push_back(cur);
    }
    return t;
}

// ---------------------------------------------------------------- building blocks

namespace {

Atom eq(std::size_t x, std::int64_t c) { return Atom::rect(x, Interval::point(c)); }
Atom ge(std::size_t x, std::int64_t c) { return Atom::rect(x, Interval::at_least(c)); }
Atom gt(std::size_t x, std::int64_t c) { return Atom::rect(x, Interval::at_least(c, false)); }
Atom le(std::size_t x, std::int64_t c) { return Atom::rect(x, Interval::at_most(c)); }

Rational inv_pow(unsigned long base, std::int64_t e)
{
    BigInt d;
    mpz_ui_pow_ui(d.get_mpz_t(), base, static_cast<unsigned long>(e));
    return Rational(BigInt(1), d);
}

std::size_t add_location(Automaton& h, std::string name, std::vector<std::int64_t> rates, Guard inv)
{
    Location l{std::move(name), {}, std::move(inv)};
    for (std::int64_t r : rates)
        l.rates.push_back(Interval::point(r));
    h.locations.push_back(std::move(l));
    return h.locations.size() - 1;
}

void add_edge(Automaton& h, std::string name, std::size_t src, std::size_t trg, std::vector<Atom> guard,
              const std::vector<std::pair<std::size_t, std::int64_t>>& resets = {})
{
    Edge e;
    e.name = std::move(name);
    e.src = src;
    e.trg = trg;
    e.guard = Guard::of(std::move(guard));
    e.reset.assign(h.vars.size(), std::nullopt);
    for (auto [x, v] : resets)
        e.reset[x] = Interval::point(v);
    h.edges.push_back(std::move(e));
}

// ------------------------------------------------------------ negative rates

enum class Tick : std::uint8_t { A, B };
enum class Phase : std::uint8_t { A, B, D };
enum class Div : std::uint8_t { By4, By16, Probe };

// Phase A: x falls at `down`, y rises at `up`; phase B the other way round.
// Out: x * (up/down)^2 after x/down + x*up/down^2 time units.
std::pair<std::int64_t, std::int64_t> div_rates(Div d)
{
    switch (d) {
    case Div::By4: return {2, 1};
    case Div::By16: return {4, 1};
    case Div::Probe: return {2, 2};
    }
    return {0, 0};
}

char phase_char(Phase p) { return p == Phase::A ? 'A' : p == Phase::B ? 'B' : 'D'; }
const char* tick_name(Tick t) { return t == Tick::A ? "TA" : "TB"; }

} // namespace

Automaton division_gadget(std::int64_t k)
{
    Automaton h;
    h.name = "div" + std::to_string(k * k);
    h.vars = {"x", "y"};
    const std::size_t a = add_location(h, "A", {-k, 1}, Guard::of({ge(0, 0)}));
    const std::size_t b = add_location(h, "B", {1, -k}, Guard::of({ge(1, 0)}));
    const std::size_t d = add_location(h, "D", {0, 0}, Guard::top());
    add_edge(h, "A.step", a, b, {eq(0, 0)});
    add_edge(h, "done", b, d, {eq(1, 0)});
    h.init = a;
    h.validate();
    return h;
}

Automaton tick_automaton()
{
    Automaton h;
    h.name = "ticks";
    h.vars = {"xt", "yt"};
    const std::size_t begin = add_location(h, "begin", {0, 0}, Guard::top());
    const std::size_t ta = add_location(h, "TA", {-2, 1}, Guard::of({ge(0, 0)}));
    const std::size_t tb = add_location(h, "TB", {1, -2}, Guard::of({ge(1, 0)}));
    add_edge(h, "start", begin, tb, {}, {{0, 1}});
    add_edge(h, "half", ta, tb, {eq(0, 0)});
    add_edge(h, "tick", tb, ta, {eq(1, 0)});
    h.init = begin;
    h.validate();
    return h;
}

Compiled compile_negrates(const MinskyMachine& m)
{
    Automaton h;
    h.name = "minsky_negrates";
    h.vars = {"xt", "yt"};
    for (const std::string& c : m.counters) {
        h.vars.push_back("x_" + c);
        h.vars.push_back("y_" + c);
    }
    const std::size_t n = h.vars.size();
    const std::size_t xt = 0, yt = 1;
    auto xc = [](std::size_t c) { return 2 + 2 * c; };
    auto yc = [](std::size_t c) { return 3 + 2 * c; };

    auto tick_rates = [&](Tick t) {
        std::vector<std::int64_t> r(n, 0);
        r[xt] = t == Tick::A ? -2 : 1;
        r[yt] = t == Tick::A ? 1 : -2;
        return r;
    };
    auto tick_inv = [&](Tick t) { return t == Tick::A ? ge(xt, 0) : ge(yt, 0); };

    const std::size_t begin = add_location(h, "begin", std::vector<std::int64_t>(n, 0), Guard::top());
    std::vector<std::array<std::size_t, 2>> wait(m.states.size());
    for (std::size_t q = 0; q < m.states.size(); ++q)
        for (Tick t : {Tick::A, Tick::B})
            wait[q][static_cast<int>(t)] =
                add_location(h, m.states[q] + "." + tick_name(t), tick_rates(t), Guard::of({tick_inv(t)}));
    const std::size_t goal = add_location(h, "goal", std::vector<std::int64_t>(n, 0), Guard::top());

    struct Branch {
        std::size_t q;
        Op op;
        std::size_t counter;
        std::size_t next;
        std::array<Div, 2> div;
        std::map<std::tuple<Phase, Phase, Tick>, std::size_t> locs;
    };
    std::vector<Branch> branches;
    for (const Instruction& ins : m.instructions) {
        if (ins.src == m.final)
            continue;
        std::vector<std::pair<Op, std::size_t>> ops;
        if (ins.branching)
            ops = {{Op::Zero, ins.next}, {Op::Dec, ins.next_dec}};
        else
            ops = {{Op::Inc, ins.next}};
        for (auto [op, next] : ops) {
            Branch b{ins.src, op, ins.counter, next, {Div::By4, Div::By4}, {}};
            b.div[ins.counter] = op == Op::Inc ? Div::By16 : op == Op::Zero ? Div::By4 : Div::Probe;
            branches.push_back(std::move(b));
        }
    }
    const std::array<Phase, 3> phases{Phase::A, Phase::B, Phase::D};
    for (Branch& b : branches) {
        for (Phase pc : phases)
            for (Phase pd : phases) {
                if (pc == Phase::D && pd == Phase::D)
                    continue;
                for (Tick t : {Tick::A, Tick::B}) {
                    std::vector<std::int64_t> r = tick_rates(t);
                    Guard inv = Guard::of({tick_inv(t)});
                    const std::array<Phase, 2> ph{pc, pd};
                    for (std::size_t c = 0; c < 2; ++c) {
                        const auto [down, up] = div_rates(b.div[c]);
                        if (ph[c] == Phase::A) {
                            r[xc(c)] = -down;
                            r[yc(c)] = up;
                            inv.atoms.push_back(ge(xc(c), 0));
                        } else if (ph[c] == Phase::B) {
                            r[xc(c)] = up;
                            r[yc(c)] = -down;
                            inv.atoms.push_back(ge(yc(c), 0));
                        }
                    }
                    std::string name = m.states[b.q] + "." + to_string(b.op) + "." + phase_char(pc) + phase_char(pd) +
                                       "." + tick_name(t);
                    b.locs[{pc, pd, t}] = add_location(h, std::move(name), std::move(r), std::move(inv));
                }
            }
    }

    add_edge(h, "start", begin, wait[m.initial][1], {},
             {{xt, 1}, {xc(0), 1}, {xc(1), 1}});
    // Tick gadget: the half-way switch in every location with the tick in phase A.
    const std::size_t n_locs = h.locations.size();
    std::vector<std::optional<std::pair<std::size_t, std::size_t>>> half(n_locs);
    for (std::size_t q = 0; q < m.states.size(); ++q)
        half[wait[q][0]] = std::pair{wait[q][0], wait[q][1]};
    for (const Branch& b : branches)
        for (const auto& [key, l] : b.locs)
            if (std::get<2>(key) == Tick::A)
                half[l] = std::pair{l, b.locs.at({std::get<0>(key), std::get<1>(key), Tick::B})};
    for (std::size_t l = 0; l < n_locs; ++l)
        if (half[l])
            add_edge(h, h.locations[l].name + ".half", half[l]->first, half[l]->second, {eq(xt, 0)});
    // Ticks start the gadgets of the instruction.
    for (const Branch& b : branches)
        add_edge(h, m.states[b.q] + ".tick." + to_string(b.op), wait[b.q][1], b.locs.at({Phase::A, Phase::A, Tick::A}),
                 {eq(yt, 0)});
    // Division gadget steps, interleaved.
    for (const Branch& b : branches) {
        for (const auto& [key, l] : b.locs) {
            const auto [pc, pd, t] = key;
            const std::array<Phase, 2> ph{pc, pd};
            for (std::size_t c = 0; c < 2; ++c) {
                if (ph[c] == Phase::D)
                    continue;
                std::array<Phase, 2> nph = ph;
                std::vector<Atom> guard;
                if (ph[c] == Phase::A) {
                    nph[c] = Phase::B;
                    guard.push_back(eq(xc(c), 0));
                    if (c == b.counter && b.op == Op::Zero)
                        guard.push_back(eq(xt, 0)); // x_c reached 0 together with xt: x_c was xt
                    if (c == b.counter && b.op == Op::Dec) {
                        if (t != Tick::A)
                            continue;
                        guard.push_back(gt(xt, 0)); // x_c reached 0 before xt: x_c was below xt
                    }
                } else {
                    nph[c] = Phase::D;
                    guard.push_back(eq(yc(c), 0));
                }
                const std::size_t trg = nph[0] == Phase::D && nph[1] == Phase::D
                                            ? wait[b.next][static_cast<int>(t)]
                                            : b.locs.at({nph[0], nph[1], t});
                add_edge(h, h.locations[l].name + "." + m.counters[c], l, trg, std::move(guard));
            }
        }
    }
    for (Tick t : {Tick::A, Tick::B})
        add_edge(h, h.locations[wait[m.final][static_cast<int>(t)]].name + ".goal", wait[m.final][static_cast<int>(t)],
                 goal, {});
    h.init = begin;
    h.validate();
    return Compiled{std::move(h), Target::NegRates, goal, std::nullopt, Rational(1)};
}

// ---------------------------------------------------------------- diagonal

namespace {

// Round phases of one auxiliary counter: I/J increment, M/N maintain.
enum class Aux : char { I = 'I', J = 'J', M = 'M', N = 'N' };

struct AuxVars {
    std::size_t x, y, z, w;
};

Atom diag_eq(std::size_t a, std::size_t b) { return Atom::diag(a, b, Rel::Eq, 0); }
Atom diag_ge(std::size_t a, std::size_t b) { return Atom::diag(a, b, Rel::Ge, 0); }

Atom aux_invariant(Aux s, const AuxVars& v)
{
    switch (s) {
    case Aux::I: return diag_ge(v.x, v.w);
    case Aux::M: return diag_ge(v.x, v.z);
    case Aux::J:
    case Aux::N: return diag_ge(v.y, v.z);
    }
    return diag_ge(v.x, v.z);
}

struct AuxStep {
    Aux next;
    Atom guard;
    std::vector<std::size_t> resets;
};

AuxStep aux_step(Aux s, const AuxVars& v)
{
    switch (s) {
    case Aux::I: return {Aux::J, diag_eq(v.x, v.w), {v.x, v.z, v.w}};
    case Aux::J: return {Aux::M, diag_eq(v.y, v.z), {v.y, v.z, v.w}};
    case Aux::M: return {Aux::N, diag_eq(v.x, v.z), {v.x, v.z}};
    case Aux::N: return {Aux::M, diag_eq(v.y, v.z), {v.y, v.z, v.w}};
    }
    return {Aux::M, diag_eq(v.x, v.z), {}};
}

std::vector<std::pair<std::size_t, std::int64_t>> zeros(const std::vector<std::size_t>& xs)
{
    std::vector<std::pair<std::size_t, std::int64_t>> r;
    for (std::size_t x : xs)
        r.emplace_back(x, 0);
    return r;
}

} // namespace

Automaton diagonal_counter_automaton()
{
    Automaton h;
    h.name = "aux_counter";
    h.vars = {"x", "y", "z", "w"};
    const AuxVars v{0, 1, 2, 3};
    const std::vector<std::int64_t> rates{1, 1, 2, 3};
    std::map<Aux, std::size_t> loc;
    const std::pair<Aux, const char*> names[] = {{Aux::M, "M1"}, {Aux::N, "M2"}, {Aux::I, "I1"}, {Aux::J, "I2"}};
    for (auto [s, name] : names)
        loc[s] = add_location(h, name, rates, Guard::of({aux_invariant(s, v)}));
    for (auto [s, name] : names) {
        const AuxStep st = aux_step(s, v);
        const std::string en = s == Aux::N ? "maintain" : s == Aux::J ? "increment" : std::string(name) + ".step";
        add_edge(h, en, loc[s], loc[st.next], {st.guard}, zeros(st.resets));
    }
    h.init = loc[Aux::M];
    h.validate();
    return h;
}

std::int64_t diagonal_init_rounds(std::size_t m)
{
    // Smallest k with 2^k >= 2m, i.e. k >= log2(m) + 1.
    std::int64_t k = 0;
    const std::size_t target = 2 * std::max<std::size_t>(m, 1);
    while ((std::size_t{1} << k) < target)
        ++k;
    return k;
}

Compiled compile_diagonal(const MinskyMachine& m, std::optional<std::int64_t> init_rounds)
{
    Automaton h;
    h.name = "minsky_diagonal";
    std::vector<std::string> aux_names;
    for (const std::string& c : m.counters) {
        aux_names.push_back(c + "_bot");
        aux_names.push_back(c + "_top");
    }
    std::vector<AuxVars> av;
    std::vector<std::int64_t> rates;
    for (const std::string& a : aux_names) {
        const std::size_t b = h.vars.size();
        for (const char* p : {"x_", "y_", "z_", "w_"})
            h.vars.push_back(p + a);
        av.push_back({b, b + 1, b + 2, b + 3});
        rates.insert(rates.end(), {1, 1, 2, 3});
    }
    const std::size_t na = av.size();
    auto bot = [](std::size_t c) { return 2 * c; };
    auto top = [](std::size_t c) { return 2 * c + 1; };

    Guard urgent;
    for (const AuxVars& v : av)
        urgent.atoms.push_back(le(v.y, 0));
    std::vector<Atom> at_boundary;
    for (const AuxVars& v : av)
        at_boundary.push_back(eq(v.y, 0));

    const std::size_t begin = add_location(h, "begin", rates, urgent);
    std::vector<std::size_t> at(m.states.size());
    for (std::size_t q = 0; q < m.states.size(); ++q)
        at[q] = add_location(h, m.states[q] + ".at", rates, urgent);
    const std::size_t goal = add_location(h, "goal", rates, Guard::top());

    // Initialization: rounds incrementing all auxiliary counters together.
    std::vector<std::pair<std::size_t, std::int64_t>> ones;
    for (const AuxVars& v : av)
        ones.emplace_back(v.x, 1);
    auto all = [&](Aux s) {
        Guard inv;
        std::vector<Atom> guard;
        std::vector<std::size_t> resets;
        for (const AuxVars& v : av) {
            inv.atoms.push_back(aux_invariant(s, v));
            const AuxStep st = aux_step(s, v);
            guard.push_back(st.guard);
            resets.insert(resets.end(), st.resets.begin(), st.resets.end());
        }
        return std::tuple{inv, guard, zeros(resets)};
    };
    auto [inv_i, guard_i, reset_i] = all(Aux::I);
    auto [inv_j, guard_j, reset_j] = all(Aux::J);
    auto init_round = [&](const std::string& prefix, std::size_t from, std::size_t to) {
        const std::size_t i = add_location(h, prefix + ".I", rates, inv_i);
        const std::size_t j = add_location(h, prefix + ".J", rates, inv_j);
        add_edge(h, prefix + ".round", from, i, {});
        add_edge(h, prefix + ".I.step", i, j, guard_i, reset_i);
        add_edge(h, prefix + ".J.step", j, to, guard_j, reset_j);
    };
    if (init_rounds) {
        std::size_t prev = add_location(h, "boot0", rates, urgent);
        add_edge(h, "start", begin, prev, {}, ones);
        for (std::int64_t r = 0; r < *init_rounds; ++r) {
            const std::size_t next = add_location(h, "boot" + std::to_string(r + 1), rates, urgent);
            init_round("boot" + std::to_string(r), prev, next);
            prev = next;
        }
        add_edge(h, h.locations[prev].name + ".done", prev, at[m.initial], {});
    } else {
        const std::size_t boot = add_location(h, "boot", rates, urgent);
        add_edge(h, "start", begin, boot, {}, ones);
        init_round("boot", boot, boot);
        add_edge(h, "boot.done", boot, at[m.initial], {});
    }

    // Instruction gadgets: the incremented auxiliary counter runs one increment
    // round then maintain rounds; all others run maintain rounds; the step ends
    // when every counter is at a round start again.
    auto gadget = [&](const std::string& prefix, std::size_t inc, std::size_t next) {
        std::map<std::string, std::size_t> locs;
        std::vector<std::vector<Aux>> states{{}};
        for (std::size_t a = 0; a < na; ++a) {
            std::vector<std::vector<Aux>> grown;
            const std::vector<Aux> opts = a == inc ? std::vector<Aux>{Aux::I, Aux::J, Aux::M, Aux::N}
                                                   : std::vector<Aux>{Aux::M, Aux::N};
            for (const auto& s : states)
                for (Aux o : opts) {
                    grown.push_back(s);
                    grown.back().push_back(o);
                }
            states = std::move(grown);
        }
        auto key = [](const std::vector<Aux>& s) {
            std::string k;
            for (Aux a : s)
                k.push_back(static_cast<char>(a));
            return k;
        };
        for (const auto& s : states) {
            Guard inv;
            for (std::size_t a = 0; a < na; ++a)
                inv.atoms.push_back(aux_invariant(s[a], av[a]));
            locs[key(s)] = add_location(h, prefix + "." + key(s), rates, inv);
        }
        for (const auto& s : states) {
            const std::size_t l = locs.at(key(s));
            for (std::size_t a = 0; a < na; ++a) {
                const AuxStep st = aux_step(s[a], av[a]);
                std::vector<Aux> t = s;
                t[a] = st.next;
                add_edge(h, h.locations[l].name + "." + aux_names[a], l, locs.at(key(t)), {st.guard},
                         zeros(st.resets));
            }
            if (std::all_of(s.begin(), s.end(), [](Aux a) { return a == Aux::M; }))
                add_edge(h, h.locations[l].name + ".exit", l, at[next], at_boundary);
        }
        std::vector<Aux> s0(na, Aux::M);
        s0[inc] = Aux::I;
        return locs.at(key(s0));
    };

    for (const Instruction& ins : m.instructions) {
        if (ins.src == m.final)
            continue;
        const std::string& q = m.states[ins.src];
        const AuxVars& b = av[bot(ins.counter)];
        const AuxVars& t = av[top(ins.counter)];
        if (!ins.branching) {
            const std::size_t g = gadget(q + ".inc", top(ins.counter), ins.next);
            add_edge(h, q + ".inc", at[ins.src], g, {});
        } else {
            // c = 0 iff c_top = c_bot iff x_top = x_bot at the round start; otherwise x_top < x_bot.
            add_edge(h, q + ".zero", at[ins.src], at[ins.next], {diag_eq(t.x, b.x)});
            const std::size_t g = gadget(q + ".dec", bot(ins.counter), ins.next_dec);
            add_edge(h, q + ".dec", at[ins.src], g, {Atom::diag(t.x, b.x, Rel::Lt, 0)});
        }
    }
    add_edge(h, m.states[m.final] + ".goal", at[m.final], goal, {});
    h.init = begin;
    h.validate();
    return Compiled{std::move(h), Target::Diagonal, goal, init_rounds, Rational(3)};
}

// ---------------------------------------------------------------- simulation

namespace {

// Set of delays t >= 0, an interval with rational endpoints.
struct Window {
    Rational lo = 0;
    bool lo_closed = true;
    std::optional<Rational> hi;
    bool hi_closed = true;
    bool empty = false;

    // b * t REL c
    void restrict(const Rational& b, Rel rel, const Rational& c)
    {
        if (empty)
            return;
        if (b == 0) {
            const Rational zero(0);
            bool ok = false;
            switch (rel) {
            case Rel::Lt: ok = zero < c; break;
            case Rel::Le: ok = zero <= c; break;
            case Rel::Eq: ok = zero == c; break;
            case Rel::Ge: ok = zero >= c; break;
            case Rel::Gt: ok = zero > c; break;
            }
            empty = !ok;
            return;
        }
        const Rational v = c / b;
        if (b < 0) {
            switch (rel) {
            case Rel::Lt: rel = Rel::Gt; break;
            case Rel::Le: rel = Rel::Ge; break;
            case Rel::Ge: rel = Rel::Le; break;
            case Rel::Gt: rel = Rel::Lt; break;
            case Rel::Eq: break;
            }
        }
        if (rel == Rel::Eq || rel == Rel::Ge || rel == Rel::Gt)
            lower(v, rel != Rel::Gt);
        if (rel == Rel::Eq || rel == Rel::Le || rel == Rel::Lt)
            upper(v, rel != Rel::Lt);
        if (hi && (*hi < lo || (*hi == lo && !(lo_closed && hi_closed))))
            empty = true;
    }

    void lower(const Rational& v, bool closed)
    {
        if (v > lo || (v == lo && !closed)) {
            lo = v;
            lo_closed = closed;
        }
    }
    void upper(const Rational& v, bool closed)
    {
        if (!hi || v < *hi || (v == *hi && !closed)) {
            hi = v;
            hi_closed = closed;
        }
    }

    void restrict(const Guard& g, const Valuation& v, const std::vector<Rational>& r)
    {
        if (g.falsum) {
            empty = true;
            return;
        }
        for (const Atom& a : g.atoms) {
            if (a.kind == Atom::Kind::Diag) {
                restrict(r[a.x] - r[a.y], a.rel, from_int(a.constant) - (v[a.x] - v[a.y]));
                continue;
            }
            const Interval& i = a.interval;
            if (i.lo.is_finite())
                restrict(r[a.x], i.lo_closed ? Rel::Ge : Rel::Gt, from_int(i.lo.value) - v[a.x]);
            if (i.hi.is_finite())
                restrict(r[a.x], i.hi_closed ? Rel::Le : Rel::Lt, from_int(i.hi.value) - v[a.x]);
            if (i.is_empty())
                empty = true;
        }
    }
};

} // namespace

std::vector<Candidate> earliest_candidates(const Automaton& h, const State& s)
{
    const Location& loc = h.locations[s.loc];
    const std::vector<Rational> r = resolve_rates(h, s.loc, {});
    Window inv;
    inv.restrict(loc.invariant, s.val, r);
    if (inv.empty || inv.lo != 0 || !inv.lo_closed)
        return {}; // the invariant does not hold now
    std::vector<Candidate> out;
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
        const Edge& edge = h.edges[e];
        if (edge.src != s.loc)
            continue;
        Window w = inv;
        w.restrict(edge.guard, s.val, r);
        if (w.empty || !w.lo_closed)
            continue;
        if (!out.empty() && w.lo > out.front().delay)
            continue;
        State post = edge_step(h, time_step(h, s, w.lo, r), e);
        if (!eval_guard(h.locations[post.loc].invariant, post.val))
            continue;
        if (!out.empty() && w.lo < out.front().delay)
            out.clear();
        out.push_back({e, w.lo});
    }
    return out;
}

Simulation simulate(const Automaton& h, const State& s0, std::size_t max_events, const Chooser& choose)
{
    Simulation sim;
    sim.run.initial = s0;
    State cur = s0;
    for (std::size_t k = 0; k < max_events; ++k) {
        const std::vector<Candidate> cands = earliest_candidates(h, cur);
        if (cands.empty()) {
            sim.stuck = true;
            break;
        }
        std::optional<std::size_t> pick = choose ? choose(cur, cands) : std::optional<std::size_t>(0);
        if (!pick)
            break;
        const Candidate& c = cands.at(*pick);
        const std::vector<Rational> r = resolve_rates(h, cur.loc, {});
        cur = edge_step(h, time_step(h, cur, c.delay, r), c.edge);
        sim.run.steps.push_back(RunStep{TimedStep{c.delay, r, c.edge}, cur});
    }
    return sim;
}

// ---------------------------------------------------------------- co-simulation

bool CosimReport::all_pass() const
{
    return !failure && std::all_of(checks.begin(), checks.end(), [](const EncodingCheck& c) { return c.pass; });
}

namespace {

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.ends_with(suffix);
}

void check(CosimReport& rep, std::size_t step, std::string quantity, const Rational& expected, const Rational& observed)
{
    rep.checks.push_back({step, std::move(quantity), expected, observed, expected == observed});
}

struct Driver {
    const Automaton& h;
    CosimReport& rep;
    std::size_t max_events;
    State cur;
    Rational time = 0;

    Driver(const Automaton& h, CosimReport& rep, std::size_t max_events)
        : h(h), rep(rep), max_events(max_events), cur(initial_state(h))
    {
    }

    std::vector<Candidate> candidates()
    {
        if (rep.events >= max_events) {
            rep.failure = "event budget exhausted after " + std::to_string(rep.events) + " events";
            return {};
        }
        std::vector<Candidate> c = earliest_candidates(h, cur);
        if (c.empty())
            rep.failure = "stuck in location " + h.locations[cur.loc].name + " at time " + to_string(time);
        return c;
    }

    State peek(const Candidate& c) const { return time_step(h, cur, c.delay, resolve_rates(h, cur.loc, {})); }

    void take(const Candidate& c)
    {
        cur = edge_step(h, peek(c), c.edge);
        time += c.delay;
        ++rep.events;
    }

    std::optional<std::size_t> find(const std::vector<Candidate>& cands, std::string_view suffix) const
    {
        for (std::size_t i = 0; i < cands.size(); ++i)
            if (ends_with(h.edges[cands[i].edge].name, suffix))
                return i;
        return std::nullopt;
    }

    const std::string& loc_name() const { return h.locations[cur.loc].name; }
};

void cosim_negrates(const MinskyMachine& m, const Compiled& c, std::size_t n_steps, CosimReport& rep, Driver& d)
{
    const MachineTrace& tr = rep.trace;
    const Automaton& h = c.automaton;
    std::size_t tick = 0;
    auto counters_check = [&](std::size_t i, const State& s) {
        for (std::size_t k = 0; k < m.counters.size(); ++k)
            check(rep, i, "x_" + m.counters[k],
                  inv_pow(4, static_cast<std::int64_t>(i) + tr.configs[i].counters[k]),
                  s.val[*h.find_var("x_" + m.counters[k])]);
    };
    while (true) {
        const std::vector<Candidate> cands = d.candidates();
        if (cands.empty()) {
            // A machine without instruction blocks the tick: the automaton stops with it.
            if (tr.stuck && tick == tr.steps() && d.loc_name().starts_with(m.states[tr.configs[tick].state] + ".T")) {
                rep.failure.reset();
                counters_check(tick, d.cur);
                rep.steps_simulated = tick;
            }
            return;
        }
        std::size_t pick = 0;
        if (auto g = d.find(cands, ".goal")) {
            pick = *g;
            const std::size_t i = tr.steps();
            if (!tr.accepted || tick != i) {
                rep.failure = "goal reached after " + std::to_string(tick) + " ticks, machine disagrees";
                return;
            }
            counters_check(i, d.cur);
            d.take(cands[pick]);
            rep.goal_reached = true;
            rep.goal_time = d.time;
            rep.steps_simulated = tick;
            return;
        }
        std::optional<std::size_t> tick_edge;
        for (std::size_t k = 0; k < cands.size(); ++k)
            if (h.edges[cands[k].edge].name.find(".tick.") != std::string::npos)
                tick_edge = k;
        if (tick_edge) {
            const std::size_t i = tick;
            const State at = d.peek(cands[*tick_edge]);
            const std::string expected_loc = m.states[tr.configs[i].state] + ".TB";
            if (h.locations[at.loc].name != expected_loc) {
                rep.failure = "tick " + std::to_string(i) + " in " + h.locations[at.loc].name + ", expected " +
                              expected_loc;
                return;
            }
            check(rep, i, "time", 1 - inv_pow(4, static_cast<std::int64_t>(i)), d.time + cands[*tick_edge].delay);
            check(rep, i, "xt", inv_pow(4, static_cast<std::int64_t>(i)), at.val[0]);
            counters_check(i, at);
            if (i >= tr.steps() || i >= n_steps) {
                rep.steps_simulated = i;
                return;
            }
            const auto want = d.find(cands, ".tick." + to_string(tr.ops[i]));
            if (!want) {
                rep.failure = "no " + to_string(tr.ops[i]) + " branch at tick " + std::to_string(i);
                return;
            }
            pick = *want;
            ++tick;
        }
        d.take(cands[pick]);
    }
}

void cosim_diagonal(const MinskyMachine& m, const Compiled& c, std::size_t n_steps, CosimReport& rep, Driver& d)
{
    const MachineTrace& tr = rep.trace;
    const Automaton& h = c.automaton;
    const std::int64_t k = c.init_rounds ? *c.init_rounds : diagonal_init_rounds(tr.steps());
    // Auxiliary counter values at config i: bot = k + decrements, top = k + increments.
    auto aux_value = [&](std::size_t i, std::size_t a) {
        std::int64_t v = k;
        for (std::size_t s = 0; s < i; ++s)
            if (tr.op_counter[s] == a / 2 && tr.ops[s] == (a % 2 == 0 ? Op::Dec : Op::Inc))
                ++v;
        return v;
    };
    std::vector<std::string> aux;
    for (const std::string& cn : m.counters) {
        aux.push_back(cn + "_bot");
        aux.push_back(cn + "_top");
    }
    std::int64_t rounds = 0;
    std::size_t boundary = 0;
    Rational last = 0;
    while (true) {
        const std::vector<Candidate> cands = d.candidates();
        if (cands.empty())
            return;
        std::size_t pick = 0;
        if (auto g = d.find(cands, ".goal"))
            pick = *g;
        else if (auto e = d.find(cands, ".exit"))
            pick = *e;
        else if (auto r = d.find(cands, "boot.round"); r && !c.init_rounds && rounds < k)
            pick = *r;
        else if (auto f = d.find(cands, "boot.done"); f && !c.init_rounds)
            pick = *f;
        const std::string& name = h.edges[cands[pick].edge].name;
        if (ends_with(name, ".round"))
            ++rounds;
        d.take(cands[pick]);
        if (d.cur.loc == c.goal) {
            if (!tr.accepted || boundary != tr.steps() + 1) {
                rep.failure = "goal reached at boundary " + std::to_string(boundary) + ", machine disagrees";
                return;
            }
            rep.goal_reached = true;
            rep.goal_time = d.time;
            return;
        }
        if (!ends_with(d.loc_name(), ".at"))
            continue;
        const std::size_t i = boundary++;
        if (i >= tr.configs.size() || d.loc_name() != m.states[tr.configs[i].state] + ".at") {
            rep.failure = "round boundary " + std::to_string(i) + " in " + d.loc_name() + ", machine disagrees";
            return;
        }
        if (i == 0) {
            check(rep, 0, "init_rounds", Rational(k), Rational(c.init_rounds ? *c.init_rounds : rounds));
            check(rep, 0, "init_time", 2 - 2 * inv_pow(2, k), d.time);
        } else {
            Rational expected = 0;
            if (tr.ops[i - 1] != Op::Zero) {
                const std::size_t inc = 2 * tr.op_counter[i - 1] + (tr.ops[i - 1] == Op::Inc ? 1 : 0);
                for (std::size_t a = 0; a < aux.size(); ++a) {
                    const Rational round = (a == inc ? 1 : 2) * inv_pow(2, aux_value(i - 1, a));
                    expected = std::max(expected, round);
                }
            }
            check(rep, i, "duration", expected, d.time - last);
        }
        last = d.time;
        for (std::size_t a = 0; a < aux.size(); ++a) {
            const Rational x = d.cur.val[*h.find_var("x_" + aux[a])];
            const Rational y = d.cur.val[*h.find_var("y_" + aux[a])];
            check(rep, i, aux[a], inv_pow(2, aux_value(i, a)), abs(x - y));
        }
        rep.steps_simulated = i;
        if (!tr.accepted && (i >= tr.steps() || i >= n_steps))
            return;
    }
}

} // namespace

CosimReport cosimulate(const MinskyMachine& m, const Compiled& c, std::size_t n_steps, std::size_t max_events)
{
    CosimReport rep;
    rep.target = c.target;
    rep.budget = c.budget;
    rep.trace = run_machine(m, n_steps);
    Driver d(c.automaton, rep, max_events);
    if (c.target == Target::NegRates)
        cosim_negrates(m, c, n_steps, rep, d);
    else
        cosim_diagonal(m, c, n_steps, rep, d);
    return rep;
}

} // namespace tbreach
