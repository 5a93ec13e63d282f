#include "tbreach/dsl.hpp"

#include "tbreach/format.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>

namespace tbreach {

std::string format_diagnostic(const Diagnostic& d, std::string_view file)
{
    std::string s;
    if (!file.empty())
        s += std::string(file) + ":";
    s += std::to_string(d.line) + ":" + std::to_string(d.column) + ": ";
    s += d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ";
    return s + d.message;
}

ParseError::ParseError(std::vector<Diagnostic> diags)
    : std::runtime_error(diags.empty() ? "parse error" : format_diagnostic(diags.front())),
      diagnostics(std::move(diags))
{
}

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok { Ident, Int, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int col = 1;
};

const char* const kPuncts[] = {"->", ":=", "&&", "==", "<=", ">=", "<", ">", "=", ";", ",", "{", "}",
                               "[",  "]",  "(",  ")",  "-",  "+",  ":"};

std::vector<Token> lex(std::string_view src)
{
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '.'))
                ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                ++j;
            t.kind = Tok::Int;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else {
            bool matched = false;
            for (const char* p : kPuncts) {
                std::string_view pv(p);
                if (src.substr(i, pv.size()) == pv) {
                    t.kind = Tok::Punct;
                    t.text = std::string(pv);
                    advance(pv.size());
                    matched = true;
                    break;
                }
            }
            if (!matched)
                throw ParseError({Diagnostic{line, col, std::string("unexpected character '") + c + "'"}});
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

bool is_keyword(const std::string& s)
{
    static const char* const kw[] = {"automaton", "var", "init", "loc",  "edge",  "rate", "inv",
                                      "guard",     "reset", "in", "true", "false", "inf"};
    for (const char* k : kw)
        if (s == k)
            return true;
    return false;
}

// ---------------------------------------------------------------- parser

struct PendingEdge {
    Edge edge;
    Token src, trg;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Automaton run()
    {
        expect_word("automaton");
        h_.name = name("automaton name");
        expect(";");
        while (peek().kind != Tok::End) {
            const Token& t = peek();
            if (t.kind == Tok::Ident && t.text == "var")
                var_decl();
            else if (t.kind == Tok::Ident && t.text == "init")
                init_decl();
            else if (t.kind == Tok::Ident && t.text == "loc")
                loc_decl();
            else if (t.kind == Tok::Ident && t.text == "edge")
                edge_decl();
            else
                fail(t, "expected 'var', 'init', 'loc' or 'edge', found '" + describe(t) + "'");
        }
        resolve();
        if (!diags_.empty())
            throw ParseError(diags_);
        return h_;
    }

    Interval lone_interval()
    {
        Interval i = interval();
        if (peek().kind != Tok::End)
            fail(peek(), "trailing input after interval");
        return i;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Automaton h_;
    std::vector<Diagnostic> diags_;
    std::optional<Token> init_;
    std::vector<Token> loc_tokens_;
    std::vector<PendingEdge> edges_;
    std::map<std::string, Token> rate_seen_;

    const Token& peek() const { return toks_[pos_]; }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

    [[noreturn]] void fail(const Token& t, const std::string& msg)
    {
        diags_.push_back(Diagnostic{t.line, t.col, msg});
        throw ParseError(diags_);
    }

    void error(const Token& t, const std::string& msg) { diags_.push_back(Diagnostic{t.line, t.col, msg}); }

    bool at(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
    bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

    void expect(const char* p)
    {
        if (!at(p))
            fail(peek(), std::string("expected '") + p + "', found '" + describe(peek()) + "'");
        take();
    }

    void expect_word(const char* w)
    {
        if (!at_word(w))
            fail(peek(), std::string("expected '") + w + "', found '" + describe(peek()) + "'");
        take();
    }

    std::string name(const char* what)
    {
        const Token& t = peek();
        if (t.kind != Tok::Ident || is_keyword(t.text))
            fail(t, std::string("expected ") + what + ", found '" + describe(t) + "'");
        return take().text;
    }

    std::int64_t integer()
    {
        bool neg = false;
        if (at("-") || at("+")) {
            neg = take().text == "-";
        }
        const Token& t = peek();
        if (t.kind != Tok::Int)
            fail(t, "expected integer constant, found '" + describe(t) + "'");
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc())
            fail(t, "integer constant out of range");
        take();
        return neg ? -v : v;
    }

    Bound bound(bool lower)
    {
        const Token& start = peek();
        bool neg = false, signed_ = false;
        if (at("-") || at("+")) {
            signed_ = true;
            neg = take().text == "-";
        }
        if (at_word("inf")) {
            take();
            if (neg && lower)
                return Bound::neg_inf();
            if (!neg && !lower)
                return Bound::pos_inf();
            fail(start, std::string("malformed interval: ") + (lower ? "lower" : "upper") + " bound cannot be " +
                            (neg ? "-inf" : "inf"));
        }
        if (signed_ && peek().kind != Tok::Int)
            fail(peek(), "expected integer or inf in interval");
        std::int64_t v = integer();
        return Bound::finite(neg ? -v : v);
    }

    Interval interval()
    {
        const Token& open = peek();
        bool lc;
        if (at("["))
            lc = true;
        else if (at("("))
            lc = false;
        else
            fail(open, "malformed interval: expected '[' or '(', found '" + describe(open) + "'");
        take();
        Bound lo = bound(true);
        expect(",");
        Bound hi = bound(false);
        bool hc;
        if (at("]"))
            hc = true;
        else if (at(")"))
            hc = false;
        else
            fail(peek(), "malformed interval: expected ']' or ')', found '" + describe(peek()) + "'");
        take();
        if ((lc && !lo.is_finite()) || (hc && !hi.is_finite()))
            fail(open, "malformed interval: infinite endpoint must be open");
        Interval i = Interval::make(lo, lc, hi, hc);
        if (i.is_empty())
            fail(open, "malformed interval: " + format_interval(i) + " is empty");
        return i;
    }

    std::size_t var_ref()
    {
        const Token& t = peek();
        std::string n = name("variable");
        if (auto x = h_.find_var(n))
            return *x;
        error(t, "unknown variable '" + n + "'");
        return 0;
    }

    std::optional<Rel> rel()
    {
        static const std::pair<const char*, Rel> rels[] = {
            {"<", Rel::Lt}, {"<=", Rel::Le}, {"==", Rel::Eq}, {"=", Rel::Eq}, {">=", Rel::Ge}, {">", Rel::Gt}};
        for (auto [p, r] : rels)
            if (at(p)) {
                take();
                return r;
            }
        return std::nullopt;
    }

    Atom atom()
    {
        std::size_t x = var_ref();
        if (at_word("in")) {
            take();
            return Atom::rect(x, interval());
        }
        if (at("-")) {
            take();
            std::size_t y = var_ref();
            auto r = rel();
            if (!r)
                fail(peek(), "expected comparison operator, found '" + describe(peek()) + "'");
            return Atom::diag(x, y, *r, integer());
        }
        auto r = rel();
        if (!r)
            fail(peek(), "expected comparison operator or 'in', found '" + describe(peek()) + "'");
        std::int64_t k = integer();
        switch (*r) {
        case Rel::Lt: return Atom::rect(x, Interval::at_most(k, false));
        case Rel::Le: return Atom::rect(x, Interval::at_most(k, true));
        case Rel::Eq: return Atom::rect(x, Interval::point(k));
        case Rel::Ge: return Atom::rect(x, Interval::at_least(k, true));
        case Rel::Gt: return Atom::rect(x, Interval::at_least(k, false));
        }
        return Atom::rect(x, Interval::point(k));
    }

    Guard guard()
    {
        if (at_word("true")) {
            take();
            return Guard::top();
        }
        if (at_word("false")) {
            take();
            return Guard::bottom();
        }
        Guard g;
        g.atoms.push_back(atom());
        while (at("&&")) {
            take();
            g.atoms.push_back(atom());
        }
        return g;
    }

    // Conjoins without reduction so that printed atom lists survive verbatim.
    static void append(Guard& into, const Guard& g)
    {
        if (g.falsum) {
            into = Guard::bottom();
            return;
        }
        if (!into.falsum)
            into.atoms.insert(into.atoms.end(), g.atoms.begin(), g.atoms.end());
    }

    void var_decl()
    {
        take();
        if (!h_.locations.empty() || !edges_.empty())
            error(peek(), "variables must be declared before locations and edges");
        if (at(";")) {
            take();
            return;
        }
        for (;;) {
            const Token& t = peek();
            std::string n = name("variable name");
            if (h_.find_var(n))
                error(t, "duplicate variable '" + n + "'");
            else
                h_.vars.push_back(n);
            if (!at(","))
                break;
            take();
        }
        expect(";");
    }

    void init_decl()
    {
        take();
        if (init_)
            error(peek(), "duplicate init declaration");
        const Token& t = peek();
        name("location name");
        init_ = t;
        expect(";");
    }

    void loc_decl()
    {
        take();
        const Token& t = peek();
        Location l;
        l.name = name("location name");
        l.rates.assign(h_.vars.size(), Interval::point(0));
        std::vector<bool> rated(h_.vars.size(), false);
        expect("{");
        while (!at("}")) {
            if (at_word("rate")) {
                take();
                const Token& vt = peek();
                std::size_t x = var_ref();
                Interval r;
                if (at_word("in")) {
                    take();
                    r = interval();
                } else if (at("=") || at("==")) {
                    take();
                    r = Interval::point(integer());
                } else {
                    fail(peek(), "expected 'in' or '=' after rate variable");
                }
                if (x < rated.size()) {
                    if (rated[x])
                        error(vt, "duplicate rate for '" + h_.vars[x] + "'");
                    rated[x] = true;
                    l.rates[x] = r;
                }
                expect(";");
            } else if (at_word("inv")) {
                take();
                append(l.invariant, guard());
                expect(";");
            } else {
                fail(peek(), "expected 'rate', 'inv' or '}', found '" + describe(peek()) + "'");
            }
        }
        take();
        if (h_.find_location(l.name))
            error(t, "duplicate location '" + l.name + "'");
        h_.locations.push_back(std::move(l));
        loc_tokens_.push_back(t);
    }

    void edge_decl()
    {
        const Token& kw = take();
        PendingEdge pe;
        pe.edge.reset.assign(h_.vars.size(), std::nullopt);
        const Token& first = peek();
        std::string a = name("location or edge name");
        if (at(":")) {
            take();
            pe.edge.name = a;
            pe.src = peek();
            name("location name");
        } else {
            pe.src = first;
        }
        expect("->");
        pe.trg = peek();
        name("location name");
        if (pe.edge.name.empty())
            pe.edge.name = "e" + std::to_string(edges_.size());
        for (const PendingEdge& other : edges_)
            if (other.edge.name == pe.edge.name)
                error(first.text == pe.edge.name ? first : kw, "duplicate edge '" + pe.edge.name + "'");
        expect("{");
        while (!at("}")) {
            if (at_word("guard")) {
                take();
                append(pe.edge.guard, guard());
                expect(";");
            } else if (at_word("reset")) {
                take();
                for (;;) {
                    const Token& vt = peek();
                    std::size_t x = var_ref();
                    expect(":=");
                    Interval r = (at("[") || at("(")) ? interval() : Interval::point(integer());
                    if (x < pe.edge.reset.size()) {
                        if (pe.edge.reset[x])
                            error(vt, "duplicate reset of '" + h_.vars[x] + "'");
                        pe.edge.reset[x] = r;
                    }
                    if (!at(","))
                        break;
                    take();
                }
                expect(";");
            } else {
                fail(peek(), "expected 'guard', 'reset' or '}', found '" + describe(peek()) + "'");
            }
        }
        take();
        edges_.push_back(std::move(pe));
    }

    void resolve()
    {
        auto lookup = [&](const Token& t) -> std::size_t {
            if (auto l = h_.find_location(t.text))
                return *l;
            error(t, "unknown location '" + t.text + "'");
            return 0;
        };
        if (h_.locations.empty())
            error(peek(), "automaton declares no locations");
        if (!init_)
            error(peek(), "missing init declaration");
        else
            h_.init = lookup(*init_);
        for (PendingEdge& pe : edges_) {
            pe.edge.src = lookup(pe.src);
            pe.edge.trg = lookup(pe.trg);
            h_.edges.push_back(std::move(pe.edge));
        }
    }
};

} // namespace

Automaton parse_model(std::string_view src)
{
    return Parser(lex(src)).run();
}

Interval parse_interval(std::string_view text)
{
    return Parser(lex(text)).lone_interval();
}

std::string print_model(const Automaton& h)
{
    std::string s = "automaton " + h.name + ";\n";
    if (!h.vars.empty()) {
        s += "var ";
        for (std::size_t x = 0; x < h.vars.size(); ++x)
            s += (x ? ", " : "") + h.vars[x];
        s += ";\n";
    }
    s += "init " + h.locations.at(h.init).name + ";\n";

    for (const Location& l : h.locations) {
        s += "\nloc " + l.name + " {\n";
        for (std::size_t x = 0; x < h.vars.size(); ++x) {
            const Interval& r = l.rates[x];
            if (r.is_singular())
                s += "  rate " + h.vars[x] + " = " + std::to_string(r.lo.value) + ";\n";
            else
                s += "  rate " + h.vars[x] + " in " + format_interval(r) + ";\n";
        }
        if (!l.invariant.is_true())
            s += "  inv " + format_guard(l.invariant, h.vars) + ";\n";
        s += "}\n";
    }

    for (const Edge& e : h.edges) {
        s += "\nedge " + e.name + ": " + h.locations[e.src].name + " -> " + h.locations[e.trg].name + " {\n";
        if (!e.guard.is_true())
            s += "  guard " + format_guard(e.guard, h.vars) + ";\n";
        std::string resets;
        for (std::size_t x = 0; x < h.vars.size(); ++x) {
            if (!e.reset[x])
                continue;
            if (!resets.empty())
                resets += ", ";
            const Interval& r = *e.reset[x];
            resets += h.vars[x] + " := " + (r.is_singular() ? std::to_string(r.lo.value) : format_interval(r));
        }
        if (!resets.empty())
            s += "  reset " + resets + ";\n";
        s += "}\n";
    }
    return s;
}

} // namespace tbreach
