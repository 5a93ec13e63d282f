// Command-line front end: check, normalize, contract, simulate, compile-minsky, cosim.
//
// Exit codes: 0 yes/success, 1 no/failed, 2 class rejection, 3 parse/input error,
// 4 resource limit, 5 decision procedure and oracle disagree.

#include "tbreach/contraction.hpp"
#include "tbreach/decide.hpp"
#include "tbreach/dsl.hpp"
#include "tbreach/json_io.hpp"
#include "tbreach/normalize.hpp"
#include "tbreach/oracle.hpp"
#include "tbreach/reductions.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace tbreach;

namespace {

constexpr int kYes = 0, kNo = 1, kClass = 2, kInput = 3, kLimit = 4, kDisagree = 5;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path);
    out << text;
}

std::string file_of_error; // set before parsing, for diagnostics

Automaton load_model(const std::string& path)
{
    file_of_error = path;
    return parse_model(read_file(path));
}

MinskyMachine load_machine(const std::string& path)
{
    file_of_error = path;
    return parse_machine(read_file(path));
}

Json load_json(const std::string& path)
{
    try {
        return Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

Rational parse_bound(const std::string& s)
{
    try {
        return parse_rational(s);
    } catch (const std::exception&) {
        throw InputError("malformed rational '" + s + "'");
    }
}

std::size_t goal_location(const Automaton& h, const std::string& name)
{
    if (auto l = h.find_location(name))
        return *l;
    throw InputError("unknown location '" + name + "'");
}

// ---------------------------------------------------------------- check

struct CheckArgs {
    std::string model, goal, bound = "1", witness;
    bool oracle = false;
};

int cmd_check(const CheckArgs& a)
{
    const Automaton h = load_model(a.model);
    const std::size_t goal = goal_location(h, a.goal);
    const Rational T = parse_bound(a.bound);
    if (T < 0)
        throw InputError("the bound must be non-negative");
    const Verdict v = decide_tb_reach(h, goal, T);
    std::cout << (v.reachable ? "YES" : "NO") << '\n';
    std::cout << "goal: " << a.goal << '\n' << "bound: " << to_string(T) << '\n';
    std::cout << "normal form: " << v.stats.normalized_locations << " locations, " << v.stats.normalized_edges
              << " edges\n";
    std::cout << "symbolic states: " << v.stats.nodes << " (" << v.stats.subsumed << " subsumed, " << v.stats.layers
              << " layers)\n";
    std::cout << "bounds: E=" << v.bounds.E.get_str() << " W=" << v.bounds.W.get_str() << " L=" << v.bounds.L.get_str()
              << " K_seg=" << v.bounds.K_seg.get_str() << " K=" << v.bounds.K.get_str() << '\n';
    if (v.reachable) {
        std::cout << "witness: " << v.witness->steps.size() << " steps, duration " << to_string(v.witness->duration())
                  << '\n';
        std::cout << "equality transitions: " << v.equality_transitions << '\n';
        if (!a.witness.empty())
            write_file(a.witness, to_json(h, *v.witness).dump(2) + "\n");
    }
    int code = v.reachable ? kYes : kNo;
    if (a.oracle) {
        const OracleResult o = oracle_tb_reach(h, goal, T);
        std::cout << "oracle: " << to_string(o.verdict) << " (" << o.nodes << " states, depth " << o.depth << ")\n";
        if (o.verdict != OracleVerdict::Unknown && (o.verdict == OracleVerdict::Yes) != v.reachable) {
            std::cerr << "error: the oracle disagrees with the decision procedure\n";
            code = kDisagree;
        }
    }
    return code;
}

// ---------------------------------------------------------------- normalize

struct NormalizeArgs {
    std::string model, goal, stage = "strict";
};

int cmd_normalize(const NormalizeArgs& a)
{
    const Automaton h = load_model(a.model);
    const std::size_t goal = goal_location(h, a.goal);
    const Normalized n = normalize_pipeline(h, goal);
    const Automaton* out = &n.automaton();
    std::vector<std::size_t> back = n.loc_to_original;
    if (a.stage == "dreset") {
        out = &n.h1.automaton;
        back = n.h1.loc_map;
    } else if (a.stage == "cbound") {
        out = &n.h2.automaton;
        back.clear();
        for (std::size_t l : n.h2.loc_map)
            back.push_back(n.h1.loc_map[l]);
    }
    std::cout << print_model(*out);
    std::cout << "# goal-set:";
    for (std::size_t l = 0; l < back.size(); ++l)
        if (back[l] == goal)
            std::cout << ' ' << out->locations[l].name;
    std::cout << '\n';
    return kYes;
}

// ---------------------------------------------------------------- contract

struct ContractArgs {
    std::string model, path, mode = "contraction";
};

Json report_json(const ContractionReport& r)
{
    Json j;
    j["input_length"] = r.input_length;
    j["output_length"] = r.output_length;
    j["iterations"] = r.iterations;
    Json reps = Json::array();
    for (const CycleRepeat& c : r.repeats)
        reps.push_back(Json::array({c.j, c.k, c.j2, c.k2}));
    j["repeats"] = reps;
    j["landmarks"] = r.landmarks;
    j["output_landmarks"] = r.output_landmarks;
    j["cnt_star_bound"] = r.cnt_star_bound.get_str();
    j["contraction_bound"] = r.contraction_bound.get_str();
    return j;
}

int cmd_contract(const ContractArgs& a)
{
    const Automaton h = load_model(a.model);
    const PathInput in = path_from_json(h, load_json(a.path));
    check_chained(h, in.path, h.init);
    const Contracted c = a.mode == "cnt-star" ? cnt_star(h, in.path) : contraction(h, in.path);
    Json j;
    j["mode"] = a.mode;
    j["path"] = to_json(h, c.path);
    j["duration"] = to_string(duration(c.path));
    j["report"] = report_json(c.report);
    std::cout << j.dump(2) << '\n';
    return kYes;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string model, path;
    std::size_t events = 100;
};

int cmd_simulate(const SimulateArgs& a)
{
    const Automaton h = load_model(a.model);
    if (!a.path.empty()) {
        const PathInput in = path_from_json(h, load_json(a.path));
        const ReplayResult r = replay(h, initial_state(h), in.path, in.choices);
        if (!r.run) {
            std::cerr << "rejected at step " << r.failed_step << ": " << r.failure << '\n';
            return kNo;
        }
        std::cout << to_json(h, *r.run).dump(2) << '\n';
        return kYes;
    }
    const Simulation s = simulate(h, initial_state(h), a.events);
    Json j = to_json(h, s.run);
    j["stuck"] = s.stuck;
    std::cout << j.dump(2) << '\n';
    return kYes;
}

// ---------------------------------------------------------------- reductions

struct MinskyArgs {
    std::string machine, target = "negrates";
    std::optional<std::int64_t> init_rounds;
    std::size_t steps = 16;
};

Compiled compile(const MinskyMachine& m, const MinskyArgs& a)
{
    const auto t = parse_target(a.target);
    if (!t)
        throw InputError("unknown target '" + a.target + "' (negrates or diagonal)");
    return *t == Target::NegRates ? compile_negrates(m) : compile_diagonal(m, a.init_rounds);
}

int cmd_compile(const MinskyArgs& a)
{
    const MinskyMachine m = load_machine(a.machine);
    const Compiled c = compile(m, a);
    std::cout << "# goal " << c.automaton.locations[c.goal].name << ", time budget " << to_string(c.budget) << '\n';
    std::cout << print_model(c.automaton);
    return kYes;
}

int cmd_cosim(const MinskyArgs& a)
{
    const MinskyMachine m = load_machine(a.machine);
    const Compiled c = compile(m, a);
    const CosimReport r = cosimulate(m, c, a.steps);
    Json j;
    j["target"] = to_string(r.target);
    j["machine"] = {{"accepted", r.trace.accepted}, {"stuck", r.trace.stuck}, {"steps", r.trace.steps()}};
    j["steps_simulated"] = r.steps_simulated;
    j["goal_reached"] = r.goal_reached;
    if (r.goal_reached)
        j["goal_time"] = to_string(r.goal_time);
    j["budget"] = to_string(r.budget);
    j["events"] = r.events;
    if (r.failure)
        j["failure"] = *r.failure;
    Json checks = Json::array();
    for (const EncodingCheck& e : r.checks)
        checks.push_back({{"step", e.step},
                          {"quantity", e.quantity},
                          {"expected", to_string(e.expected)},
                          {"observed", to_string(e.observed)},
                          {"pass", e.pass}});
    j["checks"] = checks;
    j["pass"] = r.all_pass();
    std::cout << j.dump(2) << '\n';
    return r.all_pass() ? kYes : kNo;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Time-bounded reachability for rectangular hybrid automata"};
    app.require_subcommand(1);

    CheckArgs check;
    auto* c = app.add_subcommand("check", "decide whether GOAL is reachable within the bound");
    c->add_option("model", check.model, "model file")->required();
    c->add_option("goal", check.goal, "goal location")->required();
    c->add_option("--bound,-T", check.bound, "time bound (rational, e.g. 3/2)");
    c->add_option("--emit-witness", check.witness, "write the witness run as JSON");
    c->add_flag("--oracle", check.oracle, "cross-check with the bounded-depth oracle");

    NormalizeArgs norm;
    auto* n = app.add_subcommand("normalize", "print the normal form and its goal set");
    n->add_option("model", norm.model, "model file")->required();
    n->add_option("goal", norm.goal, "goal location")->required();
    n->add_option("--stage", norm.stage, "dreset, cbound or strict")
        ->check(CLI::IsMember({"dreset", "cbound", "strict"}));

    ContractArgs con;
    auto* k = app.add_subcommand("contract", "contract a timed path");
    k->add_option("model", con.model, "model file")->required();
    k->add_option("path", con.path, "timed path (JSON)")->required();
    k->add_option("--mode", con.mode, "cnt-star or contraction")->check(CLI::IsMember({"cnt-star", "contraction"}));

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "replay a timed path, or run the earliest-event simulation");
    s->add_option("model", sim.model, "model file")->required();
    s->add_option("--path", sim.path, "timed path or run (JSON) to replay");
    s->add_option("--events", sim.events, "number of edges for the earliest-event simulation");

    MinskyArgs cm;
    auto* m = app.add_subcommand("compile-minsky", "compile a two-counter machine into a hybrid automaton");
    m->add_option("machine", cm.machine, "machine file")->required();
    m->add_option("--target", cm.target, "negrates or diagonal")->check(CLI::IsMember({"negrates", "diagonal"}));
    m->add_option("--init-rounds", cm.init_rounds, "diagonal: fixed initialization instead of the guessing loop");

    MinskyArgs cs;
    auto* o = app.add_subcommand("cosim", "co-simulate a machine with its compiled automaton");
    o->add_option("machine", cs.machine, "machine file")->required();
    o->add_option("--target", cs.target, "negrates or diagonal")->check(CLI::IsMember({"negrates", "diagonal"}));
    o->add_option("--init-rounds", cs.init_rounds, "diagonal: initialization rounds");
    o->add_option("--steps", cs.steps, "machine steps to simulate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kYes : kInput;
    }

    try {
        if (c->parsed())
            return cmd_check(check);
        if (n->parsed())
            return cmd_normalize(norm);
        if (k->parsed())
            return cmd_contract(con);
        if (s->parsed())
            return cmd_simulate(sim);
        if (m->parsed())
            return cmd_compile(cm);
        if (o->parsed())
            return cmd_cosim(cs);
    } catch (const ParseError& e) {
        for (const Diagnostic& d : e.diagnostics)
            std::cerr << format_diagnostic(d, file_of_error) << '\n';
        return kInput;
    } catch (const ClassError& e) {
        std::cerr << "out of class: " << e.what() << '\n';
        return kClass;
    } catch (const ResourceLimit& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return kLimit;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    }
    return kInput;
}
