#pragma once

#include "tbreach/dsl.hpp"
#include "tbreach/model.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixtures {

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string data_path(const std::string& rel) { return std::string(TBREACH_TEST_DATA) + "/" + rel; }

inline tbreach::Automaton fig1() { return tbreach::parse_model(read_file(data_path("fig1.ha"))); }

// Files under data/<dir> with the given extension, sorted by name.
inline std::vector<std::string> corpus(const std::string& dir, const std::string& ext)
{
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(data_path(dir)))
        if (e.path().extension() == ext)
            out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

inline tbreach::Rational q(const char* s) { return tbreach::parse_rational(s); }

// (delay, edge-name) steps with singular rates.
inline tbreach::TimedPath path(const tbreach::Automaton& h, std::initializer_list<std::pair<const char*, const char*>> steps)
{
    tbreach::TimedPath p;
    for (auto [d, e] : steps)
        p.push_back(tbreach::TimedStep{q(d), {}, h.edge(e)});
    return p;
}

} // namespace fixtures
