#pragma once

// Textual model format:
//
//   automaton fig1;
//   var x, y;
//   init l0;
//   loc l0 { rate x = 5; rate y in [1, 2]; inv x <= 1 && y <= 1; }
//   edge e01: l0 -> l1 { guard x == 1 && x - y < 2; reset x := 0, y := [0, 1]; }
//
// Comments run from "//" or "#" to the end of the line.

#include "tbreach/model.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tbreach {

struct Diagnostic {
    enum class Severity { Error, Warning };

    int line = 0;
    int column = 0;
    std::string message;
    Severity severity = Severity::Error;
};

std::string format_diagnostic(const Diagnostic& d, std::string_view file = {});

class ParseError : public std::runtime_error {
public:
    explicit ParseError(std::vector<Diagnostic> diags);

    std::vector<Diagnostic> diagnostics;
};

Automaton parse_model(std::string_view src);
std::string print_model(const Automaton& h);

// "[0, 1]", "(-inf, 3]"; throws ParseError.
Interval parse_interval(std::string_view text);

} // namespace tbreach
