#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eomsim {

enum class ElementKind { Resistor, Inductor, Capacitor, TransmissionLine };

struct Element {
    ElementKind kind;
    std::string name;    // full name including the kind letter, e.g. "Ltank"
    std::string node_a;
    std::string node_b;
    double value;        // ohm / henry / farad (SI)
    double temperature;  // kelvin; meaningful for R and T only
};

/// An arbitrary linear electrical circuit as seen from a pair of coupling
/// terminals. The coupling capacitor itself is never part of the netlist;
/// it belongs to the transducer branch hung across `couple_terminals`.
struct Netlist {
    std::vector<Element> elements;
    std::pair<std::string, std::string> couple_terminals;
    std::string ground = "0";
};

/// Parse the SPICE-like grammar:
///   R<name> <node> <node> <ohms>  [temp=<K>]
///   L<name> <node> <node> <henry>
///   C<name> <node> <node> <farad>
///   T<name> <node> <node> <ohms>  [temp=<K>]   (semi-infinite line port)
///   .couple <node> <node>
/// '#' starts a comment; values accept scientific notation and the SI
/// suffixes p, n, u, m, k, M, G.
Netlist parse_netlist(std::string_view text);

/// Canonical text form; parse_netlist(print_netlist(n)) reproduces n.
std::string print_netlist(const Netlist& net);

/// Parse a single value token with optional SI suffix. Throws SyntaxError
/// on garbage (line/column reported as given).
double parse_si_value(std::string_view token, int line, int column);

/// Structural validation used by parse_netlist; throws on violation.
void validate_netlist(const Netlist& net);

}  // namespace eomsim
