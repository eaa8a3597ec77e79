#include "eomsim/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "eomsim/errors.hpp"

namespace eomsim {

namespace {

struct Token {
    std::string text;
    int column;  // 1-based
};

std::vector<Token> tokenize_line(std::string_view line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#') {
            ++i;
        }
        out.push_back({std::string(line.substr(start, i - start)),
                       static_cast<int>(start) + 1});
    }
    return out;
}

double si_multiplier(char c) {
    switch (c) {
        case 'p': return 1e-12;
        case 'n': return 1e-9;
        case 'u': return 1e-6;
        case 'm': return 1e-3;
        case 'k': return 1e3;
        case 'M': return 1e6;
        case 'G': return 1e9;
        default: return 0.0;
    }
}

}  // namespace

double parse_si_value(std::string_view token, int line, int column) {
    if (token.empty()) throw SyntaxError("empty value", line, column);
    double mult = 1.0;
    std::string_view digits = token;
    char last = token.back();
    if (std::isalpha(static_cast<unsigned char>(last))) {
        mult = si_multiplier(last);
        if (mult == 0.0) {
            throw SyntaxError("unknown SI suffix '" + std::string(1, last) + "'",
                              line, column);
        }
        digits = token.substr(0, token.size() - 1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw SyntaxError("malformed number '" + std::string(token) + "'", line,
                          column);
    }
    return value * mult;
}

Netlist parse_netlist(std::string_view text) {
    Netlist net;
    bool have_couple = false;

    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        ++line_no;
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

        auto tokens = tokenize_line(line);
        if (tokens.empty()) continue;

        const Token& head = tokens.front();
        if (head.text == ".couple") {
            if (tokens.size() != 3) {
                throw SyntaxError(".couple expects two node ids", line_no, head.column);
            }
            if (have_couple) {
                throw SyntaxError("duplicate .couple directive (only one coupling "
                                  "capacitor is supported)",
                                  line_no, head.column);
            }
            net.couple_terminals = {tokens[1].text, tokens[2].text};
            have_couple = true;
            continue;
        }
        if (head.text[0] == '.') {
            throw SyntaxError("unknown directive '" + head.text + "'", line_no,
                              head.column);
        }

        ElementKind kind;
        switch (head.text[0]) {
            case 'R': kind = ElementKind::Resistor; break;
            case 'L': kind = ElementKind::Inductor; break;
            case 'C': kind = ElementKind::Capacitor; break;
            case 'T': kind = ElementKind::TransmissionLine; break;
            default:
                throw SyntaxError("unknown element kind '" + std::string(1, head.text[0]) +
                                  "'", line_no, head.column);
        }
        bool allows_temp =
            kind == ElementKind::Resistor || kind == ElementKind::TransmissionLine;
        size_t expected = 4;
        if (tokens.size() < expected) {
            throw SyntaxError("element statement needs <name> <node> <node> <value>",
                              line_no, head.column);
        }

        Element el;
        el.kind = kind;
        el.name = head.text;
        el.node_a = tokens[1].text;
        el.node_b = tokens[2].text;
        el.value = parse_si_value(tokens[3].text, line_no, tokens[3].column);
        el.temperature = 0.0;

        for (size_t t = 4; t < tokens.size(); ++t) {
            const Token& tok = tokens[t];
            if (tok.text.rfind("temp=", 0) == 0 && allows_temp) {
                el.temperature =
                    parse_si_value(std::string_view(tok.text).substr(5), line_no,
                                   tok.column + 5);
            } else {
                throw SyntaxError("unexpected token '" + tok.text + "'", line_no,
                                  tok.column);
            }
        }

        if (el.node_a == el.node_b) {
            throw SyntaxError("element '" + el.name + "' connects a node to itself",
                              line_no, head.column);
        }
        net.elements.push_back(std::move(el));
    }

    if (!have_couple) {
        throw MissingCoupleDirectiveError(
            "netlist has no .couple directive naming the coupling terminals");
    }
    validate_netlist(net);
    return net;
}

void validate_netlist(const Netlist& net) {
    if (net.couple_terminals.first == net.couple_terminals.second) {
        throw SyntaxError("coupling terminals must be distinct nodes", 0, 0);
    }

    std::set<std::string> names;
    std::map<std::string, int> degree;
    for (const Element& el : net.elements) {
        if (!names.insert(el.name).second) {
            throw SyntaxError("duplicate element name '" + el.name + "'", 0, 0);
        }
        bool zero_ok = el.kind == ElementKind::Resistor;  // R = 0 is an ideal wire
        if (el.value < 0.0 || (!zero_ok && el.value == 0.0) || !std::isfinite(el.value)) {
            throw NonPositiveValueError("element '" + el.name +
                                        "' has non-positive value");
        }
        if (el.temperature < 0.0 || !std::isfinite(el.temperature)) {
            throw NonPositiveValueError("element '" + el.name +
                                        "' has negative temperature");
        }
        degree[el.node_a]++;
        degree[el.node_b]++;
    }

    auto is_terminal = [&](const std::string& n) {
        return n == net.ground || n == net.couple_terminals.first ||
               n == net.couple_terminals.second;
    };
    for (const auto& [node, deg] : degree) {
        if (deg < 2 && !is_terminal(node)) {
            throw DanglingNodeError("node '" + node +
                                    "' is connected to a single element terminal");
        }
    }
    for (const std::string& n :
         {net.couple_terminals.first, net.couple_terminals.second}) {
        if (degree.find(n) == degree.end() && n != net.ground && !net.elements.empty()) {
            throw DanglingNodeError("coupling terminal '" + n +
                                    "' does not appear in the circuit");
        }
    }
}

std::string print_netlist(const Netlist& net) {
    std::ostringstream os;
    os.precision(17);
    for (const Element& el : net.elements) {
        os << el.name << ' ' << el.node_a << ' ' << el.node_b << ' ' << el.value;
        bool has_temp =
            el.kind == ElementKind::Resistor || el.kind == ElementKind::TransmissionLine;
        if (has_temp && el.temperature != 0.0) os << " temp=" << el.temperature;
        os << '\n';
    }
    os << ".couple " << net.couple_terminals.first << ' '
       << net.couple_terminals.second << '\n';
    return os.str();
}

}  // namespace eomsim
