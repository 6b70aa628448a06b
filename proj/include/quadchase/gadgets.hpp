#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "quadchase/model.hpp"
#include "quadchase/textio.hpp"

namespace quadchase {

struct GadgetOutput {
    QuadSystem system;
    QueryDocument query;
};

struct GadgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Cfg {
    std::string start;
    std::vector<std::pair<std::string, std::vector<std::string>>> productions;
    std::set<std::string> variables() const;
};

// Two grammars over a shared terminal alphabet into one single-context
// quad-system; the query holds iff the generated languages intersect.
GadgetOutput genCFGIntersection(const Cfg& g1, const Cfg& g2);

// Pure 3-Horn clauses P1 and P2 imply P3, with reserved constants t and f.
// The fixed query is entailed iff the clause set is unsatisfiable.
GadgetOutput genHornSat(const std::vector<std::array<std::string, 3>>& clauses);

// Rule-free coloring instance; the query is entailed iff the graph is
// 3-colorable.
GadgetOutput genThreeColor(const std::vector<std::pair<std::string, std::string>>& edges);

struct DtmTransition {
    std::string from, read, to, write;
    int move = 1;  // +1 right, -1 left
};

struct DtmSpec {
    std::vector<std::string> states;
    std::vector<std::string> alphabet;  // includes the blank symbol
    std::string blank;
    std::string initial;
    std::string accept;
    std::vector<DtmTransition> transitions;
};

// The doubly-exponential tape construction over contexts c0..cn, with the
// configuration chain built from the level n-1 elements. n is capped at 2.
GadgetOutput genDTM(const DtmSpec& machine, const std::string& input, int n);

Cfg cfgFromJson(const nlohmann::json& j);
DtmSpec dtmFromJson(const nlohmann::json& j);
std::vector<std::array<std::string, 3>> clausesFromJson(const nlohmann::json& j);
std::vector<std::pair<std::string, std::string>> edgesFromJson(const nlohmann::json& j);
std::vector<std::pair<std::string, std::string>> completeGraph(int k);

}  // namespace quadchase
