// Three-valued LTL monitors as deterministic Moore machines, built from a
// Büchi automaton pair for the property and its negation.

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "stratmon/b3.hpp"
#include "stratmon/formula.hpp"
#include "stratmon/icgs.hpp"

namespace stratmon {

struct Monitor {
    std::vector<std::string> atoms;  // tracked atoms; letters are bitmasks over this basis
    std::vector<std::string> basis;  // atoms accepted in events (superset of tracked)
    int initial = 0;
    std::vector<std::vector<int>> next; // state -> letter -> state
    std::vector<B3> output;

    size_t state_count() const { return output.size(); }
    size_t letter_count() const { return size_t{1} << atoms.size(); }
};

// Standard construction: Büchi automata for f and !f, per-state emptiness,
// subset construction of both prefix automata, product Moore machine
// (top when the !f side has no live continuation, bot when the f side has
// none), then Moore minimization with canonical state numbering.
Monitor build_monitor(const FormulaPtr& ltl);

// As above with an explicit event-atom basis; events may then mention any
// basis atom, with non-tracked ones projected away.
Monitor build_monitor(const FormulaPtr& ltl, std::vector<std::string> event_basis);

struct MonitorRunResult {
    B3 verdict;                // output after the whole trace
    std::vector<B3> sequence;  // output after each event
    size_t steps = 0;          // transitions taken; equals the trace length
};

// Folds the trace through the machine. Events containing an atom outside the
// monitor's basis raise InputError naming the atom.
MonitorRunResult monitor_run(const Monitor& mon, const Trace& trace);

// Incremental interface for online monitoring.
struct MonitorCursor {
    const Monitor* mon;
    int state;

    explicit MonitorCursor(const Monitor& m) : mon(&m), state(m.initial) {}
    B3 output() const { return mon->output[state]; }
    B3 step(const std::vector<std::string>& event);
};

std::string monitor_to_dot(const Monitor& mon);
nlohmann::ordered_json monitor_to_json(const Monitor& mon);

} // namespace stratmon
