// JSON model schema and trace formats.
//
// Model schema (all keys required, unknown keys rejected):
//   {"agents":[...], "atoms":[...], "states":[...], "initial":"s0",
//    "actions":{"agent":[...]},
//    "indistinguishability":{"agent":[["s1","s2"],...]},
//    "protocol":{"agent":{"state":[...]}},
//    "transitions":[{"from":"s","act":{"agent":"a",...},"to":"s'"}],
//    "labeling":{"state":[...]}}
//
// Trace formats: a JSON array of arrays of atom names, or a `.trace` text
// file with one event per line, atoms comma separated, empty line = empty
// event.

#pragma once

#include <string>

#include "json.hpp"
#include "stratmon/icgs.hpp"

namespace stratmon {

Icgs model_from_json(const nlohmann::json& j);
nlohmann::ordered_json model_to_json(const Icgs& m);

Icgs load_model_file(const std::string& path);
void save_model_file(const Icgs& m, const std::string& path);

// Canonical serialisation: schema key order, transitions sorted by
// (state, joint action code), equivalence classes by smallest member.
std::string model_to_canonical_string(const Icgs& m);

Trace trace_from_json(const nlohmann::json& j);
nlohmann::json trace_to_json(const Trace& t);
Trace parse_trace_text(const std::string& text);
std::string trace_to_text(const Trace& t);

// Dispatches on extension: .json uses the JSON form, everything else the
// line-based text form.
Trace load_trace_file(const std::string& path);
void save_trace_file(const Trace& t, const std::string& path);

} // namespace stratmon
