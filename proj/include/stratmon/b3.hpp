// Three-valued verdict domain used by monitors and the combined pipeline.

#pragma once

#include <string>

namespace stratmon {

enum class B3 {
    Bot,      // definitive violation
    Unknown,  // no verdict yet
    Top,      // definitive satisfaction
};

inline const char* to_string(B3 v) {
    switch (v) {
        case B3::Bot: return "false";
        case B3::Top: return "true";
        case B3::Unknown: break;
    }
    return "?";
}

inline bool conclusive(B3 v) { return v != B3::Unknown; }

} // namespace stratmon
