#pragma once

#include <cctype>
#include <string>

namespace pog {

// Case/whitespace folding used for label and answer matching: lowercase,
// trimmed, inner whitespace runs collapsed to single spaces.
inline std::string fold_text(const std::string& s) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

} // namespace pog
