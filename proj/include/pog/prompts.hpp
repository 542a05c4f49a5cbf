#pragma once
// Prompt templates loaded from an assets directory. Each template NAME.txt
// may reference {placeholders}; a sibling NAME_fewshot.txt file, when
// present, fills the {fewshot} slot, so in-context examples can be swapped
// without touching the engine.

#include "pog/errors.hpp"

#include <map>
#include <mutex>
#include <string>

namespace pog {

class PromptLibrary {
public:
    // Falls back to the compile-time default directory when dir is empty.
    explicit PromptLibrary(const std::string& dir = "");

    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& values) const;

    const std::string& directory() const { return dir_; }

private:
    std::string load(const std::string& name) const;

    std::string dir_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, std::string> cache_;
};

} // namespace pog
