#include "pog/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace pog {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open prompt asset: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
}

} // namespace

PromptLibrary::PromptLibrary(const std::string& dir)
    : dir_(dir.empty() ? POG_DEFAULT_PROMPT_DIR : dir) {}

std::string PromptLibrary::load(const std::string& name) const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = cache_.find(name); it != cache_.end()) return it->second;

    std::filesystem::path base(dir_);
    std::string text = read_file(base / (name + ".txt"));

    std::filesystem::path fewshot = base / (name + "_fewshot.txt");
    if (std::filesystem::exists(fewshot))
        replace_all(text, "{fewshot}", read_file(fewshot));
    else
        replace_all(text, "{fewshot}", "");

    cache_[name] = text;
    return text;
}

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& values) const {
    std::string text = load(name);
    for (const auto& [key, value] : values) replace_all(text, "{" + key + "}", value);
    return text;
}

} // namespace pog
