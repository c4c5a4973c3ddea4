#include "tfgamma/config.hpp"

#include <fstream>
#include <sstream>

#include "tfgamma/errors.hpp"

namespace tfgamma {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
    Config c;
    c.source_ = source;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        const auto where = source + ":" + std::to_string(number);
        if (eq == std::string::npos) throw ValidationError(where + ": expected 'key = value'");
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));
        if (key.empty()) throw ValidationError(where + ": empty key");
        if (c.values_.contains(key)) throw ValidationError(where + ": duplicate key '" + key + "'");
        try {
            c.values_[key] = nlohmann::json::parse(value);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(where + ": value of '" + key + "' is not JSON (" + e.what() + ")");
        }
    }
    return c;
}

Config Config::parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    return parse(in, path.string());
}

const nlohmann::json& Config::at(const std::string& key) const {
    if (!values_.contains(key)) throw ValidationError(source_ + ": missing key '" + key + "'");
    return values_.at(key);
}

void Config::require_only(std::initializer_list<const char*> allowed) const {
    for (const auto& [key, value] : values_.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) {
            std::string list;
            for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
            throw ValidationError(source_ + ": unknown key '" + key + "' (expected one of: " + list + ")");
        }
    }
}

void Config::throw_bad_value(const std::string& key, const std::string& why) {
    throw ValidationError("bad value for '" + key + "': " + why);
}

}  // namespace tfgamma
