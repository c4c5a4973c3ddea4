#pragma once

#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>

#include "json.hpp"

namespace tfgamma {

/// Flat key-value configuration: one `key = <json value>` per line, `#` starts a comment line.
class Config {
public:
    Config() = default;
    static Config parse(std::istream& in, const std::string& source = "<config>");
    static Config parse(const std::string& text);
    static Config load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.contains(key); }
    const nlohmann::json& at(const std::string& key) const;

    template <class T>
    T get(const std::string& key) const {
        try {
            return at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw_bad_value(key, e.what());
        }
    }

    template <class T>
    T get(const std::string& key, const T& fallback) const {
        return has(key) ? get<T>(key) : fallback;
    }

    /// Throws ValidationError naming the first key outside `allowed`.
    void require_only(std::initializer_list<const char*> allowed) const;

    void set(const std::string& key, nlohmann::json value) { values_[key] = std::move(value); }
    const nlohmann::json& values() const noexcept { return values_; }

private:
    [[noreturn]] static void throw_bad_value(const std::string& key, const std::string& why);
    nlohmann::json values_ = nlohmann::json::object();
    std::string source_ = "<config>";
};

}  // namespace tfgamma
