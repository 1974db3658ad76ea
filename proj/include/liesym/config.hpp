#pragma once

#include <optional>
#include <string>
#include <vector>

namespace liesym {

// Flat `key = value` configuration with `#` comments. The full text round-trips
// losslessly (comments, blank lines, and ordering are preserved).
class RunConfig {
  public:
    struct Item {
        enum class Kind { KeyValue, Comment, Blank };
        Kind kind = Kind::KeyValue;
        std::string key;
        std::string value;
        std::string raw;  // original text for comments/blank lines
    };

    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::string& path);
    std::string serialize() const;
    void save(const std::string& path) const;

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<long long> get_int_list(const std::string& key) const;  // comma-separated

    void set(const std::string& key, const std::string& value);

    const std::vector<Item>& items() const { return items_; }

  private:
    std::vector<Item> items_;
};

}  // namespace liesym
