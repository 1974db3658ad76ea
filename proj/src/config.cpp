#include "liesym/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace liesym {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        Item item;
        const std::string t = trim(line);
        if (t.empty()) {
            item.kind = Item::Kind::Blank;
            item.raw = line;
        } else if (t[0] == '#') {
            item.kind = Item::Kind::Comment;
            item.raw = line;
        } else {
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw std::runtime_error("config: line without '=': '" + line + "'");
            }
            item.kind = Item::Kind::KeyValue;
            item.key = trim(line.substr(0, eq));
            item.value = trim(line.substr(eq + 1));
            if (item.key.empty()) {
                throw std::runtime_error("config: empty key in line '" + line + "'");
            }
        }
        cfg.items_.push_back(std::move(item));
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string RunConfig::serialize() const {
    std::string out;
    for (const auto& item : items_) {
        if (item.kind == Item::Kind::KeyValue) {
            out += item.key + " = " + item.value + "\n";
        } else {
            out += item.raw + "\n";
        }
    }
    return out;
}

void RunConfig::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("config: cannot open '" + path + "' for writing");
    out << serialize();
}

bool RunConfig::has(const std::string& key) const { return get(key).has_value(); }

std::optional<std::string> RunConfig::get(const std::string& key) const {
    // Last assignment wins, mirroring command-line override behavior.
    std::optional<std::string> found;
    for (const auto& item : items_) {
        if (item.kind == Item::Kind::KeyValue && item.key == key) found = item.value;
    }
    return found;
}

std::string RunConfig::get_or(const std::string& key, const std::string& fallback) const {
    const auto v = get(key);
    return v ? *v : fallback;
}

long long RunConfig::get_int(const std::string& key, long long fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const long long out = std::stoll(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing");
        return out;
    } catch (...) {
        throw std::runtime_error("config: key '" + key + "' is not an integer: '" + *v + "'");
    }
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const double out = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing");
        return out;
    } catch (...) {
        throw std::runtime_error("config: key '" + key + "' is not a number: '" + *v + "'");
    }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw std::runtime_error("config: key '" + key + "' is not a boolean: '" + *v + "'");
}

std::vector<long long> RunConfig::get_int_list(const std::string& key) const {
    std::vector<long long> out;
    const auto v = get(key);
    if (!v) return out;
    std::stringstream ss(*v);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const std::string t = trim(part);
        if (t.empty()) continue;
        try {
            out.push_back(std::stoll(t));
        } catch (...) {
            throw std::runtime_error("config: key '" + key + "' has a bad list entry: '" +
                                     t + "'");
        }
    }
    return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    for (auto it = items_.rbegin(); it != items_.rend(); ++it) {
        if (it->kind == Item::Kind::KeyValue && it->key == key) {
            it->value = value;
            return;
        }
    }
    Item item;
    item.kind = Item::Kind::KeyValue;
    item.key = key;
    item.value = value;
    items_.push_back(std::move(item));
}

}  // namespace liesym
