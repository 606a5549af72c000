// Skill cache: validated (object class, verb) -> synthesis-recipe records.
// The cache is the module's only mutable state; get/put are serialized behind
// an internal mutex (single-writer discipline, atomic visibility).
#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "geomcoder/core/json.hpp"
#include "geomcoder/plan/plan.hpp"

namespace geomcoder::plan {

struct SkillKey {
    std::string class_label;
    Verb verb = Verb::open;

    bool operator<(const SkillKey& o) const {
        if (class_label != o.class_label) return class_label < o.class_label;
        return static_cast<int>(verb) < static_cast<int>(o.verb);
    }
    bool operator==(const SkillKey&) const = default;
};

struct ValidationStats {
    std::int64_t successes = 0;
    std::int64_t failures = 0;
};

struct SkillRecord {
    SkillKey key;
    std::string template_id;       // which synthesis recipe
    json default_params = json::object();
    ValidationStats validation_stats;
    std::int64_t created_seq = 0;  // monotone insert counter
};

class SkillCache {
public:
    SkillCache() = default;
    SkillCache(const SkillCache& o);
    SkillCache& operator=(const SkillCache& o);

    // Returns the record if present; bumps hits on hit, misses otherwise.
    std::optional<SkillRecord> get(const SkillKey& key);

    // Upsert; created_seq is assigned on first insert and preserved after.
    void put(SkillRecord record);

    void record_validation(const SkillKey& key, bool success);

    std::size_t size() const;
    std::int64_t hits() const;
    std::int64_t misses() const;
    void clear();

    json to_json() const;
    static SkillCache from_json(const json& j);

    static SkillCache load_file(const std::string& path);  // missing file -> empty cache
    void save_file(const std::string& path) const;

private:
    mutable std::mutex mutex_;
    std::map<SkillKey, SkillRecord> records_;
    std::int64_t hits_ = 0;
    std::int64_t misses_ = 0;
    std::int64_t next_seq_ = 0;
};

}  // namespace geomcoder::plan
