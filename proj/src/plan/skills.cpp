#include "geomcoder/plan/skills.hpp"

#include <filesystem>

namespace geomcoder::plan {

SkillCache::SkillCache(const SkillCache& o) {
    std::lock_guard lock(o.mutex_);
    records_ = o.records_;
    hits_ = o.hits_;
    misses_ = o.misses_;
    next_seq_ = o.next_seq_;
}

SkillCache& SkillCache::operator=(const SkillCache& o) {
    if (this == &o) return *this;
    std::scoped_lock lock(mutex_, o.mutex_);
    records_ = o.records_;
    hits_ = o.hits_;
    misses_ = o.misses_;
    next_seq_ = o.next_seq_;
    return *this;
}

std::optional<SkillRecord> SkillCache::get(const SkillKey& key) {
    std::lock_guard lock(mutex_);
    const auto it = records_.find(key);
    if (it == records_.end()) {
        ++misses_;
        return std::nullopt;
    }
    ++hits_;
    return it->second;
}

void SkillCache::put(SkillRecord record) {
    std::lock_guard lock(mutex_);
    const auto it = records_.find(record.key);
    if (it == records_.end()) {
        record.created_seq = next_seq_++;
        records_.emplace(record.key, std::move(record));
    } else {
        record.created_seq = it->second.created_seq;  // upsert keeps the insert sequence
        it->second = std::move(record);
    }
}

void SkillCache::record_validation(const SkillKey& key, bool success) {
    std::lock_guard lock(mutex_);
    const auto it = records_.find(key);
    if (it == records_.end()) return;
    if (success) ++it->second.validation_stats.successes;
    else ++it->second.validation_stats.failures;
}

std::size_t SkillCache::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

std::int64_t SkillCache::hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
}

std::int64_t SkillCache::misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
}

void SkillCache::clear() {
    std::lock_guard lock(mutex_);
    records_.clear();
    hits_ = 0;
    misses_ = 0;
    next_seq_ = 0;
}

json SkillCache::to_json() const {
    std::lock_guard lock(mutex_);
    json records = json::array();
    for (const auto& [key, rec] : records_)
        records.push_back(json{
            {"key", json{{"class_label", key.class_label}, {"verb", verb_name(key.verb)}}},
            {"template_id", rec.template_id},
            {"default_params", rec.default_params},
            {"validation_stats", json{{"successes", rec.validation_stats.successes},
                                      {"failures", rec.validation_stats.failures}}},
            {"created_seq", rec.created_seq}});
    return json{{"records", records}, {"hits", hits_}, {"misses", misses_}};
}

SkillCache SkillCache::from_json(const json& j) {
    SkillCache cache;
    const json& records = require_field(j, "records", "cache");
    if (!records.is_array()) throw SchemaError("cache.records: expected array");
    for (const auto& r : records) {
        SkillRecord rec;
        const json& key = require_field(r, "key", "cache record");
        rec.key.class_label = require_field(key, "class_label", "cache key").get<std::string>();
        const auto verb =
            verb_from_name(require_field(key, "verb", "cache key").get<std::string>());
        if (!verb) throw SchemaError("cache key: unknown verb");
        rec.key.verb = *verb;
        rec.template_id = require_field(r, "template_id", "cache record").get<std::string>();
        rec.default_params = r.contains("default_params") ? r.at("default_params") : json::object();
        if (r.contains("validation_stats")) {
            const json& vs = r.at("validation_stats");
            rec.validation_stats.successes =
                static_cast<std::int64_t>(require_number(vs, "successes", "validation_stats"));
            rec.validation_stats.failures =
                static_cast<std::int64_t>(require_number(vs, "failures", "validation_stats"));
        }
        rec.created_seq = static_cast<std::int64_t>(require_number(r, "created_seq", "cache record"));
        if (rec.validation_stats.successes < 0 || rec.validation_stats.failures < 0)
            throw SchemaError("cache record: negative validation counts");
        cache.records_.emplace(rec.key, rec);
        cache.next_seq_ = std::max(cache.next_seq_, rec.created_seq + 1);
    }
    cache.hits_ = static_cast<std::int64_t>(require_number(j, "hits", "cache"));
    cache.misses_ = static_cast<std::int64_t>(require_number(j, "misses", "cache"));
    if (cache.hits_ < 0 || cache.misses_ < 0) throw SchemaError("cache: negative counters");
    return cache;
}

SkillCache SkillCache::load_file(const std::string& path) {
    if (!std::filesystem::exists(path)) return {};
    return from_json(load_json_file(path));
}

void SkillCache::save_file(const std::string& path) const { save_json_file(path, to_json()); }

}  // namespace geomcoder::plan
