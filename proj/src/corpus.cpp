#include "dbrd/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace dbrd {

namespace {

using nlohmann::json;

class UnionFind {
  public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

  private:
    std::vector<std::size_t> parent_;
};

std::string join_ids(const std::vector<ReportId>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ", ";
        out += id;
    }
    return out;
}

std::string id_from_json(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
    throw CorpusError("id must be a string or integer");
}

std::optional<std::string> optional_label(const json& object, const char* key) {
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number()) return it->dump();
    throw CorpusError(std::string("field ") + key + " must be a string or null");
}

const json& required(const json& object, const char* key) {
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) throw CorpusError(std::string("missing field ") + key);
    return *it;
}

template <typename F>
void for_each_line(const std::filesystem::path& path, F&& f) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            f(line);
        } catch (const std::exception& e) {
            std::string what = e.what();
            throw CorpusError(what + " at line " + std::to_string(line_no) + " of " + path.string());
        }
    }
}

}  // namespace

std::vector<Bucket> build_buckets(std::span<const BugReport> reports) {
    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return chronologically_before(reports[a], reports[b]);
    });

    // Positions below are chronological ranks.
    std::unordered_map<std::string_view, std::size_t> rank;
    rank.reserve(reports.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank.emplace(reports[order[r]].id, r);

    std::vector<std::size_t> link(order.size(), SIZE_MAX);
    std::vector<ReportId> dangling;
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& dup = reports[order[r]].duplicate_of;
        if (!dup) continue;
        auto it = rank.find(*dup);
        if (it == rank.end()) {
            dangling.push_back(reports[order[r]].id);
            continue;
        }
        link[r] = it->second;
    }
    if (!dangling.empty()) throw CorpusError("dangling duplicate_of in reports: " + join_ids(dangling));

    // Walk every chain once; a chain that re-enters itself is a cycle.
    enum : std::uint8_t { kFresh, kActive, kDone };
    std::vector<std::uint8_t> state(order.size(), kFresh);
    std::vector<std::size_t> path;
    for (std::size_t start = 0; start < order.size(); ++start) {
        path.clear();
        std::size_t cur = start;
        while (cur != SIZE_MAX && state[cur] == kFresh) {
            state[cur] = kActive;
            path.push_back(cur);
            cur = link[cur];
        }
        if (cur != SIZE_MAX && state[cur] == kActive) {
            throw CorpusError("duplicate_of cycle through report " + reports[order[cur]].id);
        }
        for (auto p : path) state[p] = kDone;
    }

    UnionFind uf(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (link[r] != SIZE_MAX) uf.unite(r, link[r]);
    }

    // Union keeps the smallest rank as root, so the root is the master.
    std::vector<Bucket> buckets;
    std::vector<std::size_t> bucket_of_root(order.size(), SIZE_MAX);
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto root = uf.find(r);
        if (bucket_of_root[root] == SIZE_MAX) {
            bucket_of_root[root] = buckets.size();
            buckets.push_back(Bucket{reports[order[root]].id, {}});
        }
        buckets[bucket_of_root[root]].members.push_back(reports[order[r]].id);
    }
    return buckets;
}

Corpus::Corpus(std::vector<BugReport> reports, Splits splits)
    : reports_(std::move(reports)),
      train_pairs_(std::move(splits.train_pairs)),
      valid_pairs_(std::move(splits.valid_pairs)),
      test_queries_(std::move(splits.test_queries)),
      test_reports_(std::move(splits.test_reports)) {
    std::sort(reports_.begin(), reports_.end(), chronologically_before);
    position_.reserve(reports_.size());
    std::vector<ReportId> duplicated;
    for (std::size_t i = 0; i < reports_.size(); ++i) {
        if (!position_.emplace(reports_[i].id, i).second) duplicated.push_back(reports_[i].id);
    }
    if (!duplicated.empty()) throw CorpusError("duplicate report ids: " + join_ids(duplicated));

    buckets_ = build_buckets(reports_);
    bucket_index_.assign(reports_.size(), 0);
    for (std::size_t b = 0; b < buckets_.size(); ++b) {
        for (const auto& member : buckets_[b].members) bucket_index_[position_.at(member)] = b;
    }

    auto check_pairs = [&](const std::vector<LabeledPair>& pairs, const char* what) {
        for (const auto& pair : pairs) {
            if (pair.a == pair.b) throw CorpusError(std::string(what) + " pair links report " + pair.a + " to itself");
            for (const auto* id : {&pair.a, &pair.b}) {
                if (!contains(*id)) throw CorpusError(std::string(what) + " pair refers to unknown report " + *id);
            }
        }
    };
    check_pairs(train_pairs_, "training");
    check_pairs(valid_pairs_, "validation");

    for (const auto& q : test_queries_) {
        if (!contains(q)) throw CorpusError("test query refers to unknown report " + q);
        if (master_of(q) == q) throw CorpusError("test query " + q + " has no earlier duplicate master");
    }
    for (const auto& id : test_reports_) {
        if (!contains(id)) throw CorpusError("test report list refers to unknown report " + id);
    }
}

std::size_t Corpus::position(const ReportId& id) const {
    auto it = position_.find(id);
    if (it == position_.end()) throw CorpusError("unknown report id " + id);
    return it->second;
}

const Bucket& Corpus::bucket_of(const ReportId& id) const { return buckets_[bucket_index_[position(id)]]; }

std::span<const BugReport> Corpus::reports_before(const ReportId& id) const {
    return std::span<const BugReport>(reports_).first(position(id));
}

std::vector<ReportId> Corpus::test_period() const {
    std::vector<ReportId> out;
    if (!test_reports_.empty()) {
        out = test_reports_;
        std::sort(out.begin(), out.end(), [&](const ReportId& a, const ReportId& b) { return position(a) < position(b); });
        return out;
    }
    if (test_queries_.empty()) return out;
    std::size_t first = reports_.size();
    for (const auto& q : test_queries_) first = std::min(first, position(q));
    for (std::size_t i = first; i < reports_.size(); ++i) out.push_back(reports_[i].id);
    return out;
}

std::vector<BugReport> Corpus::training_reports() const {
    std::vector<bool> used(reports_.size(), false);
    bool any = false;
    for (const auto* pairs : {&train_pairs_, &valid_pairs_}) {
        for (const auto& pair : *pairs) {
            used[position(pair.a)] = true;
            used[position(pair.b)] = true;
            any = true;
        }
    }
    if (!any) return reports_;
    std::vector<BugReport> out;
    for (std::size_t i = 0; i < reports_.size(); ++i) {
        if (used[i]) out.push_back(reports_[i]);
    }
    return out;
}

std::vector<ReportId> candidates_before(const Corpus& corpus, const ReportId& query) {
    std::vector<ReportId> out;
    for (const auto& r : corpus.reports_before(query)) out.push_back(r.id);
    return out;
}

BugReport report_from_json(std::string_view line) {
    json object;
    try {
        object = json::parse(line);
    } catch (const json::parse_error& e) {
        throw CorpusError(std::string("malformed record: ") + e.what());
    }
    if (!object.is_object()) throw CorpusError("malformed record: not a JSON object");

    BugReport r;
    r.id = id_from_json(required(object, "bug_id"));
    const auto& created = required(object, "created_at");
    if (!created.is_string()) throw CorpusError("field created_at must be an ISO-8601 string");
    r.created_at = parse_timestamp(created.get<std::string>());
    const auto& summary = required(object, "summary");
    const auto& description = required(object, "description");
    if (!summary.is_string() || !description.is_string()) throw CorpusError("summary and description must be strings");
    r.summary = summary.get<std::string>();
    r.description = description.get<std::string>();
    r.product = optional_label(object, "product");
    r.component = optional_label(object, "component");
    r.type = optional_label(object, "type");
    r.priority = optional_label(object, "priority");
    r.version = optional_label(object, "version");
    if (auto it = object.find("duplicate_of"); it != object.end() && !it->is_null()) r.duplicate_of = id_from_json(*it);
    return r;
}

namespace {

std::string format_timestamp(Timestamp ms) {
    using namespace std::chrono;
    const auto tp = sys_time<milliseconds>{milliseconds{ms}};
    const auto day_point = floor<days>(tp);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{tp - day_point};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld.%03ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()), static_cast<long>(hms.subseconds().count()));
    return buf;
}

json optional_to_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string report_to_json(const BugReport& r) {
    json object = {
        {"bug_id", r.id},
        {"created_at", format_timestamp(r.created_at)},
        {"summary", r.summary},
        {"description", r.description},
        {"product", optional_to_json(r.product)},
        {"component", optional_to_json(r.component)},
        {"type", optional_to_json(r.type)},
        {"priority", optional_to_json(r.priority)},
        {"version", optional_to_json(r.version)},
        {"duplicate_of", optional_to_json(r.duplicate_of)},
    };
    return object.dump();
}

std::vector<BugReport> read_reports(const std::filesystem::path& path) {
    std::vector<BugReport> out;
    for_each_line(path, [&](const std::string& line) { out.push_back(report_from_json(line)); });
    return out;
}

std::vector<LabeledPair> read_pairs(const std::filesystem::path& path) {
    std::vector<LabeledPair> out;
    for_each_line(path, [&](const std::string& line) {
        json object;
        try {
            object = json::parse(line);
        } catch (const json::parse_error& e) {
            throw CorpusError(std::string("malformed pair: ") + e.what());
        }
        LabeledPair p;
        p.a = id_from_json(required(object, "a"));
        p.b = id_from_json(required(object, "b"));
        const auto& label = required(object, "label");
        if (label.is_boolean()) {
            p.is_duplicate = label.get<bool>();
        } else if (label.is_number_integer() && (label.get<int>() == 0 || label.get<int>() == 1)) {
            p.is_duplicate = label.get<int>() == 1;
        } else {
            throw CorpusError("label must be 0 or 1");
        }
        out.push_back(std::move(p));
    });
    return out;
}

std::vector<ReportId> read_ids(const std::filesystem::path& path) {
    std::vector<ReportId> out;
    for_each_line(path, [&](const std::string& line) {
        auto first = line.find_first_not_of(" \t\r");
        auto last = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(first, last - first + 1));
    });
    return out;
}

Corpus load_corpus(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    if (!fs::exists(path)) throw CorpusError("no such file or directory: " + path.string());
    Corpus::Splits splits;
    if (!fs::is_directory(path)) return with_default_queries(read_reports(path), std::move(splits));

    auto reports = read_reports(path / "reports.jsonl");
    if (fs::exists(path / "train_pairs.jsonl")) splits.train_pairs = read_pairs(path / "train_pairs.jsonl");
    if (fs::exists(path / "valid_pairs.jsonl")) splits.valid_pairs = read_pairs(path / "valid_pairs.jsonl");
    if (fs::exists(path / "test_reports.txt")) splits.test_reports = read_ids(path / "test_reports.txt");
    if (fs::exists(path / "test_queries.txt")) {
        splits.test_queries = read_ids(path / "test_queries.txt");
        return Corpus(std::move(reports), std::move(splits));
    }
    return with_default_queries(std::move(reports), std::move(splits));
}

Corpus with_default_queries(std::vector<BugReport> reports, Corpus::Splits splits) {
    // No explicit queries: every duplicate (in the test period, if one is given).
    Corpus base(std::move(reports), splits);
    std::unordered_set<ReportId> period(splits.test_reports.begin(), splits.test_reports.end());
    for (const auto& r : base.reports()) {
        if (base.master_of(r.id) == r.id) continue;
        if (!period.empty() && !period.contains(r.id)) continue;
        splits.test_queries.push_back(r.id);
    }
    return Corpus(std::vector<BugReport>(base.reports().begin(), base.reports().end()), std::move(splits));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) throw CorpusError("cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("reports.jsonl");
        for (const auto& r : corpus.reports()) out << report_to_json(r) << '\n';
    }
    auto write_pairs = [&](const char* name, std::span<const LabeledPair> pairs) {
        if (pairs.empty()) return;
        auto out = open(name);
        for (const auto& p : pairs) out << json{{"a", p.a}, {"b", p.b}, {"label", p.is_duplicate ? 1 : 0}}.dump() << '\n';
    };
    write_pairs("train_pairs.jsonl", corpus.train_pairs());
    write_pairs("valid_pairs.jsonl", corpus.valid_pairs());
    {
        auto out = open("test_queries.txt");
        for (const auto& q : corpus.test_queries()) out << q << '\n';
    }
}

}  // namespace dbrd
