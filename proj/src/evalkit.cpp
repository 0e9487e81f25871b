#include "dbrd/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace dbrd {

bool hit_at(const RankedPrediction& p, std::size_t k) {
    const auto n = std::min(k, p.ranked_masters.size());
    return std::find(p.ranked_masters.begin(), p.ranked_masters.begin() + static_cast<std::ptrdiff_t>(n),
                     p.truth_master) != p.ranked_masters.begin() + static_cast<std::ptrdiff_t>(n);
}

std::size_t recalled_count(std::span<const RankedPrediction> preds, std::size_t k) {
    return static_cast<std::size_t>(std::count_if(preds.begin(), preds.end(), [k](const auto& p) { return hit_at(p, k); }));
}

double recall_rate(std::span<const RankedPrediction> preds, std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    if (preds.empty()) throw std::invalid_argument("recall rate of an empty prediction list");
    return static_cast<double>(recalled_count(preds, k)) / static_cast<double>(preds.size());
}

OverlapCounts overlap_counts(std::span<const RankedPrediction> a, std::span<const RankedPrediction> b, std::size_t k) {
    std::unordered_map<std::string_view, const RankedPrediction*> by_query;
    for (const auto& p : b) {
        if (!by_query.emplace(p.query, &p).second) throw std::invalid_argument("query " + p.query + " appears twice");
    }
    if (a.size() != b.size()) throw std::invalid_argument("prediction lists cover different query sets");

    OverlapCounts counts;
    for (const auto& pa : a) {
        auto it = by_query.find(pa.query);
        if (it == by_query.end()) throw std::invalid_argument("query " + pa.query + " missing from second list");
        const bool ha = hit_at(pa, k);
        const bool hb = hit_at(*it->second, k);
        if (ha && hb) ++counts.both;
        else if (ha) ++counts.only_a;
        else if (hb) ++counts.only_b;
        else ++counts.neither;
        by_query.erase(it);
    }
    return counts;
}

EvalReport make_report(std::vector<RankedPrediction> preds, std::size_t k_max) {
    if (k_max == 0) throw std::invalid_argument("k_max must be at least 1");
    EvalReport report;
    report.n_total = preds.size();
    for (std::size_t k = 1; k <= k_max; ++k) {
        report.n_recalled_at_k[k] = recalled_count(preds, k);
        report.rr_at_k[k] = preds.empty() ? 0.0 : recall_rate(preds, k);
    }
    report.per_query = std::move(preds);
    report.runs_averaged = 1;
    return report;
}

EvalReport average_runs(std::span<const EvalReport> runs) {
    if (runs.empty()) throw std::invalid_argument("no runs to average");
    EvalReport out;
    out.n_total = runs.front().n_total;
    out.runs_averaged = 0;
    const auto k_max = runs.front().k_max();
    for (const auto& run : runs) {
        if (run.n_total != out.n_total || run.k_max() != k_max) {
            throw std::invalid_argument("runs evaluated different query sets or cut-offs");
        }
        for (const auto& [k, n] : run.n_recalled_at_k) out.n_recalled_at_k[k] += n;
        for (const auto& [k, rr] : run.rr_at_k) out.rr_at_k[k] += rr * static_cast<double>(run.runs_averaged);
        out.per_query.insert(out.per_query.end(), run.per_query.begin(), run.per_query.end());
        out.runs_averaged += run.runs_averaged;
    }
    for (auto& [k, rr] : out.rr_at_k) rr /= static_cast<double>(out.runs_averaged);
    return out;
}

std::filesystem::path csv_path_for(const std::filesystem::path& report_path) {
    auto p = report_path;
    p.replace_extension(".csv");
    return p;
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
    using nlohmann::json;
    json doc;
    doc["n_total"] = report.n_total;
    doc["runs_averaged"] = report.runs_averaged;
    doc["k_max"] = report.k_max();
    json rr = json::object();
    json recalled = json::object();
    for (const auto& [k, v] : report.rr_at_k) rr[std::to_string(k)] = v;
    for (const auto& [k, v] : report.n_recalled_at_k) recalled[std::to_string(k)] = v;
    doc["rr_at_k"] = rr;
    doc["n_recalled_at_k"] = recalled;
    json queries = json::array();
    for (const auto& p : report.per_query) {
        queries.push_back({{"query", p.query}, {"run", p.run}, {"truth_master", p.truth_master},
                           {"ranked_masters", p.ranked_masters}});
    }
    doc["per_query"] = queries;

    {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write report " + path.string());
        out << doc.dump(2) << '\n';
        if (!out) throw std::runtime_error("failed writing report " + path.string());
    }
    std::ofstream csv(csv_path_for(path));
    if (!csv) throw std::runtime_error("cannot write " + csv_path_for(path).string());
    csv << "k,rr,n_recalled,n_total\n";
    for (const auto& [k, v] : report.rr_at_k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        const auto it = report.n_recalled_at_k.find(k);
        csv << k << ',' << buf << ',' << (it == report.n_recalled_at_k.end() ? 0 : it->second) << ','
            << report.n_total * report.runs_averaged << '\n';
    }
}

EvalReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report " + path.string());
    const auto doc = nlohmann::json::parse(in);
    EvalReport report;
    report.n_total = doc.at("n_total").get<std::size_t>();
    report.runs_averaged = doc.at("runs_averaged").get<std::size_t>();
    for (const auto& [k, v] : doc.at("rr_at_k").items()) report.rr_at_k[std::stoul(k)] = v.get<double>();
    for (const auto& [k, v] : doc.at("n_recalled_at_k").items()) {
        report.n_recalled_at_k[std::stoul(k)] = v.get<std::size_t>();
    }
    for (const auto& q : doc.at("per_query")) {
        report.per_query.push_back(RankedPrediction{q.at("query").get<std::string>(),
                                                    q.at("ranked_masters").get<std::vector<std::string>>(),
                                                    q.at("truth_master").get<std::string>(),
                                                    q.at("run").get<std::size_t>()});
    }
    return report;
}

void write_overlap_csv(const OverlapCounts& counts, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "only_a,only_b,both,neither\n"
        << counts.only_a << ',' << counts.only_b << ',' << counts.both << ',' << counts.neither << '\n';
}

}  // namespace dbrd
