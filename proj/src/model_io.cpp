#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "dbrd/rep.hpp"

namespace dbrd {

void save_model(const RepModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file " + path.string());
    const auto names = RepModel::parameter_names();
    const auto values = model.to_vector();
    out << "# REP parameters: 7 feature weights, unigram and bigram BM25F_ext\n";
    for (std::size_t i = 0; i < RepModel::kNumParams; ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        out << names[i] << " = " << buf << '\n';
    }
    if (!out) throw std::runtime_error("failed writing model file " + path.string());
}

RepModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file " + path.string());

    const auto names = RepModel::parameter_names();
    std::unordered_map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < names.size(); ++i) slot.emplace(names[i], i);

    std::array<double, RepModel::kNumParams> values{};
    std::vector<bool> seen(names.size(), false);
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected name = value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const auto key = trim(line.substr(0, eq));
        const auto text = trim(line.substr(eq + 1));
        auto it = slot.find(key);
        if (it == slot.end()) fail("unknown parameter '" + key + "'");
        if (seen[it->second]) fail("parameter '" + key + "' given twice");
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) fail("bad number '" + text + "'");
        values[it->second] = v;
        seen[it->second] = true;
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!seen[i]) throw std::runtime_error(path.string() + ": missing parameter " + names[i]);
    }
    return RepModel::from_vector(values);
}

}  // namespace dbrd
