#include "collapse/harness/results.hpp"

#include "collapse/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace collapse {

const char* const kSeriesHeader = "task,setting,seed,cell_params,iteration,metric,value";
const char* const kAggregateHeader = "task,setting,seed_count,cell_params,iteration,metric,mean,median,q10,q90,stderr";

namespace {

bool is_json(const std::filesystem::path& path) { return path.extension() == ".json"; }

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line, int line_no) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted) throw ParseError("unterminated quote", line_no, static_cast<int>(line.size()));
    return fields;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const char* header,
                                               std::size_t columns) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw ParseError("expected header '" + std::string(header) + "' in " + path.string(), 1, 1);
    std::vector<std::vector<std::string>> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line, line_no);
        if (fields.size() != columns)
            throw ParseError("expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()),
                             line_no, 1);
        out.push_back(std::move(fields));
    }
    return out;
}

template <class T>
T parse_integer(const std::string& text) {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("'" + text + "' is not an integer", 0, 0);
    return v;
}

nlohmann::json real_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double json_real(const nlohmann::json& j) {
    if (j.is_string()) return parse_real(j.get<std::string>());
    return j.get<double>();
}

}  // namespace

bool series_row_less(const SeriesRow& a, const SeriesRow& b) {
    return std::tie(a.task, a.setting, a.cell_params, a.seed, a.iteration, a.metric) <
           std::tie(b.task, b.setting, b.cell_params, b.seed, b.iteration, b.metric);
}

std::vector<SeriesRow> flatten(const MetricSeries& series, const std::string& cell_params) {
    std::vector<SeriesRow> out;
    out.reserve(series.records().size());
    for (const auto& r : series.records())
        out.push_back({series.task(), series.setting(), series.seed(), cell_params, r.iteration, r.metric, r.value});
    return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of no values");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<AggregateRow> aggregate(const std::vector<SeriesRow>& rows) {
    using Key = std::tuple<std::string, std::string, std::string, std::size_t, std::string>;
    std::map<Key, std::vector<double>> groups;
    for (const auto& r : rows) groups[{r.task, r.setting, r.cell_params, r.iteration, r.metric}].push_back(r.value);
    std::vector<AggregateRow> out;
    out.reserve(groups.size());
    for (auto& [key, values] : groups) {
        std::sort(values.begin(), values.end());
        AggregateRow a;
        std::tie(a.task, a.setting, a.cell_params, a.iteration, a.metric) = key;
        a.seed_count = values.size();
        a.median = quantile_sorted(values, 0.5);
        a.q10 = quantile_sorted(values, 0.1);
        a.q90 = quantile_sorted(values, 0.9);
        if (std::isinf(values.back())) {
            a.mean = a.stderr_ = std::numeric_limits<double>::infinity();
        } else {
            const double n = static_cast<double>(values.size());
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= n;
            double ss = 0.0;
            for (double v : values) ss += (v - mean) * (v - mean);
            a.mean = mean;
            a.stderr_ = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::string format_real(double value) {
    if (std::isnan(value)) throw Error(ErrorCode::InvalidArgument, "NaN cannot be serialized");
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

double parse_real(const std::string& text) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("'" + text + "' is not a number", 0, 0);
    return v;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
}

void write_series(const std::vector<SeriesRow>& rows, const std::filesystem::path& path) {
    std::string text;
    if (is_json(path)) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back({{"task", r.task},
                           {"setting", r.setting},
                           {"seed", r.seed},
                           {"cell_params", r.cell_params},
                           {"iteration", r.iteration},
                           {"metric", r.metric},
                           {"value", real_json(r.value)}});
        text = arr.dump(1) + "\n";
    } else {
        std::ostringstream os;
        os << kSeriesHeader << '\n';
        for (const auto& r : rows)
            os << csv_field(r.task) << ',' << csv_field(r.setting) << ',' << r.seed << ',' << csv_field(r.cell_params)
               << ',' << r.iteration << ',' << csv_field(r.metric) << ',' << format_real(r.value) << '\n';
        text = os.str();
    }
    write_file_atomic(path, text);
}

std::vector<SeriesRow> read_series(const std::filesystem::path& path) {
    std::vector<SeriesRow> out;
    if (is_json(path)) {
        nlohmann::json arr;
        try {
            arr = nlohmann::json::parse(read_text(path));
            for (const auto& j : arr)
                out.push_back({j.at("task"), j.at("setting"), j.at("seed"), j.at("cell_params"), j.at("iteration"),
                               j.at("metric"), json_real(j.at("value"))});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), 0, 0);
        }
        return out;
    }
    for (auto& f : read_csv(path, kSeriesHeader, 7))
        out.push_back({f[0], f[1], parse_integer<std::int64_t>(f[2]), f[3], parse_integer<std::size_t>(f[4]), f[5],
                       parse_real(f[6])});
    return out;
}

void write_aggregate(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
    if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "no aggregate rows to write");
    std::string text;
    if (is_json(path)) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back({{"task", r.task},
                           {"setting", r.setting},
                           {"seed_count", r.seed_count},
                           {"cell_params", r.cell_params},
                           {"iteration", r.iteration},
                           {"metric", r.metric},
                           {"mean", real_json(r.mean)},
                           {"median", real_json(r.median)},
                           {"q10", real_json(r.q10)},
                           {"q90", real_json(r.q90)},
                           {"stderr", real_json(r.stderr_)}});
        text = arr.dump(1) + "\n";
    } else {
        std::ostringstream os;
        os << kAggregateHeader << '\n';
        for (const auto& r : rows)
            os << csv_field(r.task) << ',' << csv_field(r.setting) << ',' << r.seed_count << ','
               << csv_field(r.cell_params) << ',' << r.iteration << ',' << csv_field(r.metric) << ','
               << format_real(r.mean) << ',' << format_real(r.median) << ',' << format_real(r.q10) << ','
               << format_real(r.q90) << ',' << format_real(r.stderr_) << '\n';
        text = os.str();
    }
    write_file_atomic(path, text);
}

std::vector<AggregateRow> read_aggregate(const std::filesystem::path& path) {
    std::vector<AggregateRow> out;
    if (is_json(path)) {
        try {
            const auto arr = nlohmann::json::parse(read_text(path));
            for (const auto& j : arr)
                out.push_back({j.at("task"), j.at("setting"), j.at("seed_count"), j.at("cell_params"),
                               j.at("iteration"), j.at("metric"), json_real(j.at("mean")), json_real(j.at("median")),
                               json_real(j.at("q10")), json_real(j.at("q90")), json_real(j.at("stderr"))});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), 0, 0);
        }
        return out;
    }
    for (auto& f : read_csv(path, kAggregateHeader, 11))
        out.push_back({f[0], f[1], parse_integer<std::size_t>(f[2]), f[3], parse_integer<std::size_t>(f[4]), f[5],
                       parse_real(f[6]), parse_real(f[7]), parse_real(f[8]), parse_real(f[9]), parse_real(f[10])});
    return out;
}

}  // namespace collapse
