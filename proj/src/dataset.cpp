#include "seqkern/dataset.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace seqkern {

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

double parse_number(std::string_view cell, std::size_t line) {
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        throw Error(at_line(line) + "parse error: '" + std::string(cell) + "' is not a number");
    return v;
}

std::vector<std::string_view> split_csv(std::string_view row) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= row.size(); ++k)
        if (k == row.size() || row[k] == ',') {
            cells.push_back(row.substr(start, k - start));
            start = k + 1;
        }
    return cells;
}

bool is_blank(std::string_view s) { return s.find_first_not_of(" \t\r") == std::string_view::npos; }

}  // namespace

std::vector<Sequence> Dataset::sequences() const {
    std::vector<Sequence> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.sequence);
    return out;
}

std::vector<std::string> Dataset::ids() const {
    std::vector<std::string> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.id);
    return out;
}

void Dataset::add(Sample sample) {
    if (samples.empty()) dim = sample.sequence.dim();
    if (sample.sequence.dim() != dim)
        throw Error("sample '" + sample.id + "' has dimension " + std::to_string(sample.sequence.dim()) +
                    ", expected " + std::to_string(dim));
    for (const auto& s : samples)
        if (s.id == sample.id) throw Error("duplicate sample id '" + sample.id + "'");
    samples.push_back(std::move(sample));
}

DatasetFormat parse_dataset_format(std::string_view name) {
    if (name == "csv") return DatasetFormat::csv;
    if (name == "jsonl") return DatasetFormat::jsonl;
    throw Error("unknown dataset format '" + std::string(name) + "'");
}

Dataset read_dataset_jsonl(std::istream& in) {
    Dataset data;
    std::string row;
    std::size_t line = 0;
    while (std::getline(in, row)) {
        ++line;
        if (is_blank(row)) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(row);
        } catch (const nlohmann::json::exception& e) {
            throw Error(at_line(line) + "malformed JSON: " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("series") ||
            !j["series"].is_array())
            throw Error(at_line(line) + "expected {\"id\": str, \"label\": str|null, \"series\": [[...]]}");
        Sample s;
        s.id = j["id"].get<std::string>();
        if (j.contains("label") && !j["label"].is_null()) {
            if (!j["label"].is_string()) throw Error(at_line(line) + "label must be a string or null");
            s.label = j["label"].get<std::string>();
        }
        std::vector<std::vector<double>> rows;
        for (const auto& pt : j["series"]) {
            if (!pt.is_array()) throw Error(at_line(line) + "series entries must be arrays of numbers");
            std::vector<double> r;
            for (const auto& x : pt) {
                if (!x.is_number()) throw Error(at_line(line) + "series entries must be arrays of numbers");
                r.push_back(x.get<double>());
            }
            rows.push_back(std::move(r));
        }
        try {
            s.sequence = Sequence::from_rows(rows);
        } catch (const Error& e) {
            throw Error(at_line(line) + "sample '" + s.id + "': " + e.what());
        }
        try {
            data.add(std::move(s));
        } catch (const Error& e) {
            throw Error(at_line(line) + e.what());
        }
    }
    if (data.samples.empty()) throw Error("no samples");
    return data;
}

Dataset read_dataset_csv(std::istream& in) {
    Dataset data;
    std::string row;
    std::size_t line = 0;
    std::size_t dim = 0;
    bool header_seen = false;

    std::string cur_id;
    std::optional<std::string> cur_label;
    std::vector<std::vector<double>> cur_rows;
    double last_t = 0.0;
    std::unordered_set<std::string> finished;

    auto flush = [&]() {
        if (cur_rows.empty()) return;
        data.add({cur_id, cur_label, Sequence::from_rows(cur_rows)});
        finished.insert(cur_id);
        cur_rows.clear();
    };

    while (std::getline(in, row)) {
        ++line;
        if (is_blank(row)) continue;
        if (!row.empty() && row.back() == '\r') row.pop_back();
        const auto cells = split_csv(row);
        if (!header_seen) {
            if (cells.size() < 4 || cells[0] != "id" || cells[1] != "label" || cells[2] != "t")
                throw Error(at_line(line) + "expected header id,label,t,x1,...,xd");
            dim = cells.size() - 3;
            header_seen = true;
            continue;
        }
        if (cells.size() != dim + 3)
            throw Error(at_line(line) + "expected " + std::to_string(dim + 3) + " columns, found " +
                        std::to_string(cells.size()));
        const std::string id(cells[0]);
        if (id.empty()) throw Error(at_line(line) + "empty id");
        const double t = parse_number(cells[2], line);
        std::vector<double> x(dim);
        for (std::size_t k = 0; k < dim; ++k) x[k] = parse_number(cells[3 + k], line);

        if (cur_rows.empty() || id != cur_id) {
            flush();
            if (finished.count(id)) throw Error(at_line(line) + "rows for id '" + id + "' are not contiguous");
            cur_id = id;
            cur_label = cells[1].empty() ? std::nullopt : std::optional<std::string>(std::string(cells[1]));
        } else if (!(t > last_t)) {
            throw Error(at_line(line) + "t must be strictly increasing within id '" + id + "'");
        }
        last_t = t;
        cur_rows.push_back(std::move(x));
    }
    flush();
    if (data.samples.empty()) throw Error("no samples");
    return data;
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset '" + path.string() + "'");
    return format == DatasetFormat::csv ? read_dataset_csv(in) : read_dataset_jsonl(in);
}

void write_dataset_jsonl(std::ostream& out, const Dataset& data) {
    for (const auto& s : data.samples) {
        nlohmann::json j;
        j["id"] = s.id;
        j["label"] = s.label ? nlohmann::json(*s.label) : nlohmann::json(nullptr);
        nlohmann::json series = nlohmann::json::array();
        const auto& p = s.sequence.points();
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            nlohmann::json pt = nlohmann::json::array();
            for (Eigen::Index k = 0; k < p.cols(); ++k) pt.push_back(p(i, k));
            series.push_back(std::move(pt));
        }
        j["series"] = std::move(series);
        out << j.dump() << '\n';
    }
}

}  // namespace seqkern
