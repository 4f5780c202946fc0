// io.hpp - CSV ingestion, report serialization, and model persistence.
//
// Model files are UTF-8 JSON with real numbers written as decimal strings at
// 17 significant digits, which round-trips doubles exactly and stays
// readable from any language. Report and curve outputs are RFC-4180 CSV.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mrc/dataset.hpp"
#include "mrc/error.hpp"
#include "mrc/eval.hpp"
#include "mrc/learn.hpp"

namespace mrc {

// --- number formatting -----------------------------------------------------

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace detail {

inline double parse_double_strict(const std::string& text, std::size_t line, std::size_t column) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ParseError("cannot parse '" + text + "' as a number", line, column);
    if (!std::isfinite(v))
        throw ParseError("non-finite value '" + text + "'", line, column);
    return v;
}

}  // namespace detail

// --- CSV -------------------------------------------------------------------

namespace detail {

// Split one line into fields, honoring double-quote quoting with ""
// escapes. Embedded newlines inside quotes are not supported.
inline std::vector<std::string> split_csv_line(const std::string& line, char delim,
                                               std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"' && cur.empty()) {
            quoted = true;
        } else if (ch == delim) {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (quoted)
        throw ParseError("unterminated quoted field", line_no, fields.size() + 1);
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string csv_escape(const std::string& field, char delim) {
    bool needs_quotes = field.find(delim) != std::string::npos ||
                        field.find('"') != std::string::npos ||
                        field.find('\n') != std::string::npos ||
                        field.find('\r') != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out += "\"";
    return out;
}

}  // namespace detail

// Load a delimited file with a header row. The label column may be named or
// given as a 0-based index (a header name wins if both parse). Labels are
// encoded 0..|Y|-1 by sorted raw value; row order is preserved. Empty cells
// raise MissingValue, non-numeric feature cells ParseError; both report
// 1-based line and column.
inline Dataset load_csv(std::istream& in, const std::string& label_col, char delim = ',') {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input: header row required", 1, 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = detail::split_csv_line(line, delim, 1);

    std::size_t label_idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == label_col) label_idx = j;
    if (label_idx == header.size()) {
        bool numeric = !label_col.empty() &&
                       std::all_of(label_col.begin(), label_col.end(),
                                   [](unsigned char ch) { return std::isdigit(ch); });
        if (numeric) {
            std::size_t idx = std::stoul(label_col);
            if (idx < header.size()) label_idx = idx;
        }
    }
    if (label_idx == header.size())
        throw ParseError("label column '" + label_col + "' not found", 1, 1);
    if (header.size() < 2)
        throw ParseError("need at least one feature column besides the label", 1, 1);

    const std::size_t dims = header.size() - 1;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = detail::split_csv_line(line, delim, line_no);
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no, 1);
        std::vector<double> row;
        row.reserve(dims);
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (fields[j].empty()) throw MissingValue(line_no, j + 1);
            if (j == label_idx) continue;
            row.push_back(detail::parse_double_strict(fields[j], line_no, j + 1));
        }
        rows.push_back(std::move(row));
        raw_labels.push_back(fields[label_idx]);
    }
    if (rows.empty()) throw ParseError("no data rows", line_no, 1);

    std::vector<std::string> names = raw_labels;
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());

    Dataset d;
    d.num_rows = rows.size();
    d.num_dims = dims;
    d.label_names = names;
    d.values.reserve(d.num_rows * dims);
    for (const auto& r : rows) d.values.insert(d.values.end(), r.begin(), r.end());
    d.labels.reserve(raw_labels.size());
    for (const std::string& raw : raw_labels) {
        auto it = std::lower_bound(names.begin(), names.end(), raw);
        d.labels.push_back(static_cast<int>(it - names.begin()));
    }
    return d;
}

inline Dataset load_csv(const std::string& path, const std::string& label_col, char delim = ',') {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return load_csv(in, label_col, delim);
}

// Feature-only variant: every column is numeric, no label. Used for
// prediction inputs.
inline std::vector<std::vector<double>> load_feature_csv(std::istream& in, char delim = ',') {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input: header row required", 1, 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t cols = detail::split_csv_line(line, delim, 1).size();

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = detail::split_csv_line(line, delim, line_no);
        if (fields.size() != cols)
            throw ParseError("expected " + std::to_string(cols) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no, 1);
        std::vector<double> row;
        row.reserve(cols);
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (fields[j].empty()) throw MissingValue(line_no, j + 1);
            row.push_back(detail::parse_double_strict(fields[j], line_no, j + 1));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no data rows", line_no, 1);
    return rows;
}

inline std::vector<std::vector<double>> load_feature_csv(const std::string& path,
                                                         char delim = ',') {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return load_feature_csv(in, delim);
}

// Canonical emission: feature columns x0..x{D-1} (or given names) then the
// label column with raw names; values at 17 significant digits so re-loading
// reproduces the dataset exactly.
inline void save_csv(const Dataset& data, std::ostream& out,
                     const std::string& label_col_name = "label", char delim = ',') {
    for (std::size_t j = 0; j < data.num_dims; ++j)
        out << detail::csv_escape("x" + std::to_string(j), delim) << delim;
    out << detail::csv_escape(label_col_name, delim) << "\n";
    for (std::size_t i = 0; i < data.num_rows; ++i) {
        auto row = data.instance(i);
        for (std::size_t j = 0; j < data.num_dims; ++j) out << format_g17(row[j]) << delim;
        out << detail::csv_escape(data.label_names[static_cast<std::size_t>(data.labels[i])], delim)
            << "\n";
    }
}

inline void write_cv_report_csv(const CvReport& report, std::ostream& out) {
    out << "fold,error\n";
    for (std::size_t f = 0; f < report.per_fold_errors.size(); ++f)
        out << f << "," << format_g9(report.per_fold_errors[f]) << "\n";
}

inline void write_bounds_curve_csv(const BoundsCurve& curve, std::ostream& out) {
    out << "n,lower,upper,test_error\n";
    for (const BoundsCurvePoint& p : curve)
        out << p.train_size << "," << format_g9(p.lower) << "," << format_g9(p.upper) << ","
            << format_g9(p.test_error) << "\n";
}

// --- model persistence -------------------------------------------------------

inline constexpr int kModelSchemaVersion = 1;

// The persisted form of a fitted model: enough to predict (feature map,
// mu, nu, label names) plus the learned bounds and estimate provenance.
struct ModelFile {
    int schema_version = kModelSchemaVersion;
    std::size_t num_labels = 0;
    std::vector<ThresholdSpec> thresholds;
    std::vector<double> mu;
    double nu = 0.0;
    double upper_bound = 0.0;
    std::optional<double> lower_bound;
    std::vector<double> lambda;
    std::size_t sample_count = 0;
    std::vector<std::string> label_names;

    static ModelFile from_model(const MrcModel& model, std::vector<std::string> names) {
        ModelFile f;
        f.num_labels = model.feature_map.num_labels;
        f.thresholds = model.feature_map.thresholds;
        f.mu = model.mu;
        f.nu = model.nu;
        f.upper_bound = model.upper_bound;
        f.lower_bound = model.lower_bound;
        f.lambda = model.estimates.lambda;
        f.sample_count = model.estimates.sample_count;
        f.label_names = std::move(names);
        return f;
    }

    FeatureMap feature_map() const { return FeatureMap{num_labels, thresholds}; }
};

namespace detail {

inline nlohmann::ordered_json reals_to_json(const std::vector<double>& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (double x : v) arr.push_back(format_g17(x));
    return arr;
}

inline std::vector<double> reals_from_json(const nlohmann::json& arr, const char* field) {
    if (!arr.is_array()) throw SchemaMismatch(std::string("model field '") + field + "' must be an array");
    std::vector<double> v;
    v.reserve(arr.size());
    for (const auto& item : arr) {
        if (!item.is_string()) throw SchemaMismatch(std::string("model field '") + field + "' must hold decimal strings");
        v.push_back(parse_double_strict(item.get<std::string>(), 0, 0));
    }
    return v;
}

}  // namespace detail

inline std::string serialize_model(const ModelFile& f) {
    nlohmann::ordered_json j;
    j["schema_version"] = f.schema_version;
    j["num_labels"] = f.num_labels;
    nlohmann::ordered_json th = nlohmann::ordered_json::array();
    for (const ThresholdSpec& t : f.thresholds) {
        nlohmann::ordered_json entry;
        entry["dimension"] = t.dimension;
        entry["value"] = format_g17(t.value);
        th.push_back(std::move(entry));
    }
    j["thresholds"] = std::move(th);
    j["mu"] = detail::reals_to_json(f.mu);
    j["nu"] = format_g17(f.nu);
    j["upper_bound"] = format_g17(f.upper_bound);
    if (f.lower_bound) j["lower_bound"] = format_g17(*f.lower_bound);
    j["lambda"] = detail::reals_to_json(f.lambda);
    j["n"] = f.sample_count;
    j["label_names"] = f.label_names;
    return j.dump(2) + "\n";
}

inline ModelFile parse_model(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaMismatch(std::string("model file is not valid JSON: ") + e.what());
    }
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
        throw SchemaMismatch("model file lacks an integer schema_version");
    if (j["schema_version"].get<int>() != kModelSchemaVersion)
        throw SchemaMismatch("unsupported schema_version " + j["schema_version"].dump());

    ModelFile f;
    try {
        f.num_labels = j.at("num_labels").get<std::size_t>();
        for (const auto& entry : j.at("thresholds")) {
            ThresholdSpec t;
            t.dimension = entry.at("dimension").get<std::size_t>();
            t.value = detail::parse_double_strict(entry.at("value").get<std::string>(), 0, 0);
            f.thresholds.push_back(t);
        }
        f.mu = detail::reals_from_json(j.at("mu"), "mu");
        f.nu = detail::parse_double_strict(j.at("nu").get<std::string>(), 0, 0);
        f.upper_bound = detail::parse_double_strict(j.at("upper_bound").get<std::string>(), 0, 0);
        if (j.contains("lower_bound"))
            f.lower_bound = detail::parse_double_strict(j.at("lower_bound").get<std::string>(), 0, 0);
        f.lambda = detail::reals_from_json(j.at("lambda"), "lambda");
        f.sample_count = j.at("n").get<std::size_t>();
        f.label_names = j.at("label_names").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaMismatch(std::string("malformed model file: ") + e.what());
    }
    if (f.label_names.size() != f.num_labels)
        throw SchemaMismatch("label_names does not match num_labels");
    if (f.mu.size() != f.num_labels * (f.thresholds.size() + 1))
        throw SchemaMismatch("mu length does not match the feature layout");
    return f;
}

inline void save_model(const ModelFile& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << serialize_model(f);
}

inline ModelFile load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

}  // namespace mrc
