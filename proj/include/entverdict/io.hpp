// io.hpp -- input documents and the two wire formats: the 4x4 matrix JSON
// and the coincidence-counts CSV.

#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "entverdict/errors.hpp"
#include "entverdict/linalg.hpp"
#include "entverdict/tomography.hpp"

namespace entverdict {

// Parse failure with a machine-checkable kind: "io-error", "malformed-json",
// "wrong-shape", "bad-basis", "non-finite-entry", "malformed-csv",
// "unknown-label", "negative-count", "duplicate-setting".
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string kind) : Error(what), kind(std::move(kind)) {}
    std::string kind;
};

struct InputDocument {
    enum class Kind { Matrix, Counts };

    std::variant<Mat4, std::vector<CoincidenceRecord>> payload;
    std::map<std::string, std::string> metadata;

    Kind kind() const {
        return std::holds_alternative<Mat4>(payload) ? Kind::Matrix : Kind::Counts;
    }
    const Mat4& matrix() const { return std::get<Mat4>(payload); }
    const std::vector<CoincidenceRecord>& counts() const {
        return std::get<std::vector<CoincidenceRecord>>(payload);
    }
};

namespace detail {

// One matrix entry: [re, im].  The strings "NaN"/"Inf"/"-Inf" are accepted as
// spellings of non-finite values so they can be rejected as such rather than
// as malformed JSON.
inline double json_entry_number(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "NaN" || s == "nan") return std::nan("");
        if (s == "Inf" || s == "Infinity" || s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-Inf" || s == "-Infinity" || s == "-inf")
            return -std::numeric_limits<double>::infinity();
    }
    throw ParseError("matrix entry component is not a number", "wrong-shape");
}

}  // namespace detail

// {"basis": ["HH","HV","VH","VV"], "matrix": [[[re,im], ...4], ...4]}.
// The basis array must match exactly; it pins the index convention.
inline Mat4 parse_matrix_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("matrix JSON does not parse: ") + e.what(),
                         "malformed-json");
    }
    if (!doc.is_object() || !doc.contains("basis") || !doc.contains("matrix"))
        throw ParseError("matrix JSON needs top-level \"basis\" and \"matrix\"", "wrong-shape");

    const nlohmann::json expected_basis = {"HH", "HV", "VH", "VV"};
    if (doc["basis"] != expected_basis)
        throw ParseError("matrix JSON basis must be exactly [\"HH\",\"HV\",\"VH\",\"VV\"]",
                         "bad-basis");

    const auto& rows = doc["matrix"];
    if (!rows.is_array() || rows.size() != 4)
        throw ParseError("matrix must be a 4x4 array", "wrong-shape");
    Mat4 m;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || row.size() != 4)
            throw ParseError("matrix must be a 4x4 array", "wrong-shape");
        for (std::size_t j = 0; j < 4; ++j) {
            const auto& entry = row[j];
            if (!entry.is_array() || entry.size() != 2)
                throw ParseError("matrix entries must be [re, im] pairs", "wrong-shape");
            const double re = detail::json_entry_number(entry[0]);
            const double im = detail::json_entry_number(entry[1]);
            if (!std::isfinite(re) || !std::isfinite(im)) {
                std::ostringstream os;
                os << "matrix entry (" << i << "," << j << ") is not finite";
                throw ParseError(os.str(), "non-finite-entry");
            }
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

inline std::string matrix_to_json(const Mat4& m, bool pretty = false) {
    nlohmann::json doc;
    doc["basis"] = {"HH", "HV", "VH", "VV"};
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < 4; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < 4; ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    doc["matrix"] = rows;
    return pretty ? doc.dump(2) : doc.dump();
}

// CSV with header "first,second,count"; rows like "H,H,34210".  LF endings
// (a trailing CR is tolerated), labels from {H,V,D,A,R,L}, counts nonnegative
// integers without separators.
inline std::vector<CoincidenceRecord> parse_counts_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<CoincidenceRecord> records;
    std::set<MeasurementSetting> seen;

    auto fail = [&](const std::string& msg, const std::string& kind) -> void {
        std::ostringstream os;
        os << "counts CSV line " << line_no << ": " << msg;
        throw ParseError(os.str(), kind);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.push_back("");

        if (!header_seen) {
            if (fields != std::vector<std::string>{"first", "second", "count"})
                fail("header must be first,second,count", "malformed-csv");
            header_seen = true;
            continue;
        }
        if (fields.size() != 3) fail("expected 3 fields", "malformed-csv");

        const auto first = parse_pol_label(fields[0]);
        if (!first) fail("unknown polarization label \"" + fields[0] + "\"", "unknown-label");
        const auto second = parse_pol_label(fields[1]);
        if (!second) fail("unknown polarization label \"" + fields[1] + "\"", "unknown-label");

        const std::string& cs = fields[2];
        auto all_digits = [](const std::string& s, std::size_t from) {
            if (from >= s.size()) return false;
            for (std::size_t i = from; i < s.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
            return true;
        };
        if (!cs.empty() && cs[0] == '-') {
            if (all_digits(cs, 1)) fail("negative count " + cs, "negative-count");
            fail("count \"" + cs + "\" is not an integer", "malformed-csv");
        }
        if (!all_digits(cs, 0))
            fail("count \"" + cs + "\" is not a nonnegative integer", "malformed-csv");
        std::uint64_t count = 0;
        try {
            count = std::stoull(cs);
        } catch (const std::exception&) {
            fail("count \"" + cs + "\" out of range", "malformed-csv");
        }

        const MeasurementSetting setting{*first, *second};
        if (!seen.insert(setting).second)
            fail("duplicate setting (" + fields[0] + "," + fields[1] + ")", "duplicate-setting");
        records.push_back({setting, count, std::nullopt});
    }
    if (!header_seen) fail("missing header", "malformed-csv");
    return records;
}

inline std::string counts_to_csv(const std::vector<CoincidenceRecord>& records) {
    std::ostringstream os;
    os << "first,second,count\n";
    for (const auto& r : records)
        os << to_string(r.setting.first) << "," << to_string(r.setting.second) << "," << r.count
           << "\n";
    return os.str();
}

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path, "io-error");
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw ParseError("cannot read " + path, "io-error");
    return os.str();
}

}  // namespace detail

inline InputDocument parse_matrix_file(const std::string& path) {
    InputDocument doc{parse_matrix_json(detail::read_file(path)), {{"input_id", path}}};
    return doc;
}

inline InputDocument parse_counts_file(const std::string& path) {
    InputDocument doc{parse_counts_csv(detail::read_file(path)), {{"input_id", path}}};
    return doc;
}

}  // namespace entverdict
