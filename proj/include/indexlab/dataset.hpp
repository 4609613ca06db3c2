#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "indexlab/error.hpp"

namespace indexlab {

/// Canonical column names of the bundled country dataset, in file order.
namespace columns {
inline constexpr std::string_view sii = "SII";
inline constexpr std::string_view policy = "Policy and institutional framework";
inline constexpr std::string_view financing = "Financing";
inline constexpr std::string_view entrepreneurship = "Entrepreneurship";
inline constexpr std::string_view society = "Society";
inline constexpr std::string_view idesi = "I-DESI";
inline constexpr std::string_view connectivity = "Connectivity";
inline constexpr std::string_view human_capital = "Human capital";
inline constexpr std::string_view use_of_internet = "Use of the internet";
inline constexpr std::string_view integration_of_digital_technology = "Integration of digital technology";
inline constexpr std::string_view digital_public_services = "Digital public services";

inline constexpr std::array<std::string_view, 11> all = {
    sii, policy, financing, entrepreneurship, society, idesi,
    connectivity, human_capital, use_of_internet, integration_of_digital_technology,
    digital_public_services};

inline constexpr std::array<std::string_view, 4> sii_pillars = {policy, financing, entrepreneurship,
                                                                 society};

inline constexpr std::array<std::string_view, 5> idesi_dimensions = {
    connectivity, human_capital, use_of_internet, integration_of_digital_technology,
    digital_public_services};

/// Short names accepted wherever a column name is looked up.
inline constexpr std::array<std::pair<std::string_view, std::string_view>, 12> aliases = {{
    {"Policy", policy},
    {"PIF", policy},
    {"IDESI", idesi},
    {"Conn", connectivity},
    {"HC", human_capital},
    {"UoI", use_of_internet},
    {"Use of internet", use_of_internet},
    {"IDT", integration_of_digital_technology},
    {"DPS", digital_public_services},
    {"Entre", entrepreneurship},
    {"Fin", financing},
    {"Soc", society},
}};
}  // namespace columns

namespace detail {

inline bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits one CSV line. Double-quoted fields may contain commas; "" is an
// escaped quote.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? cur : std::string(trim(cur)));
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    if (quoted)
        throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(was_quoted ? cur : std::string(trim(cur)));
    return fields;
}

inline std::string quote_csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_exact(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace detail

/// A named column of values aligned to dataset row order.
struct Series {
    std::string name;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    std::span<const double> view() const noexcept { return values; }
};

/// One country row. `values` is aligned to the owning dataset's columns.
struct CountryRecord {
    std::string name;
    std::vector<double> values;
};

/// Immutable table of country records sharing one column set. Row order is
/// kept exactly as supplied.
class Dataset {
public:
    Dataset() = default;

    Dataset(std::vector<std::string> columns, std::vector<CountryRecord> records)
        : columns_(std::move(columns)), records_(std::move(records)) {
        validate();
    }

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<CountryRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    /// Index of a column by exact name, case-insensitive name, or alias.
    std::optional<std::size_t> find_column(std::string_view name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (columns_[i] == name) return i;
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (detail::iequals(columns_[i], name)) return i;
        for (const auto& [alias, canonical] : columns::aliases)
            if (detail::iequals(alias, name)) {
                for (std::size_t i = 0; i < columns_.size(); ++i)
                    if (columns_[i] == canonical) return i;
            }
        return std::nullopt;
    }

    std::size_t column_index(std::string_view name) const {
        if (auto i = find_column(name)) return *i;
        throw Error(ErrorKind::lookup, "unknown column '" + std::string(name) + "'");
    }

    /// Canonical spelling of a (possibly aliased) column name.
    const std::string& canonical_name(std::string_view name) const {
        return columns_[column_index(name)];
    }

    Series column(std::string_view name) const {
        std::size_t c = column_index(name);
        Series s{columns_[c], {}};
        s.values.reserve(records_.size());
        for (const auto& r : records_) s.values.push_back(r.values[c]);
        return s;
    }

    double value(std::size_t row, std::string_view column_name) const {
        return records_.at(row).values[column_index(column_name)];
    }

    std::optional<std::size_t> find_country(std::string_view name) const {
        for (std::size_t i = 0; i < records_.size(); ++i)
            if (records_[i].name == name) return i;
        return std::nullopt;
    }

    std::vector<std::string> row_labels() const {
        std::vector<std::string> out;
        out.reserve(records_.size());
        for (const auto& r : records_) out.push_back(r.name);
        return out;
    }

    Dataset without_row(std::size_t row) const {
        if (row >= records_.size()) throw Error(ErrorKind::lookup, "row out of range");
        auto recs = records_;
        recs.erase(recs.begin() + static_cast<std::ptrdiff_t>(row));
        return Dataset(columns_, std::move(recs));
    }

private:
    void validate() const {
        std::set<std::string> seen_cols;
        for (const auto& c : columns_)
            if (!seen_cols.insert(c).second)
                throw Error(ErrorKind::validation, "duplicate column '" + c + "'");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const auto& r = records_[i];
            if (r.values.size() != columns_.size())
                throw Error(ErrorKind::validation, "record '" + r.name + "' has " +
                                                       std::to_string(r.values.size()) +
                                                       " values, expected " +
                                                       std::to_string(columns_.size()));
            if (!seen.insert(r.name).second)
                throw Error(ErrorKind::validation, "duplicate country '" + r.name + "'");
            for (std::size_t c = 0; c < columns_.size(); ++c) {
                double v = r.values[c];
                if (!std::isfinite(v) || v < 0.0 || v > 100.0)
                    throw Error(ErrorKind::validation,
                                "record '" + r.name + "', column '" + columns_[c] + "': value " +
                                    detail::format_exact(v) + " outside [0, 100]");
            }
        }
    }

    std::vector<std::string> columns_;
    std::vector<CountryRecord> records_;
};

/// Parses the dataset CSV: header `country,<col>,...`, one country per row.
inline Dataset parse_dataset(std::string_view csv_text) {
    std::vector<std::string> header;
    std::vector<CountryRecord> records;
    bool have_header = false;
    std::size_t line_no = 0;
    while (!csv_text.empty()) {
        auto nl = csv_text.find('\n');
        std::string_view line = csv_text.substr(0, nl);
        csv_text = nl == std::string_view::npos ? std::string_view{} : csv_text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (detail::trim(line).empty()) continue;

        auto fields = detail::split_csv_line(line, line_no);
        if (!have_header) {
            if (!detail::iequals(fields.front(), "country"))
                throw Error(ErrorKind::parse, "line " + std::to_string(line_no) +
                                                  ": first header cell must be 'country'");
            header.assign(fields.begin() + 1, fields.end());
            have_header = true;
            continue;
        }
        if (fields.size() < header.size() + 1)
            throw Error(ErrorKind::validation, "line " + std::to_string(line_no) + " ('" +
                                                   fields.front() + "'): missing cell for column '" +
                                                   header[fields.size() - 1] + "'");
        if (fields.size() > header.size() + 1)
            throw Error(ErrorKind::validation,
                        "line " + std::to_string(line_no) + ": more cells than header columns");
        CountryRecord rec{fields.front(), {}};
        for (std::size_t c = 0; c < header.size(); ++c) {
            const auto& cell = fields[c + 1];
            if (detail::trim(cell).empty())
                throw Error(ErrorKind::validation, "line " + std::to_string(line_no) + " ('" +
                                                       rec.name + "'): missing cell for column '" +
                                                       header[c] + "'");
            auto v = detail::parse_double(cell);
            if (!v)
                throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + " ('" + rec.name +
                                                  "'), column '" + header[c] +
                                                  "': malformed number '" + cell + "'");
            rec.values.push_back(*v);
        }
        records.push_back(std::move(rec));
    }
    if (!have_header) throw Error(ErrorKind::parse, "missing header row");
    return Dataset(std::move(header), std::move(records));
}

/// Serializes a dataset to CSV with round-trip exact numbers.
inline std::string to_csv(const Dataset& ds) {
    std::string out = "country";
    for (const auto& c : ds.columns()) out += "," + detail::quote_csv_field(c);
    out += "\n";
    for (const auto& r : ds.records()) {
        out += detail::quote_csv_field(r.name);
        for (double v : r.values) out += "," + detail::format_exact(v);
        out += "\n";
    }
    return out;
}

inline std::vector<Series> select(const Dataset& ds, std::span<const std::string> names) {
    std::vector<Series> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(ds.column(n));
    return out;
}

inline std::vector<Series> select(const Dataset& ds, std::initializer_list<std::string_view> names) {
    std::vector<Series> out;
    out.reserve(names.size());
    for (auto n : names) out.push_back(ds.column(n));
    return out;
}

/// CSV text of the 29-country analysis dataset (SII-descending order).
inline constexpr std::string_view table_a1_csv =
    "country,SII,Policy and institutional framework,Financing,Entrepreneurship,Society,I-DESI,"
    "Connectivity,Human capital,Use of the internet,Integration of digital technology,"
    "Digital public services\n"
    "USA,79.4,84.6,80.4,76.2,68.4,59.0,70.0,55.0,49.0,50.0,68.0\n"
    "UK,77.3,86.6,75.1,68.4,64.9,60.0,67.0,41.0,59.0,60.0,78.0\n"
    "Canada,75.7,77.9,82.0,61.4,74.1,54.0,53.0,36.0,64.0,54.0,72.0\n"
    "Denmark,71.2,67.2,75.6,61.1,83.9,65.0,72.0,55.0,68.0,62.0,69.0\n"
    "Belgium,69.2,70.1,77.9,55.1,68.0,48.0,63.0,31.0,52.0,51.0,46.0\n"
    "New Zealand,67.2,58.8,70.1,70.6,80.9,52.0,57.0,49.0,45.0,40.0,73.0\n"
    "France,66.4,79.6,61.9,54.0,50.0,51.0,65.0,37.0,38.0,42.0,75.0\n"
    "Germany,66.0,69.2,67.8,60.1,61.1,50.0,63.0,42.0,43.0,46.0,54.0\n"
    "Sweden,65.7,63.3,69.3,60.8,71.2,59.0,70.0,45.0,61.0,56.0,65.0\n"
    "Switzerland,61.6,55.8,69.0,58.4,69.2,57.0,70.0,52.0,57.0,61.0,41.0\n"
    "Australia,60.6,49.2,72.9,59.6,74.2,60.0,64.0,50.0,60.0,52.0,80.0\n"
    "South Korea,60.0,74.2,52.3,45.9,46.7,50.0,67.0,30.0,50.0,40.0,68.0\n"
    "Finland,59.2,52.1,66.2,60.5,66.8,64.0,71.0,62.0,52.0,54.0,79.0\n"
    "Norway,59.2,49.2,56.0,66.3,81.6,59.0,67.0,47.0,67.0,49.0,71.0\n"
    "Iceland,59.0,52.1,51.4,55.0,88.3,61.0,67.0,60.0,64.0,61.0,49.0\n"
    "Netherlands,57.7,47.2,52.9,75.9,74.3,59.0,66.0,49.0,55.0,60.0,68.0\n"
    "Italy,57.5,64.2,54.1,51.4,50.4,39.0,59.0,25.0,24.0,39.0,43.0\n"
    "Chile,56.9,65.4,43.8,67.7,43.1,45.0,47.0,48.0,37.0,46.0,41.0\n"
    "Ireland,56.5,33.8,73.4,65.4,83.7,49.0,60.0,41.0,48.0,41.0,58.0\n"
    "Israel,55.8,52.1,59.5,58.8,57.6,42.0,49.0,27.0,46.0,45.0,44.0\n"
    "Poland,52.6,56.7,51.4,54.0,43.1,35.0,57.0,26.0,30.0,20.0,35.0\n"
    "Portugal,52.0,53.8,38.2,61.1,56.6,38.0,59.0,31.0,30.0,30.0,36.0\n"
    "Japan,48.0,49.1,54.4,44.8,40.4,49.0,66.0,37.0,44.0,41.0,54.0\n"
    "Spain,44.8,41.7,44.8,52.3,46.2,50.0,60.0,37.0,36.0,49.0,72.0\n"
    "Russia,41.4,46.3,38.2,46.3,29.2,38.0,42.0,36.0,46.0,30.0,38.0\n"
    "Mexico,40.2,36.7,39.8,50.5,40.9,34.0,43.0,24.0,19.0,37.0,49.0\n"
    "Brazil,37.4,28.8,41.3,59.4,35.4,37.0,48.0,35.0,26.0,24.0,46.0\n"
    "Turkey,36.2,30.9,36.9,64.9,24.5,26.0,40.0,19.0,21.0,19.0,24.0\n"
    "China,33.8,29.2,37.5,53.9,24.0,34.0,51.0,24.0,29.0,28.0,37.0\n";

inline const Dataset& bundled_table_a1() {
    static const Dataset ds = parse_dataset(table_a1_csv);
    return ds;
}

/// Throws unless `ds` carries every column of the bundled schema.
inline void require_table_a1_schema(const Dataset& ds) {
    std::string missing;
    for (auto c : columns::all)
        if (!ds.find_column(c)) missing += (missing.empty() ? "" : ", ") + std::string(c);
    if (!missing.empty())
        throw Error(ErrorKind::validation, "dataset schema mismatch; missing columns: " + missing);
}

}  // namespace indexlab
