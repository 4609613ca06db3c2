#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "indexlab/dataset.hpp"
#include "indexlab/error.hpp"

namespace indexlab {

/// One weighted component. `indicators` holds the optional second level;
/// indicators themselves may not nest further.
struct IndexComponent {
    std::string name;
    double weight = 0.0;
    std::vector<IndexComponent> indicators;
};

struct Normalization {
    enum class Kind { none, min_max };
    Kind kind = Kind::none;
    double lo = 0.0;
    double hi = 100.0;
};

struct IndexDefinition {
    std::string name;
    std::vector<IndexComponent> components;
    Normalization normalization;
};

struct IndexScore {
    std::string country;
    double value = 0.0;
    std::vector<std::pair<std::string, double>> contributions;
};

namespace detail {

inline void validate_components(const std::vector<IndexComponent>& comps, int depth,
                                const std::string& where) {
    if (comps.empty()) throw Error(ErrorKind::definition, where + ": no components");
    double sum = 0.0;
    for (const auto& c : comps) {
        if (!(c.weight > 0.0) || !std::isfinite(c.weight))
            throw Error(ErrorKind::definition, where + ": weight of '" + c.name + "' must be > 0");
        sum += c.weight;
        if (!c.indicators.empty()) {
            if (depth >= 2) throw Error(ErrorKind::definition, where + ": nesting deeper than 2 levels");
            validate_components(c.indicators, depth + 1, c.name);
        }
    }
    if (!(sum > 0.0)) throw Error(ErrorKind::definition, where + ": weights sum to zero");
}

inline double weight_sum(const std::vector<IndexComponent>& comps) {
    double s = 0.0;
    for (const auto& c : comps) s += c.weight;
    return s;
}

inline void check_score(std::string_view name, double v) {
    if (!std::isfinite(v) || v < 0.0 || v > 100.0)
        throw Error(ErrorKind::validation, "score for '" + std::string(name) + "' = " + format_exact(v) +
                                               " outside [0, 100]");
}

using ScoreMap = std::map<std::string, double, std::less<>>;

inline double component_score(const IndexComponent& c, const ScoreMap& scores) {
    if (auto it = scores.find(c.name); it != scores.end()) {
        check_score(c.name, it->second);
        return it->second;
    }
    if (c.indicators.empty())
        throw Error(ErrorKind::definition, "no score supplied for component '" + c.name + "'");
    const double total = weight_sum(c.indicators);
    double v = 0.0;
    for (const auto& ind : c.indicators) v += ind.weight / total * component_score(ind, scores);
    return v;
}

}  // namespace detail

inline void validate(const IndexDefinition& def) {
    detail::validate_components(def.components, 1, def.name.empty() ? "index" : def.name);
    if (def.normalization.kind == Normalization::Kind::min_max && !(def.normalization.hi > def.normalization.lo))
        throw Error(ErrorKind::definition, def.name + ": normalization needs hi > lo");
}

/// Component weights rescaled to sum to one.
inline std::vector<double> normalized_weights(const IndexDefinition& def) {
    const double total = detail::weight_sum(def.components);
    std::vector<double> w;
    for (const auto& c : def.components) w.push_back(c.weight / total);
    return w;
}

/// Maps each value to 100 (v - lo) / (hi - lo), clamped to [0, 100].
inline std::vector<double> min_max_normalize(std::span<const double> values, double lo, double hi) {
    if (!(hi > lo)) throw Error(ErrorKind::degenerate, "min-max normalization needs hi > lo");
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(std::clamp(100.0 * (v - lo) / (hi - lo), 0.0, 100.0));
    return out;
}

/// Weighted sum of component scores with renormalized weights. A component
/// with indicators is evaluated from its indicator scores when its own score
/// is not supplied.
inline IndexScore compute_composite(const IndexDefinition& def, const detail::ScoreMap& scores,
                                    std::string country = {}) {
    validate(def);
    const auto w = normalized_weights(def);
    IndexScore out{std::move(country), 0.0, {}};
    for (std::size_t i = 0; i < def.components.size(); ++i) {
        const double contrib = w[i] * detail::component_score(def.components[i], scores);
        out.contributions.emplace_back(def.components[i].name, contrib);
        out.value += contrib;
    }
    if (def.normalization.kind == Normalization::Kind::min_max) {
        const double scale = 100.0 / (def.normalization.hi - def.normalization.lo);
        const double raw = out.value;
        out.value = std::clamp((raw - def.normalization.lo) * scale, 0.0, 100.0);
        // Keep contributions summing to the reported value.
        if (raw != 0.0) {
            for (auto& c : out.contributions) c.second *= out.value / raw;
        } else {
            out.contributions.front().second = out.value;
        }
    }
    return out;
}

// ---------------------------------------------------------------- presets

inline IndexDefinition sii_2016() {
    return {"sii-2016",
            {
                {std::string(columns::policy), 44.44,
                 {{"Existence of national policy on social innovation", 25, {}},
                  {"Social innovation research and impact", 20, {}},
                  {"Legal framework for social enterprises", 20, {}},
                  {"Effectiveness of system in policy implementation", 20, {}},
                  {"The rule of law", 15, {}}}},
                {std::string(columns::financing), 22.22,
                 {{"Availability of government financing to promote social innovation", 50, {}},
                  {"Ease of getting credit", 25, {}},
                  {"Total public social expenditure", 25, {}}}},
                {std::string(columns::entrepreneurship), 15,
                 {{"Risk-taking mind-set", 25, {}},
                  {"Citizens' attitude towards entrepreneurship", 25, {}},
                  {"Ease of starting a business", 25, {}},
                  {"Development of clusters", 25, {}}}},
                {std::string(columns::society), 18.33,
                 {{"Culture of volunteerism", 20, {}},
                  {"Political participation", 20, {}},
                  {"Civil society engagement", 20, {}},
                  {"Trust in society", 20, {}},
                  {"Press freedom", 20, {}}}},
            },
            {}};
}

inline IndexDefinition idesi_2020() {
    return {"idesi-2020",
            {
                {std::string(columns::connectivity), 0.25, {}},
                {std::string(columns::human_capital), 0.25, {}},
                {std::string(columns::use_of_internet), 0.15, {}},
                {std::string(columns::integration_of_digital_technology), 0.20, {}},
                {std::string(columns::digital_public_services), 0.15, {}},
            },
            {}};
}

inline IndexDefinition preset(std::string_view name) {
    if (name == "sii-2016") return sii_2016();
    if (name == "idesi-2020") return idesi_2020();
    throw Error(ErrorKind::lookup, "unknown index preset '" + std::string(name) + "'");
}

namespace detail {
template <std::size_t N>
double evaluate_flat(const IndexDefinition& def, const std::array<double, N>& v) {
    ScoreMap scores;
    for (std::size_t i = 0; i < N; ++i) scores[def.components[i].name] = v[i];
    return compute_composite(def, scores).value;
}
}  // namespace detail

/// SII from pillar scores (policy, financing, entrepreneurship, society).
inline double compute_sii_from_pillars(const std::array<double, 4>& pillars) {
    return detail::evaluate_flat(sii_2016(), pillars);
}

/// I-DESI from dimension scores (connectivity, human capital, use of
/// internet, integration of digital technology, digital public services).
inline double compute_idesi(const std::array<double, 5>& dimensions) {
    return detail::evaluate_flat(idesi_2020(), dimensions);
}

/// Evaluates `def` for every record, reading component scores from the
/// columns of the same names.
inline std::vector<IndexScore> compute_for_dataset(const IndexDefinition& def, const Dataset& ds) {
    std::vector<IndexScore> out;
    for (const auto& rec : ds.records()) {
        detail::ScoreMap scores;
        for (std::size_t c = 0; c < ds.columns().size(); ++c) scores[ds.columns()[c]] = rec.values[c];
        for (const auto& comp : def.components)
            if (!scores.contains(comp.name))
                if (auto idx = ds.find_column(comp.name)) scores[comp.name] = rec.values[*idx];
        out.push_back(compute_composite(def, scores, rec.name));
    }
    return out;
}

// ---------------------------------------------------------------- ranking

struct RankEntry {
    std::size_t rank = 0;
    std::string country;
    double score = 0.0;
};

/// Descending competition ranking; ties share the smaller rank and keep
/// input order.
inline std::vector<RankEntry> rank(const Dataset& ds, std::string_view column) {
    const Series s = ds.column(column);
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return s.values[a] > s.values[b]; });
    std::vector<RankEntry> out;
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
        const double v = s.values[idx[pos]];
        const std::size_t r = (pos > 0 && v == out.back().score) ? out.back().rank : pos + 1;
        out.push_back({r, ds.records()[idx[pos]].name, v});
    }
    return out;
}

// ---------------------------------------------------------------- text format

/// Parses the declarative definition format:
///
///     index: my-index
///     normalize: min-max 0 10
///     Pillar A, 60%
///       Indicator 1, 50
///       Indicator 2, 50
///     Pillar B, 40%
///
/// Indented lines attach to the preceding top-level component; `#` starts a
/// comment line.
inline IndexDefinition parse_index_definition(std::string_view text) {
    IndexDefinition def;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const bool indented = std::isspace(static_cast<unsigned char>(line.front()));
        const std::string where = "line " + std::to_string(line_no);

        if (!indented && body.starts_with("index:")) {
            def.name = std::string(detail::trim(body.substr(6)));
            continue;
        }
        if (!indented && body.starts_with("normalize:")) {
            auto rest = detail::trim(body.substr(10));
            if (rest == "none") continue;
            if (!rest.starts_with("min-max")) throw Error(ErrorKind::parse, where + ": unknown normalization");
            rest = detail::trim(rest.substr(7));
            auto sp = rest.find_first_of(" \t");
            auto lo = detail::parse_double(rest.substr(0, sp));
            auto hi = sp == std::string_view::npos ? std::nullopt : detail::parse_double(rest.substr(sp));
            if (!lo || !hi) throw Error(ErrorKind::parse, where + ": normalize needs 'min-max <lo> <hi>'");
            def.normalization = {Normalization::Kind::min_max, *lo, *hi};
            continue;
        }

        const auto comma = body.rfind(',');
        if (comma == std::string_view::npos) throw Error(ErrorKind::parse, where + ": expected 'name, weight'");
        auto name = detail::trim(body.substr(0, comma));
        auto wtext = detail::trim(body.substr(comma + 1));
        if (!wtext.empty() && wtext.back() == '%') wtext.remove_suffix(1);
        auto w = detail::parse_double(wtext);
        if (name.empty() || !w) throw Error(ErrorKind::parse, where + ": malformed component '" + std::string(body) + "'");
        IndexComponent comp{std::string(name), *w, {}};
        if (indented) {
            if (def.components.empty())
                throw Error(ErrorKind::parse, where + ": indicator before any component");
            def.components.back().indicators.push_back(std::move(comp));
        } else {
            def.components.push_back(std::move(comp));
        }
    }
    validate(def);
    return def;
}

inline std::string to_text(const IndexDefinition& def) {
    std::string out;
    if (!def.name.empty()) out += "index: " + def.name + "\n";
    if (def.normalization.kind == Normalization::Kind::min_max)
        out += "normalize: min-max " + detail::format_exact(def.normalization.lo) + " " +
               detail::format_exact(def.normalization.hi) + "\n";
    for (const auto& c : def.components) {
        out += c.name + ", " + detail::format_exact(c.weight) + "\n";
        for (const auto& i : c.indicators) out += "  " + i.name + ", " + detail::format_exact(i.weight) + "\n";
    }
    return out;
}

}  // namespace indexlab
