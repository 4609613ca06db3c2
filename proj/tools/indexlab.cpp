// indexlab: composite index construction and the SII / I-DESI analysis
// pipeline from the command line.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "indexlab/indexlab.hpp"

namespace fs = std::filesystem;
using namespace indexlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitGoldenFailure = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::usage, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::usage, "cannot write '" + path.string() + "'");
    out << text;
}

Dataset load(const std::string& input) {
    if (input.empty()) return bundled_table_a1();
    return parse_dataset(read_file(input));
}

std::vector<std::string> columns_or_all(const Dataset& ds, const std::vector<std::string>& requested) {
    if (requested.empty()) return ds.columns();
    std::vector<std::string> out;
    for (const auto& c : requested) out.push_back(ds.canonical_name(c));
    return out;
}

struct CommonOptions {
    std::string input;
    std::vector<std::string> columns;
    std::string format = "markdown";
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_columns = true) {
    cmd->add_option("-i,--input", opt.input, "Dataset CSV (default: bundled 29-country dataset)");
    if (with_columns) cmd->add_option("-c,--column", opt.columns, "Column name or alias (repeatable)");
    cmd->add_option("-f,--format", opt.format, "Output format")
        ->check(CLI::IsMember({"markdown", "csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Composite index construction and econometrics toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    // dataset export | validate
    auto* dataset_cmd = app.add_subcommand("dataset", "Export or validate a dataset CSV");
    dataset_cmd->require_subcommand(1);
    std::string export_path;
    auto* export_cmd = dataset_cmd->add_subcommand("export", "Write the bundled dataset as CSV");
    export_cmd->add_option("-o,--output", export_path, "Output file (default: stdout)");
    std::string validate_path;
    auto* validate_cmd = dataset_cmd->add_subcommand("validate", "Parse and validate a dataset CSV");
    validate_cmd->add_option("-i,--input", validate_path, "Dataset CSV")->required();

    // index compute | show | rank
    auto* index_cmd = app.add_subcommand("index", "Evaluate composite index definitions");
    index_cmd->require_subcommand(1);
    std::string preset_name, definition_path, index_input;
    bool show_contributions = false;
    auto* compute_cmd = index_cmd->add_subcommand("compute", "Compute an index for every row of a CSV");
    auto* preset_opt = compute_cmd->add_option("--preset", preset_name, "Built-in definition")
                           ->check(CLI::IsMember({"sii-2016", "idesi-2020"}));
    auto* def_opt = compute_cmd->add_option("--definition", definition_path, "Definition file");
    preset_opt->excludes(def_opt);
    compute_cmd->add_option("-i,--input", index_input, "Component score CSV (default: bundled dataset)");
    compute_cmd->add_flag("--contributions", show_contributions, "Also print per-component contributions");
    std::string show_preset;
    auto* show_cmd = index_cmd->add_subcommand("show", "Print a built-in definition in text form");
    show_cmd->add_option("preset", show_preset)->required()->check(CLI::IsMember({"sii-2016", "idesi-2020"}));
    std::string rank_column = "SII", rank_input;
    auto* rank_cmd = index_cmd->add_subcommand("rank", "Rank countries by a column");
    rank_cmd->add_option("-c,--column", rank_column, "Column to rank by");
    rank_cmd->add_option("-i,--input", rank_input, "Dataset CSV");

    // per-analysis commands
    CommonOptions describe_opt, normality_opt, correlate_opt, pca_opt, regress_opt;
    auto* describe_cmd = app.add_subcommand("describe", "Descriptive statistics and Shapiro-Wilk");
    add_common(describe_cmd, describe_opt);
    auto* normality_cmd = app.add_subcommand("normality", "Shapiro-Wilk normality tests");
    add_common(normality_cmd, normality_opt);
    auto* correlate_cmd = app.add_subcommand("correlate", "Pearson correlation matrix");
    add_common(correlate_cmd, correlate_opt);
    double retention = 1.0;
    auto* pca_cmd = app.add_subcommand("pca", "PCA with KMO and Bartlett's test");
    add_common(pca_cmd, pca_opt);
    pca_cmd->add_option("--retention", retention, "Eigenvalue retention threshold");

    auto* regress_cmd = app.add_subcommand("regress", "OLS regression with diagnostics");
    add_common(regress_cmd, regress_opt, false);
    std::string response = "SII";
    std::vector<std::string> predictors;
    bool stepwise = false;
    double p_enter = 0.05, p_remove = 0.10;
    std::uint64_t regress_seed = 42;
    std::size_t regress_reps = 10000;
    std::string dw_order = "labels";
    regress_cmd->add_option("-y,--response", response, "Response column");
    regress_cmd->add_option("-x,--predictor", predictors, "Predictor column (repeatable)")->required();
    regress_cmd->add_flag("--stepwise", stepwise, "Stepwise selection over the predictors");
    regress_cmd->add_option("--p-enter", p_enter, "Stepwise entry threshold");
    regress_cmd->add_option("--p-remove", p_remove, "Stepwise removal threshold");
    regress_cmd->add_option("--seed", regress_seed, "Durbin-Watson bootstrap seed");
    regress_cmd->add_option("--replicates", regress_reps, "Durbin-Watson bootstrap replicates");
    regress_cmd->add_option("--dw-order", dw_order, "Residual order for Durbin-Watson")
        ->check(CLI::IsMember({"rows", "labels"}));

    // reproduce
    std::uint64_t seed = 42;
    std::string format = "markdown", out_dir, repro_input;
    std::size_t replicates = 10000;
    bool golden = false;
    auto* reproduce_cmd = app.add_subcommand("reproduce", "Run the full analysis pipeline");
    reproduce_cmd->add_option("--seed", seed, "Master seed for the bootstrap");
    reproduce_cmd->add_option("-f,--format", format, "Output format")
        ->check(CLI::IsMember({"markdown", "csv", "json"}));
    reproduce_cmd->add_flag("--golden-diff", golden, "Compare against the published tables");
    reproduce_cmd->add_option("--out-dir", out_dir, "Directory for fig3.dat, fig4.dat, fig5.dat");
    reproduce_cmd->add_option("--replicates", replicates, "Durbin-Watson bootstrap replicates");
    reproduce_cmd->add_option("-i,--input", repro_input, "Dataset CSV (default: bundled dataset)");

    // predict
    std::string model = "simple";
    double score = 0.0;
    auto* predict_cmd = app.add_subcommand("predict", "Predict SII from an I-DESI or IDT score");
    predict_cmd->add_option("--model", model, "Fitted model")->check(CLI::IsMember({"simple", "stepwise"}));
    predict_cmd->add_option("--score", score, "Predictor score in [0, 100]")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitError;
    }

    try {
        if (export_cmd->parsed()) {
            const auto text = to_csv(bundled_table_a1());
            if (export_path.empty())
                std::cout << text;
            else
                write_file(export_path, text);
        } else if (validate_cmd->parsed()) {
            const auto ds = parse_dataset(read_file(validate_path));
            std::cout << "ok: " << ds.size() << " records, " << ds.columns().size() << " columns\n";
        } else if (compute_cmd->parsed()) {
            if (preset_name.empty() && definition_path.empty())
                throw Error(ErrorKind::usage, "index compute needs --preset or --definition");
            const auto def = preset_name.empty() ? parse_index_definition(read_file(definition_path))
                                                 : preset(preset_name);
            const auto ds = load(index_input);
            std::cout << "country," << (def.name.empty() ? "index" : def.name);
            if (show_contributions)
                for (const auto& c : def.components) std::cout << "," << detail::quote_csv_field(c.name);
            std::cout << "\n";
            for (const auto& s : compute_for_dataset(def, ds)) {
                std::cout << detail::quote_csv_field(s.country) << "," << detail::fixed(s.value, 4);
                if (show_contributions)
                    for (const auto& [name, v] : s.contributions) std::cout << "," << detail::fixed(v, 4);
                std::cout << "\n";
            }
        } else if (show_cmd->parsed()) {
            std::cout << to_text(preset(show_preset));
        } else if (rank_cmd->parsed()) {
            const auto ds = load(rank_input);
            std::cout << "rank,country," << detail::quote_csv_field(ds.canonical_name(rank_column)) << "\n";
            for (const auto& r : rank(ds, rank_column))
                std::cout << r.rank << "," << detail::quote_csv_field(r.country) << "," << detail::format_exact(r.score)
                          << "\n";
        } else if (describe_cmd->parsed()) {
            const auto ds = load(describe_opt.input);
            std::cout << emit_tables({descriptives_table(ds, columns_or_all(ds, describe_opt.columns))},
                                     parse_format(describe_opt.format));
        } else if (normality_cmd->parsed()) {
            const auto ds = load(normality_opt.input);
            Table t{"NORMALITY", "Shapiro-Wilk", {"W", "p", "n"}, {}};
            for (const auto& c : columns_or_all(ds, normality_opt.columns)) {
                const auto s = ds.column(c);
                const auto r = shapiro_wilk(s);
                t.rows.push_back({"", c,
                                  {Cell{r.w, {}, CellFormat::fixed3}, Cell{r.p.value, {}, CellFormat::fixed3},
                                   Cell{static_cast<double>(s.size()), {}, CellFormat::integer}}});
            }
            std::cout << emit_tables({t}, parse_format(normality_opt.format));
        } else if (correlate_cmd->parsed()) {
            const auto ds = load(correlate_opt.input);
            std::cout << emit_tables({correlation_table(ds, columns_or_all(ds, correlate_opt.columns))},
                                     parse_format(correlate_opt.format));
        } else if (pca_cmd->parsed()) {
            const auto ds = load(pca_opt.input);
            const auto vars = columns_or_all(ds, pca_opt.columns);
            const auto res = run_pca(ds, vars, retention);
            Table loadings{"LOADINGS", "Component matrix", {}, {}};
            for (std::size_t j = 0; j < res.retained; ++j)
                loadings.columns.push_back("Component " + std::to_string(j + 1));
            for (std::size_t i = 0; i < vars.size(); ++i) {
                TableRow r{"", vars[i], {}};
                for (std::size_t j = 0; j < res.retained; ++j) r.cells.push_back(Cell{res.loadings(i, j), {}, CellFormat::fixed3});
                loadings.rows.push_back(std::move(r));
            }
            Table eig{"EIGENVALUES", "Total variance explained", {"Eigenvalue", "% of variance", "Cumulative %"}, {}};
            for (std::size_t j = 0; j < res.eigenvalues.size(); ++j)
                eig.rows.push_back({"", "Component " + std::to_string(j + 1),
                                    {Cell{res.eigenvalues[j], {}, CellFormat::fixed3},
                                     Cell{res.variance_explained_pct[j], {}, CellFormat::fixed3},
                                     Cell{res.cumulative_pct[j], {}, CellFormat::fixed3}}});
            Table adequacy{"ADEQUACY", "KMO and Bartlett's test", {"Value"},
                           {{"", "KMO", {Cell{res.kmo, {}, CellFormat::fixed3}}},
                            {"", "Bartlett chi-square", {Cell{res.bartlett.statistic, {}, CellFormat::fixed3}}},
                            {"", "Bartlett df", {Cell{res.bartlett.df, {}, CellFormat::integer}}},
                            {"", "Bartlett p", {Cell{res.bartlett.p.value, {}, CellFormat::p_value}}}}};
            std::cout << emit_tables({loadings, eig, adequacy}, parse_format(pca_opt.format));
        } else if (regress_cmd->parsed()) {
            const auto ds = load(regress_opt.input);
            std::vector<std::string> xs;
            for (const auto& p : predictors) xs.push_back(ds.canonical_name(p));
            const std::string y = ds.canonical_name(response);
            std::vector<Table> tables;
            LinearModelFit fit;
            if (stepwise) {
                auto res = stepwise_fit(ds, y, xs, p_enter, p_remove);
                Table steps{"STEPS", "Stepwise selection trace", {"Action", "Variable", "p"}, {}};
                for (std::size_t i = 0; i < res.trace.size(); ++i) {
                    const auto& s = res.trace[i];
                    steps.rows.push_back({"", "Step " + std::to_string(i + 1),
                                          {Cell{std::nullopt, s.action == StepwiseStep::Action::enter ? "enter" : "remove", CellFormat::text},
                                           Cell{std::nullopt, s.variable, CellFormat::text},
                                           Cell{s.p, {}, CellFormat::p_value}}});
                }
                tables.push_back(std::move(steps));
                fit = std::move(res.fit);
            } else {
                fit = fit_ols(ds, y, xs);
            }
            const auto h0 = null_model(ds, y);
            DurbinWatsonOptions dwo{regress_reps, regress_seed,
                                    dw_order == "rows" ? ResidualOrder::rows : ResidualOrder::labels, 0};
            tables.push_back(model_summary_table(h0, durbin_watson(h0, dwo), fit, durbin_watson(fit, dwo)));
            std::optional<CollinearityReport> coll;
            if (fit.k() > 0) coll = collinearity(select(ds, fit.predictors));
            tables.push_back(coefficients_table(h0, fit, coll ? &*coll : nullptr));
            if (fit.k() > 0) tables.push_back(anova_table(fit));
            const auto cw = casewise_diagnostics(fit);
            Table casewise{"CASEWISE", "Casewise diagnostics (|standardized residual| > 3 or Cook's D > 1)",
                           {"Standardized residual", "Cook's distance"}, {}};
            for (auto i : cw.flagged)
                casewise.rows.push_back({"", fit.row_labels[i],
                                         {Cell{cw.standardized_residual[i], {}, CellFormat::fixed3},
                                          Cell{cw.cooks_distance[i], {}, CellFormat::fixed3}}});
            tables.push_back(std::move(casewise));
            std::cout << emit_tables(std::move(tables), parse_format(regress_opt.format));
        } else if (reproduce_cmd->parsed()) {
            PipelineOptions opt;
            opt.replicates = replicates;
            const auto bundle = reproduce_all(load(repro_input), seed, opt);
            std::cout << emit(bundle, format);
            if (!out_dir.empty()) {
                fs::create_directories(out_dir);
                for (const auto& f : bundle.figures) {
                    std::string name = f.id;
                    for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
                    write_file(fs::path(out_dir) / ("fig" + name.substr(1) + ".dat"), emit_figure(f));
                }
            }
            if (golden) {
                const auto diff = diff_golden(bundle);
                std::cerr << format_diff(diff);
                if (!diff.ok()) return kExitGoldenFailure;
            }
        } else if (predict_cmd->parsed()) {
            const auto rec = predict_country(model, score);
            std::cout << "model: " << rec.model << "\n"
                      << "predictor: " << rec.predictor << " = " << detail::format_exact(rec.input) << "\n"
                      << "predicted SII: " << detail::fixed(rec.predicted, 3) << "\n";
            if (rec.paper_value) std::cout << "paper printed: " << detail::fixed(*rec.paper_value, 3) << "\n";
            if (!rec.note.empty()) std::cout << "note: " << rec.note << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "indexlab: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "indexlab: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}
