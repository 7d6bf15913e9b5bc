// entverdict CLI: analyze | decompose | tomo | simulate.
//
// Exit codes: 0 = run completed (the verdict itself lives in the output),
// 1 = input or usage error, 2 = internal failure (cross-check contradiction
// or numerical breakdown).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entverdict/entverdict.hpp"

namespace {

using namespace entverdict;

enum class OutputMode { Text, Json, Pretty };

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream os;
        os << std::cin.rdbuf();
        return os.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path, "io-error");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing", "io-error");
    out << content;
    if (!content.empty() && content.back() != '\n') out << '\n';
}

InputDocument::Kind sniff_kind(const std::string& content, const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return InputDocument::Kind::Matrix;
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
        return InputDocument::Kind::Counts;
    for (char c : content) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '{' ? InputDocument::Kind::Matrix : InputDocument::Kind::Counts;
    }
    throw ParseError("empty input", "malformed-csv");
}

InputDocument load_document(const std::string& content, const std::string& id,
                            InputDocument::Kind kind) {
    if (kind == InputDocument::Kind::Matrix)
        return {parse_matrix_json(content), {{"input_id", id}}};
    return {parse_counts_csv(content), {{"input_id", id}}};
}

// "standard16" or a file of comma-separated label pairs, one per line.
std::vector<MeasurementSetting> load_settings(const std::string& arg) {
    if (arg == "standard16") return standard_settings_16();
    std::ifstream in(arg);
    if (!in) throw ParseError("cannot open settings file " + arg, "io-error");
    std::vector<MeasurementSetting> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            std::ostringstream os;
            os << "settings file line " << line_no << ": expected LABEL,LABEL";
            throw ParseError(os.str(), "malformed-csv");
        }
        const auto first = parse_pol_label(line.substr(0, comma));
        const auto second = parse_pol_label(line.substr(comma + 1));
        if (!first || !second) {
            std::ostringstream os;
            os << "settings file line " << line_no << ": unknown label in \"" << line << "\"";
            throw ParseError(os.str(), "unknown-label");
        }
        const MeasurementSetting s{*first, *second};
        if (std::find(out.begin(), out.end(), s) != out.end()) {
            std::ostringstream os;
            os << "settings file line " << line_no << ": duplicate setting " << line;
            throw ParseError(os.str(), "duplicate-setting");
        }
        out.push_back(s);
    }
    if (out.empty()) throw ParseError("settings file " + arg + " lists no settings", "malformed-csv");
    return out;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed) {
    if (flag_seed) return *flag_seed;
    if (const char* env = std::getenv("ENTANGLE_VERDICT_SEED")) {
        const std::string s(env);
        try {
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(s, &pos);
            if (pos != s.size() || s[0] == '-') throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw InvalidArgument("ENTANGLE_VERDICT_SEED is not a 64-bit unsigned integer: " + s);
        }
    }
    return 0;
}

struct AnalyzeCli {
    std::string input;
    std::string batch_dir;
    std::string output;
    std::string settings = "standard16";
    double noise_floor = 0.01;
    double boundary_tol = default_boundary_tol;
    bool inject = false;
    OutputMode mode = OutputMode::Text;
};

int run_analyze(const AnalyzeCli& cli) {
    AnalyzeOptions options;
    options.noise_floor = cli.noise_floor;
    options.boundary_tol = cli.boundary_tol;
    options.required_settings = load_settings(cli.settings);
    options.inject_inconsistency = cli.inject;

    std::vector<VerdictReport> reports;
    if (!cli.batch_dir.empty()) {
        namespace fs = std::filesystem;
        if (!fs::is_directory(cli.batch_dir))
            throw ParseError(cli.batch_dir + " is not a directory", "io-error");
        std::vector<std::string> paths;
        for (const auto& entry : fs::directory_iterator(cli.batch_dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string ext = entry.path().extension().string();
            if (ext == ".json" || ext == ".csv") paths.push_back(entry.path().string());
        }
        std::sort(paths.begin(), paths.end());
        if (paths.empty())
            throw ParseError("no .json or .csv files in " + cli.batch_dir, "io-error");
        for (const auto& p : paths) {
            const std::string content = read_input(p);
            reports.push_back(analyze(load_document(content, p, sniff_kind(content, p)), options));
        }
    } else {
        const std::string id = cli.input.empty() || cli.input == "-" ? "stdin" : cli.input;
        const std::string content = read_input(cli.input);
        reports.push_back(
            analyze(load_document(content, id, sniff_kind(content, cli.input)), options));
    }

    std::string rendered;
    if (cli.mode == OutputMode::Text) {
        std::ostringstream os;
        for (std::size_t i = 0; i < reports.size(); ++i)
            os << (i ? "\n" : "") << report_to_text(reports[i]);
        rendered = os.str();
    } else {
        const bool pretty = cli.mode == OutputMode::Pretty;
        if (!cli.batch_dir.empty()) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& r : reports) arr.push_back(report_to_json_value(r));
            rendered = pretty ? arr.dump(2) : arr.dump();
        } else {
            rendered = report_to_json(reports.front(), pretty);
        }
    }
    write_output(cli.output, rendered);
    return 0;
}

nlohmann::json decomposition_json(const SeparableDecomposition& d, const VerifyResult& v) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : d.terms)
        terms.push_back({{"weight", t.weight},
                         {"n_a", {t.n_a.nx, t.n_a.ny, t.n_a.nz}},
                         {"n_b", {t.n_b.nx, t.n_b.ny, t.n_b.nz}}});
    return {{"terms", terms}, {"verified", v.ok}, {"max_error", v.max_error}};
}

int run_decompose(const std::string& input, const std::string& output, bool pretty) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_input(input));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("params JSON does not parse: ") + e.what(),
                         "malformed-json");
    }
    XStateParams p;
    try {
        p.alpha = doc.at("alpha").get<double>();
        p.beta = doc.at("beta").get<double>();
        p.beta_prime = doc.at("beta_prime").get<double>();
        p.gamma = doc.at("gamma").get<double>();
        p.alpha_prime = doc.at("alpha_prime").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("params JSON needs numeric alpha, beta, beta_prime, "
                                     "gamma, alpha_prime: ") +
                             e.what(),
                         "wrong-shape");
    }
    const double sum = p.alpha + p.beta + p.beta_prime + p.alpha_prime;
    if (std::abs(sum - 1.0) > 1e-9) {
        if (sum <= 0.0) throw InvalidArgument("x-state params: nonpositive diagonal sum");
        p.alpha /= sum;
        p.beta /= sum;
        p.beta_prime /= sum;
        p.gamma /= sum;
        p.alpha_prime /= sum;
    }
    const SeparableDecomposition d = separable_decomposition(p);
    const VerifyResult v = verify_decomposition(d, x_state_to_density(p), 1e-12);
    const nlohmann::json out = decomposition_json(d, v);
    write_output(output, pretty ? out.dump(2) : out.dump());
    return 0;
}

int run_tomo(const std::string& input, const std::string& output, const std::string& settings,
             bool raw, bool pretty) {
    const auto records = parse_counts_csv(read_input(input));
    const auto required = load_settings(settings);
    const Mat4 linear = linear_reconstruct(records, required);
    const Mat4 result = raw ? linear : project_to_physical(linear).matrix();
    write_output(output, matrix_to_json(result, pretty));
    return 0;
}

int run_simulate(const std::string& input, const std::string& output, const std::string& settings,
                 std::uint64_t counts, const std::optional<std::uint64_t>& seed, bool ideal) {
    const Mat4 m = parse_matrix_json(read_input(input));
    SimulationPlan plan{validate_density(m), load_settings(settings), counts,
                        resolve_seed(seed)};
    const auto records = ideal ? ideal_counts(plan) : sample_counts(plan);
    write_output(output, counts_to_csv(records));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decide whether a two-photon polarization state is entangled"};
    app.require_subcommand(1);

    AnalyzeCli acli;
    bool a_json = false, a_pretty = false;
    auto* cmd_analyze =
        app.add_subcommand("analyze", "full verdict report from a matrix or counts input");
    auto* opt_input =
        cmd_analyze->add_option("--input", acli.input, "matrix JSON or counts CSV (default stdin)");
    cmd_analyze
        ->add_option("--batch", acli.batch_dir, "analyze every .json/.csv file in a directory")
        ->excludes(opt_input);
    cmd_analyze->add_option("--output", acli.output, "output path (default stdout)");
    cmd_analyze->add_option("--noise-floor", acli.noise_floor,
                            "max x-fit residual accepted as family noise")
        ->capture_default_str();
    cmd_analyze->add_option("--boundary-tol", acli.boundary_tol,
                            "half-width of the boundary band on eigenvalues and margins")
        ->capture_default_str();
    cmd_analyze->add_option("--settings", acli.settings,
                            "required tomography settings: standard16 or a file")
        ->capture_default_str();
    auto* aj = cmd_analyze->add_flag("--json", a_json, "compact JSON report");
    cmd_analyze->add_flag("--pretty", a_pretty, "pretty JSON report")->excludes(aj);
    cmd_analyze->add_flag("--inject-inconsistency", acli.inject, "")->group("");

    std::string d_input, d_output;
    bool d_pretty = false;
    auto* cmd_decompose =
        app.add_subcommand("decompose", "separable product decomposition of x-state params");
    cmd_decompose->add_option("--input", d_input, "params JSON (default stdin)");
    cmd_decompose->add_option("--output", d_output, "output path (default stdout)");
    cmd_decompose->add_flag("--pretty", d_pretty, "pretty JSON output");

    std::string t_input, t_output, t_settings = "standard16";
    bool t_raw = false, t_pretty = false;
    auto* cmd_tomo = app.add_subcommand("tomo", "reconstruct a density matrix from counts");
    cmd_tomo->add_option("--input", t_input, "counts CSV (default stdin)");
    cmd_tomo->add_option("--output", t_output, "output path (default stdout)");
    cmd_tomo->add_option("--settings", t_settings, "required settings: standard16 or a file")
        ->capture_default_str();
    cmd_tomo->add_flag("--raw", t_raw, "emit the linear inversion without physical projection");
    cmd_tomo->add_flag("--pretty", t_pretty, "pretty JSON output");

    std::string s_input, s_output, s_settings = "standard16";
    std::uint64_t s_counts = 10000;
    std::optional<std::uint64_t> s_seed;
    bool s_ideal = false;
    auto* cmd_simulate =
        app.add_subcommand("simulate", "synthesize coincidence counts for a state");
    cmd_simulate->add_option("--input", s_input, "state matrix JSON (default stdin)");
    cmd_simulate->add_option("--output", s_output, "output path (default stdout)");
    cmd_simulate->add_option("--settings", s_settings, "settings: standard16 or a file")
        ->capture_default_str();
    cmd_simulate->add_option("--counts", s_counts, "target counts per setting")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--seed", s_seed,
                             "RNG seed (falls back to ENTANGLE_VERDICT_SEED, then 0)");
    cmd_simulate->add_flag("--ideal", s_ideal, "rounded expected counts instead of Poisson draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (cmd_analyze->parsed()) {
            acli.mode = a_pretty ? OutputMode::Pretty : (a_json ? OutputMode::Json : OutputMode::Text);
            return run_analyze(acli);
        }
        if (cmd_decompose->parsed()) return run_decompose(d_input, d_output, d_pretty);
        if (cmd_tomo->parsed()) return run_tomo(t_input, t_output, t_settings, t_raw, t_pretty);
        if (cmd_simulate->parsed())
            return run_simulate(s_input, s_output, s_settings, s_counts, s_seed, s_ideal);
        return 1;
    } catch (const InternalInconsistency& e) {
        std::cerr << "internal inconsistency: " << e.what() << "\n";
        return 2;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
}
