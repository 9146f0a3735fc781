#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "lrfr/corpus.hpp"
#include "lrfr/csv.hpp"
#include "lrfr/embedding.hpp"
#include "lrfr/error.hpp"
#include "lrfr/eval.hpp"
#include "lrfr/matcher.hpp"
#include "lrfr/pipeline.hpp"
#include "lrfr/report.hpp"

namespace fs = std::filesystem;

namespace lrfr::cli {

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    f << text;
    if (!f) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path base_dir_of(const std::string& manifest) {
    const fs::path p(manifest);
    return p.has_parent_path() ? p.parent_path() : fs::path(".");
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + csv::format_double(v[i]);
    return out;
}

void report_issues(const std::vector<StageIssue>& issues, std::ostream& err) {
    if (!issues.empty()) err << "warning,ItemIssues," << issues.size() << " item(s) reported\n";
}

// Reads `key = value` lines and turns each key the user did not pass on the
// command line into `--key value`.
std::vector<std::string> config_args(const fs::path& path, const std::vector<std::string>& given) {
    std::vector<std::string> out;
    std::istringstream in(read_text(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ParseError,
                        "config line " + std::to_string(line_no) + " is not key=value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        const std::string flag = "--" + key;
        const bool overridden = std::any_of(given.begin(), given.end(), [&](const std::string& a) {
            return a == flag || a.starts_with(flag + "=");
        });
        if (!overridden) {
            out.push_back(flag);
            out.push_back(value);
        }
    }
    return out;
}

Provenance provenance(std::string subcommand, const ExperimentConfig& cfg,
                      std::vector<std::pair<std::string, std::string>> extra = {}) {
    Provenance p;
    p.seed = cfg.seed;
    p.config.emplace_back("subcommand", std::move(subcommand));
    if (!cfg.manifest.empty()) p.config.emplace_back("manifest", cfg.manifest);
    for (auto& kv : extra) p.config.push_back(std::move(kv));
    p.config.emplace_back("out", cfg.out);
    return p;
}

struct Options {
    ExperimentConfig cfg;
    unsigned jobs = 0;
    std::string model;
    std::string gallery;
    std::string probes;
    std::string results;
    std::string results_dir;
    std::string errors;
    std::string cmc_out;
    std::size_t subset = 80;
    std::size_t repeats = 10;
    std::vector<double> crop_ratios{1.0, 1.1, 1.2, 1.3, 1.35, 1.40};
    std::vector<int> resolutions{24, 32, 40, 48, 64};
    int target = 0;
};

int cmd_prepare(const Options& o, std::ostream& out, std::ostream& err) {
    const auto& cfg = o.cfg;
    const Manifest manifest = load_manifest(cfg.manifest);
    const ImageSet set =
        prepare_images(manifest, base_dir_of(cfg.manifest), cfg.crop_ratio, cfg.input_size, o.jobs);
    const fs::path dir(cfg.out);
    const Manifest derived = write_image_set(set, manifest.name(), dir);
    write_manifest(derived, dir / "manifest.csv");
    write_text(dir / "prepare_errors.csv", format_issues(set.issues));
    report_issues(set.issues, err);
    out << "prepared " << derived.records().size() << " images into " << dir.string() << "\n";
    return 0;
}

int cmd_matchres(const Options& o, std::ostream& out, std::ostream& err) {
    const auto& cfg = o.cfg;
    const Manifest manifest = load_manifest(cfg.manifest);
    ImageSet set = load_image_set(manifest, base_dir_of(cfg.manifest), o.jobs);
    set = match_gallery(std::move(set), cfg.target_resolution, cfg.input_size, o.jobs);
    const fs::path dir(cfg.out);
    const Manifest derived = write_image_set(set, manifest.name(), dir);
    write_manifest(derived, dir / "manifest.csv");
    write_text(dir / "matchres_errors.csv", format_issues(set.issues));
    report_issues(set.issues, err);
    out << "matched " << derived.records().size() << " images into " << dir.string() << "\n";
    return 0;
}

int cmd_embed(const Options& o, std::ostream& out, std::ostream& err) {
    const auto& cfg = o.cfg;
    const Manifest manifest = load_manifest(cfg.manifest);
    const fs::path base = base_dir_of(cfg.manifest);
    const BackendPtr backend = resolve_backend(cfg.backend);
    const auto& records = manifest.records();
    EmbeddedSets sets = embed_records(
        records, [&](std::size_t i) { return load_record_image(records[i], base); }, *backend, o.jobs);

    if (!o.model.empty()) {
        const auto model = find_model(o.model);
        if (!model) throw Error(ErrorCode::UnknownBackend, "unknown model '" + o.model + "'");
        if (model->dim != backend->descriptor().dim) {
            throw Error(ErrorCode::DimMismatch, o.model + " produces dim " + std::to_string(model->dim) +
                                                    " but the backend serves dim " +
                                                    std::to_string(backend->descriptor().dim));
        }
        sets.gallery.set_backend(*model);
        sets.probes.set_backend(*model);
    }
    const fs::path dir(cfg.out);
    write_embeddings(sets.gallery, dir / "gallery.emb");
    write_embeddings(sets.probes, dir / "probes.emb");
    write_text(dir / "embed_errors.csv", format_issues(sets.issues));
    report_issues(sets.issues, err);
    out << "embedded " << sets.gallery.size() << " gallery and " << sets.probes.size()
        << " probe images (dim " << sets.gallery.dim() << ")\n";
    return 0;
}

int cmd_identify(const Options& o, std::ostream& out, std::ostream& err) {
    const EmbeddingSet gallery = read_embeddings(o.gallery);
    const EmbeddingSet probes = read_embeddings(o.probes);
    const GalleryIndex index = build_gallery(gallery);
    const IdentificationBatch batch = identify_all(probes, index, o.jobs);

    const fs::path results_path(o.cfg.out);
    write_text(results_path, format_results(batch.results));
    std::vector<StageIssue> issues;
    for (const auto& e : batch.errors) issues.push_back({e.probe_image_id, std::string(to_string(e.code)), e.message});
    const fs::path errors_path = o.errors.empty()
                                     ? results_path.parent_path() / "identify_errors.csv"
                                     : fs::path(o.errors);
    write_text(errors_path, format_issues(issues));
    report_issues(issues, err);
    out << "identified " << batch.results.size() << " probes against " << index.size() << " subjects\n";
    return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream&) {
    const auto& cfg = o.cfg;
    std::vector<int> ranks = cfg.ranks;
    if (ranks.empty() || !std::is_sorted(ranks.begin(), ranks.end()) || ranks.front() < 1) {
        throw Error(ErrorCode::InvalidArgument, "--ranks must be positive and ascending");
    }
    const Manifest manifest = load_manifest(cfg.manifest);
    const auto results = parse_results(read_text(o.results));
    const EvalReport report = evaluate(manifest, results, ranks);
    const Provenance prov = provenance("evaluate", cfg, {{"results", o.results}, {"ranks", join_ints(ranks)}});
    write_text(cfg.out, format_eval_csv(report, prov));

    if (!o.cmc_out.empty()) {
        std::map<std::string, std::vector<IdentificationResult>> grouped;
        std::map<std::string, std::string> condition_of;
        for (const auto& r : manifest.probes()) condition_of[r.image_id] = r.condition;
        for (const auto& r : results) grouped[condition_of.at(r.probe_image_id)].push_back(r);
        std::map<std::string, std::vector<CmcPoint>> curves;
        for (const auto& [condition, rs] : grouped) curves[condition] = cmc(rs);
        if (!results.empty()) curves["all"] = cmc(results);
        write_text(o.cmc_out, format_cmc_csv(curves, prov));
    }
    for (const auto& [condition, s] : report.conditions) {
        if (auto it = s.rank_k_ir.find(ranks.front()); it != s.rank_k_ir.end()) {
            out << condition << " rank-" << ranks.front() << " " << format_percent(it->second) << "%\n";
        }
    }
    return 0;
}

int cmd_rrssv(const Options& o, std::ostream& out, std::ostream&) {
    ExperimentConfig cfg = o.cfg;
    const fs::path dir = o.results_dir.empty() ? fs::path(".") : fs::path(o.results_dir);
    if (cfg.manifest.empty()) cfg.manifest = (dir / "manifest.csv").string();
    const std::string results_path = o.results.empty() ? (dir / "results.csv").string() : o.results;
    if (cfg.out.empty()) cfg.out = (dir / "rrssv.csv").string();

    const Manifest manifest = load_manifest(cfg.manifest);
    const auto results = parse_results(read_text(results_path));
    const RrssvReport report = rrssv(manifest, results, o.subset, o.repeats, cfg.seed);
    const Provenance prov = provenance("rrssv", cfg,
                                       {{"results", results_path},
                                        {"subset", std::to_string(o.subset)},
                                        {"repeats", std::to_string(o.repeats)}});
    write_text(cfg.out, format_rrssv_csv(report, prov));
    for (const auto& [condition, c] : report.conditions) {
        out << condition << " " << format_percent(c.mean) << " +/- " << format_percent(c.stddev) << "\n";
    }
    return 0;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream&) {
    const auto& cfg = o.cfg;
    const Manifest manifest = load_manifest(cfg.manifest);
    const BackendPtr backend = resolve_backend(cfg.backend);
    if (!backend->needs_pixels()) {
        throw Error(ErrorCode::InvalidArgument,
                    "sweep needs an image backend; precomputed embeddings cannot follow crop changes");
    }
    const SweepGrid grid = sweep(manifest, base_dir_of(cfg.manifest), *backend, o.crop_ratios,
                                 o.resolutions, cfg.input_size, o.jobs);
    const Provenance prov = provenance("sweep", cfg,
                                       {{"backend", cfg.backend},
                                        {"crop-ratios", join_doubles(o.crop_ratios)},
                                        {"resolutions", join_ints(o.resolutions)},
                                        {"input-size", std::to_string(cfg.input_size)}});
    write_text(cfg.out, format_sweep_csv(grid, prov));
    const auto failed = std::count_if(grid.cells.begin(), grid.cells.end(),
                                      [](const SweepCell& c) { return !c.rank1_ir; });
    out << "sweep wrote " << grid.cells.size() << " cells (" << failed << " failed)\n";
    return 0;
}

}  // namespace

int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Low-resolution watchlist face identification toolkit", "lrfr"};
    app.require_subcommand(1);
    Options o;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--jobs", o.jobs, "Worker threads (default: LRFR_JOBS or all cores)");
        sub->add_option("--config", config_path, "key=value file mirroring flag names; flags win");
    };

    auto* prepare = app.add_subcommand("prepare", "Extend boxes, crop and resize to the model input size");
    prepare->add_option("--manifest", o.cfg.manifest, "Manifest CSV")->required();
    prepare->add_option("--crop-ratio", o.cfg.crop_ratio, "Box extension ratio")->check(CLI::PositiveNumber);
    prepare->add_option("--input-size", o.cfg.input_size, "Model input size in pixels")->check(CLI::PositiveNumber);
    prepare->add_option("--out", o.cfg.out, "Output directory")->required();
    add_common(prepare);

    auto* matchres = app.add_subcommand("matchres", "Resolution-match gallery images of a prepared set");
    matchres->add_option("--manifest", o.cfg.manifest, "Prepared manifest CSV")->required();
    matchres->add_option("--target", o.target, "Gallery bottleneck resolution (omit for pass-through)")
        ->check(CLI::PositiveNumber);
    matchres->add_option("--input-size", o.cfg.input_size, "Model input size in pixels")->check(CLI::PositiveNumber);
    matchres->add_option("--out", o.cfg.out, "Output directory")->required();
    add_common(matchres);

    auto* embed = app.add_subcommand("embed", "Embed gallery and probe images");
    embed->add_option("--manifest", o.cfg.manifest, "Manifest CSV")->required();
    embed->add_option("--backend", o.cfg.backend, "reference | file:<path>");
    embed->add_option("--model", o.model, "Catalog model the vectors came from (model-a .. model-h)");
    embed->add_option("--out", o.cfg.out, "Output directory")->required();
    add_common(embed);

    auto* identify = app.add_subcommand("identify", "Rank every gallery subject for each probe");
    identify->add_option("--gallery", o.gallery, "Gallery embedding file")->required();
    identify->add_option("--probes", o.probes, "Probe embedding file")->required();
    identify->add_option("--out", o.cfg.out, "Results CSV")->required();
    identify->add_option("--errors", o.errors, "Per-probe error CSV (default: identify_errors.csv next to --out)");
    add_common(identify);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Rank-k identification rates per condition");
    evaluate_cmd->add_option("--manifest", o.cfg.manifest, "Manifest CSV with probe conditions")->required();
    evaluate_cmd->add_option("--results", o.results, "Results CSV")->required();
    evaluate_cmd->add_option("--ranks", o.cfg.ranks, "Ranks to report")->delimiter(',');
    evaluate_cmd->add_option("--out", o.cfg.out, "Report CSV")->required();
    evaluate_cmd->add_option("--cmc", o.cmc_out, "Also write full CMC curves here");
    add_common(evaluate_cmd);

    auto* rrssv_cmd = app.add_subcommand("rrssv", "Repeated random sub-sampling of subjects");
    rrssv_cmd->add_option("--results-dir", o.results_dir, "Directory holding manifest.csv and results.csv");
    rrssv_cmd->add_option("--manifest", o.cfg.manifest, "Manifest CSV (overrides --results-dir)");
    rrssv_cmd->add_option("--results", o.results, "Results CSV (overrides --results-dir)");
    rrssv_cmd->add_option("--subset", o.subset, "Subjects per repeat");
    rrssv_cmd->add_option("--repeats", o.repeats, "Number of repeats");
    rrssv_cmd->add_option("--seed", o.cfg.seed, "Generator seed");
    rrssv_cmd->add_option("--out", o.cfg.out, "Report CSV (default: <results-dir>/rrssv.csv)");
    add_common(rrssv_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "Rank-1 IR over crop ratios x gallery resolutions");
    sweep_cmd->add_option("--manifest", o.cfg.manifest, "Manifest CSV")->required();
    sweep_cmd->add_option("--backend", o.cfg.backend, "Image embedding backend");
    sweep_cmd->add_option("--crop-ratios", o.crop_ratios, "Crop ratios")->delimiter(',');
    sweep_cmd->add_option("--resolutions", o.resolutions, "Gallery resolutions (0 = unmatched)")->delimiter(',');
    sweep_cmd->add_option("--input-size", o.cfg.input_size, "Model input size in pixels")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", o.cfg.out, "Sweep CSV")->required();
    add_common(sweep_cmd);

    try {
        std::vector<std::string> argv = args;
        // Config values go first so explicit flags parsed later take precedence.
        if (auto it = std::find(argv.begin(), argv.end(), "--config"); it != argv.end() && it + 1 != argv.end()) {
            auto extra = config_args(*(it + 1), argv);
            const auto at = std::find_if(argv.begin(), argv.end(),
                                         [](const std::string& a) { return !a.starts_with("-"); });
            if (at != argv.end()) argv.insert(at + 1, extra.begin(), extra.end());
        }
        std::reverse(argv.begin(), argv.end());
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error,Usage," << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error," << to_string(e.code()) << "," << e.what() << "\n";
        return 2;
    }

    if (matchres->parsed() && o.target > 0) o.cfg.target_resolution = o.target;
    if (o.cfg.crop_ratio <= 0.0) {
        err << "error,InvalidRatio,crop ratio must be positive\n";
        return 2;
    }

    try {
        if (prepare->parsed()) return cmd_prepare(o, out, err);
        if (matchres->parsed()) return cmd_matchres(o, out, err);
        if (embed->parsed()) return cmd_embed(o, out, err);
        if (identify->parsed()) return cmd_identify(o, out, err);
        if (evaluate_cmd->parsed()) return cmd_evaluate(o, out, err);
        if (rrssv_cmd->parsed()) return cmd_rrssv(o, out, err);
        if (sweep_cmd->parsed()) return cmd_sweep(o, out, err);
    } catch (const Error& e) {
        err << "error," << to_string(e.code()) << "," << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error,Internal," << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace lrfr::cli
