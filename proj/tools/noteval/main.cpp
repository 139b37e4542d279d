/// @file main.cpp
/// @brief Batch CLI: dataset curation (dedup, split, preprocess, augment) and
///        damage analysis (analyze, batch) over the core library.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <noteval/augment.hpp>
#include <noteval/damage.hpp>
#include <noteval/dataprep.hpp>
#include <noteval/io.hpp>
#include <noteval/version.hpp>

#include "config.hpp"
#include "report.hpp"

namespace fs = std::filesystem;
using namespace noteval;
using namespace noteval::cli;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;     // bad arguments, unreadable input, empty corpus
constexpr int kExitAnalysis = 3;  // registration or stage failure

double ms_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write: " + path);
    out << text;
    if (!out) throw Error("short write: " + path);
}

// ---------------------------------------------------------------------------
// dedup
// ---------------------------------------------------------------------------

int cmd_dedup(const RunConfig& cfg, const std::vector<std::string>& dirs,
              const std::string& out_path) {
    struct Scanned {
        ClassedFile file;
        std::size_t source;
        std::uint64_t hash = 0;
        bool readable = false;
        std::string reason;
    };

    std::vector<Scanned> all;
    std::vector<std::vector<DedupItem>> sources(dirs.size());
    for (std::size_t s = 0; s < dirs.size(); ++s) {
        for (ClassedFile& f : scan_class_tree(dirs[s])) {
            Scanned item{std::move(f), s, 0, false, {}};
            try {
                item.hash = phash64(load_image(item.file.path));
                item.readable = true;
            } catch (const std::exception& e) {
                item.reason = e.what();
            }
            if (item.readable)
                sources[s].push_back({item.file.path, item.file.label, item.hash});
            all.push_back(std::move(item));
        }
    }
    if (all.empty()) {
        std::cerr << "no images found\n";
        return kExitUsage;
    }

    // Per-source greedy pass, then the cross-source pass in argument order.
    std::vector<std::vector<DedupItem>> deduped;
    for (auto& src : sources) deduped.push_back(deduplicate(std::move(src), cfg.dedup).retained);
    const DedupResult result = cross_dataset_dedup(deduped, cfg.dedup);

    std::map<std::string, std::string> duplicate_of;  // path -> kept path
    for (const auto& [item, kept] : result.duplicates) duplicate_of[item.id] = kept;
    // The per-source passes already dropped some items; recover their keepers
    // by probing the final index.
    std::map<std::string, std::pair<int, int>> per_class;  // class -> {retained, dropped}

    Json images = Json::array();
    int retained = 0, dropped = 0, skipped = 0;
    for (const Scanned& s : all) {
        Json entry{{"path", s.file.path}, {"class", s.file.label}};
        if (!s.readable) {
            entry["status"] = "skipped";
            entry["reason"] = s.reason;
            ++skipped;
        } else {
            entry["hash"] = [&] {
                char buf[17];
                std::snprintf(buf, sizeof buf, "%016llx",
                              static_cast<unsigned long long>(s.hash));
                return std::string(buf);
            }();
            const auto dup = duplicate_of.find(s.file.path);
            bool is_retained = dup == duplicate_of.end();
            std::string kept;
            if (!is_retained) {
                kept = dup->second;
            } else {
                // Dropped in the per-source pass: retained only if the final
                // index holds this exact path.
                is_retained = false;
                for (const DedupItem& r : result.retained)
                    if (r.id == s.file.path) {
                        is_retained = true;
                        break;
                    }
                if (!is_retained) {
                    const auto similar =
                        result.index.find_similar(s.file.label, s.hash, cfg.dedup.threshold);
                    kept = similar.value_or("");
                }
            }
            if (is_retained) {
                entry["status"] = "retained";
                ++retained;
                ++per_class[s.file.label].first;
            } else {
                entry["status"] = "duplicate-of";
                entry["duplicate_of"] = kept;
                ++dropped;
                ++per_class[s.file.label].second;
            }
        }
        images.push_back(std::move(entry));
    }

    Json manifest{{"schema_version", kManifestSchemaVersion},
                  {"tool_version", kVersion},
                  {"kind", "dedup"},
                  {"threshold", cfg.dedup.threshold},
                  {"sources", dirs},
                  {"images", images}};
    write_text(out_path, manifest.dump(2) + "\n");

    for (const auto& [cls, counts] : per_class)
        std::cout << "class " << cls << ": retained " << counts.first << ", dropped "
                  << counts.second << "\n";
    std::cout << "total: retained " << retained << ", dropped " << dropped << ", skipped "
              << skipped << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

int cmd_split(const RunConfig& cfg, const std::string& input, const std::string& out_path) {
    // Input is either a dedup manifest (split assigned to retained images) or
    // a class tree (every image participates).
    Json manifest;
    std::vector<std::pair<std::string, std::string>> items;  // id, class

    if (fs::is_directory(input)) {
        Json images = Json::array();
        for (const ClassedFile& f : scan_class_tree(input)) {
            std::uint64_t h = 0;
            try {
                h = phash64(load_image(f.path));
            } catch (const std::exception& e) {
                images.push_back(
                    Json{{"path", f.path}, {"class", f.label}, {"status", "skipped"},
                         {"reason", e.what()}});
                continue;
            }
            char buf[17];
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
            images.push_back(Json{{"path", f.path},
                                  {"class", f.label},
                                  {"hash", std::string(buf)},
                                  {"status", "retained"}});
            items.emplace_back(f.path, f.label);
        }
        manifest = Json{{"schema_version", kManifestSchemaVersion},
                        {"tool_version", kVersion},
                        {"kind", "split"},
                        {"images", images}};
    } else {
        std::ifstream in(input);
        if (!in) {
            std::cerr << "cannot open: " << input << "\n";
            return kExitUsage;
        }
        try {
            manifest = Json::parse(in);
        } catch (const std::exception& e) {
            std::cerr << "malformed manifest: " << e.what() << "\n";
            return kExitUsage;
        }
        if (!manifest.contains("images") || !manifest["images"].is_array()) {
            std::cerr << "manifest has no images array\n";
            return kExitUsage;
        }
        for (const Json& entry : manifest["images"])
            if (entry.value("status", "") == "retained")
                items.emplace_back(entry["path"].get<std::string>(),
                                   entry["class"].get<std::string>());
    }

    if (items.empty()) {
        std::cerr << "no images to split\n";
        return kExitUsage;
    }

    const SplitManifest split = stratified_split(items, cfg.split, cfg.seed);
    for (const std::string& w : split.warnings) std::cerr << "warning: " << w << "\n";

    int counts[3] = {0, 0, 0};
    for (Json& entry : manifest["images"]) {
        if (entry.value("status", "") != "retained") continue;
        const Split s = split.assignments.at(entry["path"].get<std::string>());
        entry["split"] = split_name(s);
        ++counts[static_cast<int>(s)];
    }
    manifest["split"] = Json{{"seed", cfg.seed},
                             {"ratios", {cfg.split.train, cfg.split.val, cfg.split.test}},
                             {"warnings", split.warnings}};
    write_text(out_path, manifest.dump(2) + "\n");

    std::cout << "train " << counts[0] << ", val " << counts[1] << ", test " << counts[2] << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// preprocess
// ---------------------------------------------------------------------------

int cmd_preprocess(const RunConfig& cfg, const std::string& input, const std::string& output) {
    if (fs::is_directory(input)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(input))
            if (entry.is_regular_file()) {
                const std::string ext = entry.path().extension().string();
                if (ext == ".png" || ext == ".jpg" || ext == ".jpeg")
                    files.push_back(entry.path());
            }
        if (files.empty()) {
            std::cerr << "no images found\n";
            return kExitUsage;
        }
        std::sort(files.begin(), files.end());
        for (const fs::path& p : files) {
            const fs::path rel = fs::relative(p, input);
            const fs::path dst = fs::path(output) / rel;
            fs::create_directories(dst.parent_path());
            save_image(enhance_pipeline(load_image(p.string()), cfg.analyze.enhance),
                       dst.string());
        }
        std::cout << "processed " << files.size() << " files\n";
        return kExitOk;
    }

    RasterImage img;
    try {
        img = load_image(input);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    save_image(enhance_pipeline(img, cfg.analyze.enhance), output);
    std::cout << "processed 1 file\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// augment
// ---------------------------------------------------------------------------

int cmd_augment(const RunConfig& cfg, const std::string& input, const std::string& output,
                int count) {
    RasterImage img;
    try {
        img = load_image(input);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    AugmentConfig acfg = cfg.augment;
    acfg.seed = cfg.seed;
    Rng rng(acfg.seed);
    if (count == 1) {
        save_image(augment(img, acfg, rng), output);
    } else {
        const fs::path base(output);
        const std::string stem = base.stem().string();
        const std::string ext = base.extension().string().empty() ? ".png"
                                                                  : base.extension().string();
        for (int i = 0; i < count; ++i) {
            char suffix[16];
            std::snprintf(suffix, sizeof suffix, "_%03d", i);
            const fs::path out = base.parent_path() / (stem + suffix + ext);
            save_image(augment(img, acfg, rng), out.string());
        }
    }
    std::cout << "wrote " << count << " file" << (count == 1 ? "" : "s") << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

int cmd_analyze(const RunConfig& cfg, const std::string& ref_path, const std::string& input_path,
                const std::string& out_path, const std::string& overlay_dir) {
    RasterImage ref, damaged;
    try {
        ref = load_image(ref_path);
        damaged = load_image(input_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    std::map<std::string, double> timings;
    const auto t0 = std::chrono::steady_clock::now();
    DamageReport rep;
    try {
        rep = analyze(ref, damaged, cfg.analyze);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitAnalysis;
    }
    timings["total"] = ms_since(t0);

    write_text(out_path, report_document(rep, ref_path, input_path, timings, cfg).dump(2) + "\n");

    if (!overlay_dir.empty() && rep.status == "ok") {
        fs::create_directories(overlay_dir);
        const fs::path dir(overlay_dir);
        save_png(render_damage_overlay(rep.ref_masked, rep.damage_mask),
                 (dir / "damage.png").string());
        save_png(render_heatmap(rep.heatmap), (dir / "heatmap.png").string());
        save_png(render_cluster_overlay(rep.ref_masked, rep.matches),
                 (dir / "clusters.png").string());
    }

    if (rep.status != "ok") {
        std::cerr << "alignment failed: " << rep.status << "\n";
        return kExitAnalysis;
    }
    std::printf("%.4f\n", rep.ucdi);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// batch
// ---------------------------------------------------------------------------

int cmd_batch(const RunConfig& cfg, const std::string& input, const std::string& map_path,
              const std::string& out_path, int workers) {
    const std::map<std::string, std::string> templates = load_template_map(map_path);

    // Items come from a class tree or from a manifest's retained entries.
    std::vector<ClassedFile> items;
    if (fs::is_directory(input)) {
        items = scan_class_tree(input);
    } else {
        std::ifstream in(input);
        if (!in) {
            std::cerr << "cannot open: " << input << "\n";
            return kExitUsage;
        }
        Json manifest;
        try {
            manifest = Json::parse(in);
        } catch (const std::exception& e) {
            std::cerr << "malformed manifest: " << e.what() << "\n";
            return kExitUsage;
        }
        for (const Json& entry : manifest.value("images", Json::array()))
            if (entry.value("status", "") == "retained")
                items.push_back(
                    {entry["path"].get<std::string>(), entry["class"].get<std::string>()});
        std::sort(items.begin(), items.end(),
                  [](const ClassedFile& a, const ClassedFile& b) { return a.path < b.path; });
    }
    if (items.empty()) {
        std::cerr << "no inputs\n";
        return kExitUsage;
    }

    // References load once up front; a missing template is a usage error.
    std::map<std::string, RasterImage> refs;
    for (const ClassedFile& f : items) {
        if (refs.count(f.label)) continue;
        const auto it = templates.find(f.label);
        if (it == templates.end()) {
            std::cerr << "no template for class '" << f.label << "'\n";
            return kExitUsage;
        }
        try {
            refs[f.label] = load_image(it->second);
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return kExitUsage;
        }
    }

    // Independent items over a thread pool; lines land in the slot matching
    // their (sorted) input position, so output order never depends on timing.
    std::vector<std::string> lines(items.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1)) {
            const ClassedFile& f = items[i];
            Json line;
            try {
                const RasterImage damaged = load_image(f.path);
                const DamageReport rep = analyze(refs.at(f.label), damaged, cfg.analyze);
                line = batch_line(f.path, f.label, rep);
            } catch (const std::exception& e) {
                line = Json{{"path", f.path},
                            {"class", f.label},
                            {"status", "error"},
                            {"error", e.what()}};
            }
            lines[i] = line.dump();
        }
    };
    const int n_workers = std::max(1, workers);
    std::vector<std::thread> pool;
    for (int t = 1; t < n_workers; ++t) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();

    std::string ndjson;
    for (const std::string& l : lines) {
        ndjson += l;
        ndjson += '\n';
    }

    int ok = 0, unalignable = 0, errors = 0;
    double sum = 0.0, lo = 1.0, hi = 0.0;
    for (const std::string& l : lines) {
        const Json j = Json::parse(l);
        const std::string status = j["status"];
        if (status == "ok") {
            ++ok;
            const double u = j["ucdi"]["score"];
            sum += u;
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        } else if (status == "unalignable") {
            ++unalignable;
        } else {
            ++errors;
        }
    }

    std::ostream* sink = &std::cout;
    std::ostream* summary = &std::cerr;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) {
            std::cerr << "cannot write: " << out_path << "\n";
            return kExitUsage;
        }
        sink = &file;
        summary = &std::cout;
    }
    *sink << ndjson;
    sink->flush();

    *summary << "items " << items.size() << ", ok " << ok << ", unalignable " << unalignable
             << ", error " << errors << "\n";
    if (ok > 0) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "ucdi mean %.4f, min %.4f, max %.4f", sum / ok, lo, hi);
        *summary << buf << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"banknote damage scoring and dataset curation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "INI config file (NOTEVAL_CONFIG as fallback)");

    RunConfig cfg;
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "seed for all randomized stages");

    // dedup
    auto* dedup = app.add_subcommand("dedup", "perceptual-hash duplicate removal per class");
    dedup->fallthrough();
    std::vector<std::string> dedup_dirs;
    std::string dedup_out = "manifest.json";
    int threshold_flag = 0;
    dedup->add_option("dirs", dedup_dirs, "class-per-subdirectory roots, precedence order")
        ->required()
        ->expected(-1);
    auto* thr_opt = dedup->add_option("--threshold", threshold_flag, "Hamming distance bound");
    dedup->add_option("--out", dedup_out, "manifest path");

    // split
    auto* split = app.add_subcommand("split", "stratified train/val/test assignment");
    split->fallthrough();
    std::string split_input, split_out = "split.json", ratios_text;
    split->add_option("input", split_input, "dedup manifest or class tree")->required();
    auto* ratios_opt = split->add_option("--ratios", ratios_text, "train,val,test");
    split->add_option("--out", split_out, "output manifest path");

    // preprocess
    auto* pre = app.add_subcommand("preprocess", "enhancement pipeline over files or a tree");
    pre->fallthrough();
    std::string pre_in, pre_out;
    pre->add_option("input", pre_in, "image or directory")->required();
    pre->add_option("output", pre_out, "output image or directory")->required();

    // augment
    auto* aug = app.add_subcommand("augment", "stochastic training-time transforms");
    aug->fallthrough();
    std::string aug_in, aug_out;
    int aug_count = 1;
    aug->add_option("input", aug_in, "source image")->required();
    aug->add_option("output", aug_out, "output path (indexed when --count > 1)")->required();
    aug->add_option("--count", aug_count, "variants to generate")->check(CLI::PositiveNumber);

    // analyze
    auto* ana = app.add_subcommand("analyze", "score one image against its reference");
    ana->fallthrough();
    std::string ana_ref, ana_input, ana_out = "report.json", ana_overlays;
    ana->add_option("reference", ana_ref, "clean template image")->required();
    ana->add_option("input", ana_input, "damaged image")->required();
    ana->add_option("--out", ana_out, "report path");
    ana->add_option("--overlays", ana_overlays, "directory for overlay PNGs");

    // batch
    auto* bat = app.add_subcommand("batch", "analyze a corpus, one NDJSON line per image");
    bat->fallthrough();
    std::string bat_input, bat_templates, bat_out;
    int bat_workers = 1;
    bat->add_option("input", bat_input, "class tree or manifest")->required();
    bat->add_option("--templates", bat_templates, "class = reference-path map file")->required();
    bat->add_option("--out", bat_out, "NDJSON path (stdout when omitted)");
    bat->add_option("--workers", bat_workers, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (config_path.empty())
            if (const char* env = std::getenv("NOTEVAL_CONFIG")) config_path = env;
        if (!config_path.empty()) apply_config_file(cfg, config_path);

        // Flags win over the config file.
        if (*seed_opt) cfg.seed = seed_flag;
        if (*thr_opt) cfg.dedup.threshold = threshold_flag;
        if (*ratios_opt) cfg.split = parse_ratios(ratios_text);
        cfg.validate();

        if (dedup->parsed()) return cmd_dedup(cfg, dedup_dirs, dedup_out);
        if (split->parsed()) return cmd_split(cfg, split_input, split_out);
        if (pre->parsed()) return cmd_preprocess(cfg, pre_in, pre_out);
        if (aug->parsed()) return cmd_augment(cfg, aug_in, aug_out, aug_count);
        if (ana->parsed()) return cmd_analyze(cfg, ana_ref, ana_input, ana_out, ana_overlays);
        if (bat->parsed()) return cmd_batch(cfg, bat_input, bat_templates, bat_out, bat_workers);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
