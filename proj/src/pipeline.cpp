#include "lrfr/pipeline.hpp"

#include <map>
#include <set>
#include <unordered_set>

#include "lrfr/csv.hpp"
#include "lrfr/geometry.hpp"
#include "lrfr/parallel.hpp"

namespace lrfr {

namespace {

StageIssue issue_from(const std::string& image_id, const Error& e) {
    return {image_id, std::string(to_string(e.code())), e.what()};
}

// Drops probes whose subject lost its gallery record.
ImageSet keep_closed_set(ImageSet set) {
    std::unordered_set<std::string> enrolled;
    for (const auto& r : set.records) {
        if (r.role == Role::Gallery) enrolled.insert(r.subject_id);
    }
    ImageSet out;
    out.issues = std::move(set.issues);
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        const auto& r = set.records[i];
        if (r.role == Role::Probe && !enrolled.contains(r.subject_id)) {
            out.issues.push_back({r.image_id, "UnknownProbeSubject",
                                  "gallery image of subject '" + r.subject_id + "' is unavailable"});
            continue;
        }
        out.records.push_back(r);
        out.images.push_back(std::move(set.images[i]));
    }
    return out;
}

template <typename Fn>
ImageSet map_records(const std::vector<ImageRecord>& records, unsigned jobs, Fn&& produce) {
    std::vector<std::optional<ImageBuffer>> images(records.size());
    std::vector<std::optional<StageIssue>> issues(records.size());
    parallel_for(records.size(), resolve_jobs(jobs), [&](std::size_t i) {
        try {
            images[i] = produce(records[i]);
        } catch (const Error& e) {
            issues[i] = issue_from(records[i].image_id, e);
        }
    });
    ImageSet set;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (images[i]) {
            set.records.push_back(records[i]);
            set.images.push_back(std::move(*images[i]));
        }
        if (issues[i]) set.issues.push_back(std::move(*issues[i]));
    }
    return set;
}

EvalReport score(const Manifest& manifest, const EmbeddingSet& gallery, const EmbeddingSet& probes,
                 const std::vector<int>& ranks, unsigned jobs) {
    const GalleryIndex index(gallery);
    const auto batch = identify_all(probes, index, jobs);
    return evaluate(manifest, batch.results, ranks);
}

}  // namespace

std::string format_issues(const std::vector<StageIssue>& issues) {
    std::string out = kIssuesHeader;
    out.push_back('\n');
    for (const auto& i : issues) {
        out += csv::join({i.image_id, i.code, i.message});
        out.push_back('\n');
    }
    return out;
}

ImageBuffer load_record_image(const ImageRecord& record, const std::filesystem::path& base_dir) {
    std::filesystem::path p(record.path);
    if (p.is_relative()) p = base_dir / p;
    return read_image(p);
}

ImageSet prepare_images(const Manifest& manifest, const std::filesystem::path& base_dir,
                        double crop_ratio, int input_size, unsigned jobs) {
    if (!(crop_ratio > 0.0)) throw Error(ErrorCode::InvalidRatio, "crop ratio must be positive");
    if (input_size < 1) throw Error(ErrorCode::InvalidDims, "input size must be positive");
    ImageSet set = map_records(manifest.records(), jobs, [&](const ImageRecord& r) {
        if (!r.box) throw Error(ErrorCode::MissingBox, "record has no face box");
        const ImageBuffer source = load_record_image(r, base_dir);
        const ImageBuffer crop = crop_padded(source, extend_box(*r.box, crop_ratio));
        return resize(crop, input_size, input_size, kernel_for(crop, input_size, input_size));
    });
    return keep_closed_set(std::move(set));
}

ImageSet match_gallery(ImageSet set, std::optional<int> target, int input_size, unsigned jobs) {
    if (!target) return set;
    std::vector<std::optional<StageIssue>> warnings(set.records.size());
    std::vector<std::optional<StageIssue>> failures(set.records.size());
    parallel_for(set.records.size(), resolve_jobs(jobs), [&](std::size_t i) {
        if (set.records[i].role != Role::Gallery) return;
        try {
            MatchDiagnostics diag;
            set.images[i] = match_resolution(set.images[i], *target, input_size, &diag);
            if (diag.upscaled_as_match) {
                warnings[i] = StageIssue{set.records[i].image_id, "UpscaleAsMatch",
                                         "target " + std::to_string(*target) +
                                             " exceeds the gallery image resolution"};
            }
        } catch (const Error& e) {
            failures[i] = issue_from(set.records[i].image_id, e);
        }
    });
    ImageSet out;
    out.issues = std::move(set.issues);
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        if (warnings[i]) out.issues.push_back(std::move(*warnings[i]));
        if (failures[i]) {
            out.issues.push_back(std::move(*failures[i]));
            continue;
        }
        out.records.push_back(std::move(set.records[i]));
        out.images.push_back(std::move(set.images[i]));
    }
    return keep_closed_set(std::move(out));
}

std::string sanitize_id(const std::string& image_id) {
    std::string out = image_id;
    for (char& ch : out) {
        const bool ok = (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') ||
                        ch == '.' || ch == '_' || ch == '-';
        if (!ok) ch = '_';
    }
    return out;
}

Manifest write_image_set(const ImageSet& set, const std::string& name, const std::filesystem::path& out) {
    std::vector<ImageRecord> records;
    std::set<std::string> used;
    for (const auto& r : set.records) {
        const std::string stem = sanitize_id(r.image_id);
        if (!used.insert(stem).second) {
            throw Error(ErrorCode::InvalidArgument,
                        "image ids collide after sanitizing to '" + stem + "'");
        }
        ImageRecord d = r;
        d.path = "images/" + stem + ".png";
        d.box.reset();
        d.landmarks.reset();
        records.push_back(std::move(d));
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        write_png(set.images[i], out / records[i].path);
    }
    return Manifest(name, std::move(records));
}

ImageSet load_image_set(const Manifest& manifest, const std::filesystem::path& base_dir, unsigned jobs) {
    return keep_closed_set(map_records(manifest.records(), jobs, [&](const ImageRecord& r) {
        return load_record_image(r, base_dir);
    }));
}

EmbeddedSets embed_records(const std::vector<ImageRecord>& records,
                           const std::function<ImageBuffer(std::size_t)>& pixels,
                           const EmbeddingBackend& backend, unsigned jobs) {
    std::vector<std::optional<Eigen::VectorXf>> vectors(records.size());
    std::vector<std::optional<StageIssue>> failures(records.size());
    const bool needs_pixels = backend.needs_pixels();
    parallel_for(records.size(), resolve_jobs(jobs), [&](std::size_t i) {
        try {
            if (needs_pixels) {
                const ImageBuffer img = pixels(i);
                vectors[i] = backend.embed(records[i].image_id, &img);
            } else {
                vectors[i] = backend.embed(records[i].image_id, nullptr);
            }
        } catch (const Error& e) {
            failures[i] = issue_from(records[i].image_id, e);
        }
    });

    const auto& desc = backend.descriptor();
    EmbeddedSets out{EmbeddingSet(desc.dim, desc), EmbeddingSet(desc.dim, desc), {}};
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (failures[i]) out.issues.push_back(std::move(*failures[i]));
        if (!vectors[i]) continue;
        Embedding e{records[i].image_id, records[i].subject_id, std::move(*vectors[i])};
        (records[i].role == Role::Gallery ? out.gallery : out.probes).add(std::move(e));
    }
    return out;
}

EmbeddedSets embed_image_set(const ImageSet& set, const EmbeddingBackend& backend, unsigned jobs) {
    return embed_records(set.records, [&](std::size_t i) { return set.images[i]; }, backend, jobs);
}

EvalReport run_single(const Manifest& manifest, const std::filesystem::path& base_dir,
                      const EmbeddingBackend& backend, const RunParams& params, unsigned jobs) {
    ImageSet prepared = prepare_images(manifest, base_dir, params.crop_ratio, params.input_size, jobs);
    ImageSet matched = match_gallery(std::move(prepared), params.target_resolution, params.input_size, jobs);
    const EmbeddedSets sets = embed_image_set(matched, backend, jobs);
    return score(manifest, sets.gallery, sets.probes, params.ranks, jobs);
}

SweepGrid sweep(const Manifest& manifest, const std::filesystem::path& base_dir,
                const EmbeddingBackend& backend, const std::vector<double>& crop_ratios,
                const std::vector<int>& resolutions, int input_size, unsigned jobs) {
    if (crop_ratios.empty() || resolutions.empty()) {
        throw Error(ErrorCode::InvalidArgument, "sweep needs at least one crop ratio and one resolution");
    }
    SweepGrid grid;
    grid.crop_ratios = crop_ratios;
    grid.resolutions = resolutions;
    for (const auto& [condition, probes] : partition_by_condition(manifest)) {
        grid.conditions.push_back(condition);
    }

    auto fail_cells = [&](double ratio, int resolution, const std::string& what) {
        for (const auto& c : grid.conditions) grid.cells.push_back({ratio, resolution, c, std::nullopt, what});
    };

    for (double ratio : crop_ratios) {
        std::optional<ImageSet> prepared;
        std::optional<EmbeddedSets> probe_sets;
        std::string ratio_error;
        try {
            prepared = prepare_images(manifest, base_dir, ratio, input_size, jobs);
            ImageSet probe_only;
            for (std::size_t i = 0; i < prepared->records.size(); ++i) {
                if (prepared->records[i].role != Role::Probe) continue;
                probe_only.records.push_back(prepared->records[i]);
                probe_only.images.push_back(prepared->images[i]);
            }
            probe_sets = embed_image_set(probe_only, backend, jobs);
        } catch (const Error& e) {
            ratio_error = std::string(to_string(e.code())) + ": " + e.what();
        }

        for (int resolution : resolutions) {
            if (!ratio_error.empty()) {
                fail_cells(ratio, resolution, ratio_error);
                continue;
            }
            try {
                const std::optional<int> target =
                    resolution > 0 ? std::optional<int>(resolution) : std::nullopt;
                ImageSet gallery_only;
                for (std::size_t i = 0; i < prepared->records.size(); ++i) {
                    if (prepared->records[i].role != Role::Gallery) continue;
                    gallery_only.records.push_back(prepared->records[i]);
                    gallery_only.images.push_back(prepared->images[i]);
                }
                const ImageSet matched = match_gallery(std::move(gallery_only), target, input_size, jobs);
                const EmbeddedSets gallery_sets = embed_image_set(matched, backend, jobs);
                const EvalReport report =
                    score(manifest, gallery_sets.gallery, probe_sets->probes, {1}, jobs);
                for (const auto& c : grid.conditions) {
                    SweepCell cell{ratio, resolution, c, std::nullopt, {}};
                    const auto& cs = report.conditions.at(c);
                    if (auto it = cs.rank_k_ir.find(1); it != cs.rank_k_ir.end()) {
                        cell.rank1_ir = it->second;
                    } else {
                        cell.error = "EmptyResults: no scored probes";
                    }
                    grid.cells.push_back(std::move(cell));
                }
            } catch (const Error& e) {
                fail_cells(ratio, resolution, std::string(to_string(e.code())) + ": " + e.what());
            }
        }
    }
    return grid;
}

}  // namespace lrfr
