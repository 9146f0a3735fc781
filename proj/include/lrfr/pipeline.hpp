#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lrfr/corpus.hpp"
#include "lrfr/embedding.hpp"
#include "lrfr/error.hpp"
#include "lrfr/eval.hpp"
#include "lrfr/image.hpp"
#include "lrfr/matcher.hpp"

namespace lrfr {

/// A per-item failure (or warning) that did not abort its stage.
struct StageIssue {
    std::string image_id;
    std::string code;
    std::string message;

    friend bool operator==(const StageIssue&, const StageIssue&) = default;
};

inline constexpr const char* kIssuesHeader = "image_id,code,message";
std::string format_issues(const std::vector<StageIssue>& issues);

/// Crop/resize/match images held in memory, one per surviving record.
struct ImageSet {
    std::vector<ImageRecord> records;
    std::vector<ImageBuffer> images;
    std::vector<StageIssue> issues;
};

/// Loads pixels for a record; relative paths resolve against base_dir.
ImageBuffer load_record_image(const ImageRecord& record, const std::filesystem::path& base_dir);

/// Extends each box by crop_ratio, crops with edge padding, and resizes to
/// input_size x input_size (area when shrinking, bicubic otherwise).
/// Records without a box or whose image fails to decode are skipped with an
/// issue; probes whose gallery record was skipped are dropped with an issue
/// so the surviving set stays closed-set.
ImageSet prepare_images(const Manifest& manifest, const std::filesystem::path& base_dir,
                        double crop_ratio, int input_size, unsigned jobs = 0);

/// Resolution-matches gallery images to target (probes untouched). With no
/// target the set passes through unchanged. UpscaleAsMatch warnings are
/// appended to issues.
ImageSet match_gallery(ImageSet set, std::optional<int> target, int input_size, unsigned jobs = 0);

/// Writes images as <out>/images/<sanitized id>.png and returns the derived
/// manifest (paths relative to out, no boxes or landmarks).
Manifest write_image_set(const ImageSet& set, const std::string& name, const std::filesystem::path& out);

/// Reads back a manifest whose records point at already-prepared images.
ImageSet load_image_set(const Manifest& manifest, const std::filesystem::path& base_dir, unsigned jobs = 0);

/// File name stem used for an image id: characters outside [A-Za-z0-9._-]
/// become '_'.
std::string sanitize_id(const std::string& image_id);

struct EmbeddedSets {
    EmbeddingSet gallery;
    EmbeddingSet probes;
    std::vector<StageIssue> issues;
};

/// Embeds every record (gallery and probes kept apart). `pixels(i)` supplies
/// the image for record i and is only consulted for pixel backends.
EmbeddedSets embed_records(const std::vector<ImageRecord>& records,
                           const std::function<ImageBuffer(std::size_t)>& pixels,
                           const EmbeddingBackend& backend, unsigned jobs = 0);

EmbeddedSets embed_image_set(const ImageSet& set, const EmbeddingBackend& backend, unsigned jobs = 0);

/// Parameters of one evaluation run.
struct RunParams {
    double crop_ratio = 1.0;
    std::optional<int> target_resolution;
    int input_size = 224;
    std::vector<int> ranks{1};
};

/// prepare -> match -> embed -> identify -> evaluate in memory.
EvalReport run_single(const Manifest& manifest, const std::filesystem::path& base_dir,
                      const EmbeddingBackend& backend, const RunParams& params, unsigned jobs = 0);

/// Rank-1 IR over every (crop ratio, resolution) pair. A failing cell is
/// recorded with its error and the sweep continues.
SweepGrid sweep(const Manifest& manifest, const std::filesystem::path& base_dir,
                const EmbeddingBackend& backend, const std::vector<double>& crop_ratios,
                const std::vector<int>& resolutions, int input_size, unsigned jobs = 0);

}  // namespace lrfr
