#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lrfr/geometry.hpp"

namespace lrfr {

enum class Role { Gallery, Probe };

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Eye centers, nose tip, mouth corners.
using Landmarks = std::array<Point2, 5>;

struct ImageRecord {
    std::string image_id;
    std::string subject_id;
    Role role = Role::Probe;
    std::string condition;
    std::string path;
    std::optional<FaceBox> box;
    std::optional<Landmarks> landmarks;

    friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

/// Validated watchlist corpus: one gallery record per subject, every probe
/// subject enrolled. Immutable once constructed.
class Manifest {
public:
    Manifest() = default;
    /// Validates and throws DuplicateImageId / DuplicateGallery /
    /// UnknownProbeSubject / ParseError (degenerate box).
    Manifest(std::string name, std::vector<ImageRecord> records);

    const std::string& name() const noexcept { return name_; }
    const std::vector<ImageRecord>& records() const noexcept { return records_; }

    std::vector<ImageRecord> gallery() const;
    std::vector<ImageRecord> probes() const;
    const ImageRecord* find(const std::string& image_id) const;
    std::set<std::string> conditions() const;

    friend bool operator==(const Manifest&, const Manifest&) = default;

private:
    std::string name_;
    std::vector<ImageRecord> records_;
};

inline constexpr const char* kManifestHeader =
    "image_id,subject_id,role,condition,path,box_x,box_y,box_w,box_h,"
    "lm1x,lm1y,lm2x,lm2y,lm3x,lm3y,lm4x,lm4y,lm5x,lm5y";

/// Reads the manifest CSV. `#` comment lines before the header are skipped.
/// The manifest name is the file stem.
Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const std::string& text, std::string name);

/// Writes the manifest CSV. Numbers use the shortest round-trip form so
/// load_manifest(write_manifest(m)) == m.
void write_manifest(const Manifest& m, const std::filesystem::path& path);
std::string format_manifest(const Manifest& m);

/// Probe records grouped by condition tag, in manifest order within each group.
std::map<std::string, std::vector<ImageRecord>> partition_by_condition(const Manifest& m);

/// Sorted, de-duplicated subject ids across all records.
std::vector<std::string> subject_ids(const Manifest& m);

std::string_view to_string(Role role);

}  // namespace lrfr
