#include "lrfr/corpus.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "file_util.hpp"
#include "lrfr/csv.hpp"
#include "lrfr/error.hpp"

namespace lrfr {

namespace {

constexpr std::size_t kColumns = 19;

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

double number(const std::string& field, std::size_t line_no, const char* column) {
    double v = 0.0;
    if (!csv::parse_double(field, v)) {
        parse_fail(line_no, std::string("bad number in ") + column + ": '" + field + "'");
    }
    return v;
}

bool all_empty(const std::vector<std::string>& f, std::size_t first, std::size_t count) {
    return std::all_of(f.begin() + first, f.begin() + first + count,
                       [](const std::string& s) { return s.empty(); });
}

bool none_empty(const std::vector<std::string>& f, std::size_t first, std::size_t count) {
    return std::none_of(f.begin() + first, f.begin() + first + count,
                        [](const std::string& s) { return s.empty(); });
}

ImageRecord parse_row(const std::vector<std::string>& f, std::size_t line_no) {
    if (f.size() != kColumns) {
        parse_fail(line_no, "expected 19 columns, got " + std::to_string(f.size()));
    }
    ImageRecord r;
    r.image_id = f[0];
    r.subject_id = f[1];
    if (r.image_id.empty()) parse_fail(line_no, "empty image_id");
    if (r.subject_id.empty()) parse_fail(line_no, "empty subject_id");
    if (f[2] == "gallery") {
        r.role = Role::Gallery;
    } else if (f[2] == "probe") {
        r.role = Role::Probe;
    } else {
        parse_fail(line_no, "role must be gallery or probe, got '" + f[2] + "'");
    }
    r.condition = f[3];
    r.path = f[4];

    if (none_empty(f, 5, 4)) {
        r.box = FaceBox{number(f[5], line_no, "box_x"), number(f[6], line_no, "box_y"),
                        number(f[7], line_no, "box_w"), number(f[8], line_no, "box_h")};
    } else if (!all_empty(f, 5, 4)) {
        parse_fail(line_no, "box columns must be all present or all empty");
    }

    if (none_empty(f, 9, 10)) {
        Landmarks lm;
        static constexpr const char* names[] = {"lm1x", "lm1y", "lm2x", "lm2y", "lm3x",
                                                "lm3y", "lm4x", "lm4y", "lm5x", "lm5y"};
        for (std::size_t i = 0; i < 5; ++i) {
            lm[i] = {number(f[9 + 2 * i], line_no, names[2 * i]),
                     number(f[10 + 2 * i], line_no, names[2 * i + 1])};
        }
        r.landmarks = lm;
    } else if (!all_empty(f, 9, 10)) {
        parse_fail(line_no, "landmark columns must be all present or all empty");
    }
    return r;
}

}  // namespace

std::string_view to_string(Role role) {
    return role == Role::Gallery ? "gallery" : "probe";
}

Manifest::Manifest(std::string name, std::vector<ImageRecord> records)
    : name_(std::move(name)), records_(std::move(records)) {
    std::unordered_set<std::string> ids;
    std::unordered_set<std::string> gallery_subjects;
    for (const auto& r : records_) {
        if (!ids.insert(r.image_id).second) {
            throw Error(ErrorCode::DuplicateImageId, "duplicate image_id '" + r.image_id + "'");
        }
        if (r.box && !(r.box->w > 0.0 && r.box->h > 0.0)) {
            throw Error(ErrorCode::ParseError,
                        "box of '" + r.image_id + "' must have positive width and height");
        }
        if (r.role == Role::Gallery && !gallery_subjects.insert(r.subject_id).second) {
            throw Error(ErrorCode::DuplicateGallery,
                        "subject '" + r.subject_id + "' has more than one gallery record");
        }
    }
    for (const auto& r : records_) {
        if (r.role == Role::Probe && !gallery_subjects.contains(r.subject_id)) {
            throw Error(ErrorCode::UnknownProbeSubject,
                        "probe '" + r.image_id + "' belongs to unenrolled subject '" +
                            r.subject_id + "'");
        }
    }
}

std::vector<ImageRecord> Manifest::gallery() const {
    std::vector<ImageRecord> out;
    std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
                 [](const ImageRecord& r) { return r.role == Role::Gallery; });
    return out;
}

std::vector<ImageRecord> Manifest::probes() const {
    std::vector<ImageRecord> out;
    std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
                 [](const ImageRecord& r) { return r.role == Role::Probe; });
    return out;
}

const ImageRecord* Manifest::find(const std::string& image_id) const {
    auto it = std::find_if(records_.begin(), records_.end(),
                           [&](const ImageRecord& r) { return r.image_id == image_id; });
    return it == records_.end() ? nullptr : &*it;
}

std::set<std::string> Manifest::conditions() const {
    std::set<std::string> out;
    for (const auto& r : records_) out.insert(r.condition);
    return out;
}

Manifest parse_manifest(const std::string& text, std::string name) {
    std::string_view body = text;
    if (body.starts_with("\xEF\xBB\xBF")) body.remove_prefix(3);
    const auto lines = csv::lines(body);

    std::size_t i = 0;
    while (i < lines.size() && lines[i].starts_with('#')) ++i;
    if (i == lines.size() || lines[i] != kManifestHeader) {
        throw Error(ErrorCode::ParseError, "missing or wrong manifest header");
    }
    std::vector<ImageRecord> records;
    for (++i; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        records.push_back(parse_row(csv::split_line(lines[i]), i + 1));
    }
    return Manifest(std::move(name), std::move(records));
}

Manifest load_manifest(const std::filesystem::path& path) {
    return parse_manifest(detail::read_file(path), path.stem().string());
}

std::string format_manifest(const Manifest& m) {
    std::string out = kManifestHeader;
    out.push_back('\n');
    for (const auto& r : m.records()) {
        std::vector<std::string> f{r.image_id, r.subject_id, std::string(to_string(r.role)),
                                   r.condition, r.path};
        if (r.box) {
            for (double v : {r.box->x, r.box->y, r.box->w, r.box->h}) {
                f.push_back(csv::format_double(v));
            }
        } else {
            f.insert(f.end(), 4, "");
        }
        if (r.landmarks) {
            for (const auto& p : *r.landmarks) {
                f.push_back(csv::format_double(p.x));
                f.push_back(csv::format_double(p.y));
            }
        } else {
            f.insert(f.end(), 10, "");
        }
        out += csv::join(f);
        out.push_back('\n');
    }
    return out;
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
    detail::write_file(path, format_manifest(m));
}

std::map<std::string, std::vector<ImageRecord>> partition_by_condition(const Manifest& m) {
    std::map<std::string, std::vector<ImageRecord>> parts;
    for (const auto& r : m.records()) {
        if (r.role == Role::Probe) parts[r.condition].push_back(r);
    }
    return parts;
}

std::vector<std::string> subject_ids(const Manifest& m) {
    std::vector<std::string> ids;
    ids.reserve(m.records().size());
    for (const auto& r : m.records()) ids.push_back(r.subject_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace lrfr
