#include "lrfr/matcher.hpp"

#include <numeric>
#include <optional>

#include "lrfr/csv.hpp"
#include "lrfr/parallel.hpp"

namespace lrfr {

std::size_t IdentificationResult::rank_of_truth() const {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (ranked[i].subject_id == true_subject_id) return i + 1;
    }
    return 0;
}

GalleryIndex::GalleryIndex(const EmbeddingSet& gallery) {
    std::vector<const Embedding*> order;
    order.reserve(gallery.size());
    for (const auto& e : gallery.entries()) order.push_back(&e);
    std::sort(order.begin(), order.end(),
              [](const Embedding* a, const Embedding* b) { return a->subject_id < b->subject_id; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i]->subject_id == order[i - 1]->subject_id) {
            throw Error(ErrorCode::DuplicateSubject,
                        "gallery has two embeddings for subject '" + order[i]->subject_id + "'");
        }
    }

    centered_.resize(gallery.dim(), static_cast<Eigen::Index>(order.size()));
    squared_norms_.resize(static_cast<Eigen::Index>(order.size()));
    subjects_.reserve(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        const Eigen::VectorXd v = order[j]->vector.cast<double>();
        centered_.col(j) = v.array() - v.mean();
        squared_norms_[j] = centered_.col(j).squaredNorm();
        if (!(squared_norms_[j] > 0.0)) {
            throw Error(ErrorCode::DegenerateEmbedding,
                        "gallery embedding of subject '" + order[j]->subject_id + "' has zero variance");
        }
        subjects_.push_back(order[j]->subject_id);
    }
}

GalleryIndex GalleryIndex::restricted_to(const std::vector<std::string>& subjects) const {
    std::vector<Eigen::Index> keep;
    for (std::size_t j = 0; j < subjects_.size(); ++j) {
        if (std::find(subjects.begin(), subjects.end(), subjects_[j]) != subjects.end()) {
            keep.push_back(static_cast<Eigen::Index>(j));
        }
    }
    GalleryIndex out;
    out.centered_ = centered_(Eigen::all, keep);
    out.squared_norms_ = squared_norms_(keep);
    for (auto j : keep) out.subjects_.push_back(subjects_[j]);
    return out;
}

GalleryIndex build_gallery(const EmbeddingSet& gallery) {
    return GalleryIndex(gallery);
}

IdentificationResult identify(const Embedding& probe, const GalleryIndex& gallery) {
    if (probe.vector.size() != gallery.dim()) {
        throw Error(ErrorCode::DimMismatch, "probe '" + probe.image_id + "' has dim " +
                                                std::to_string(probe.vector.size()) + ", gallery " +
                                                std::to_string(gallery.dim()));
    }
    const Eigen::VectorXd p = probe.vector.cast<double>();
    const Eigen::VectorXd pc = p.array() - p.mean();
    const double pn2 = pc.squaredNorm();
    if (!(pn2 > 0.0)) {
        throw Error(ErrorCode::DegenerateEmbedding, "probe '" + probe.image_id + "' has zero variance");
    }

    const Eigen::VectorXd dots = gallery.centered().transpose() * pc;
    const Eigen::VectorXd dist =
        (1.0 - (dots.array() / (gallery.squared_norms().array() * pn2).sqrt())).cwiseMax(0.0).cwiseMin(2.0);

    const auto& subjects = gallery.subjects();
    std::vector<std::size_t> order(subjects.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return subjects[a] < subjects[b];
    });

    IdentificationResult r{probe.image_id, probe.subject_id, {}};
    r.ranked.reserve(order.size());
    for (auto j : order) r.ranked.push_back({subjects[j], dist[j]});
    return r;
}

IdentificationBatch identify_all(const EmbeddingSet& probes, const GalleryIndex& gallery, unsigned jobs) {
    const auto& entries = probes.entries();
    std::vector<std::optional<IdentificationResult>> slots(entries.size());
    std::vector<std::optional<ProbeError>> failures(entries.size());

    parallel_for(entries.size(), resolve_jobs(jobs), [&](std::size_t i) {
        try {
            slots[i] = identify(entries[i], gallery);
        } catch (const Error& e) {
            failures[i] = ProbeError{entries[i].image_id, e.code(), e.what()};
        }
    });

    IdentificationBatch batch;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (slots[i]) batch.results.push_back(std::move(*slots[i]));
        if (failures[i]) batch.errors.push_back(std::move(*failures[i]));
    }
    return batch;
}

std::string format_results(const std::vector<IdentificationResult>& results) {
    std::string out = kResultsHeader;
    out.push_back('\n');
    for (const auto& r : results) {
        for (std::size_t k = 0; k < r.ranked.size(); ++k) {
            out += csv::join({r.probe_image_id, r.true_subject_id, std::to_string(k + 1),
                              r.ranked[k].subject_id, csv::format_significant(r.ranked[k].distance, 9)});
            out.push_back('\n');
        }
    }
    return out;
}

std::vector<IdentificationResult> parse_results(const std::string& text) {
    const auto lines = csv::lines(text);
    std::size_t i = 0;
    while (i < lines.size() && lines[i].starts_with('#')) ++i;
    if (i == lines.size() || lines[i] != kResultsHeader) {
        throw Error(ErrorCode::ParseError, "missing or wrong results header");
    }
    std::vector<IdentificationResult> out;
    for (++i; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i].starts_with('#')) continue;
        const auto f = csv::split_line(lines[i]);
        long long rank = 0;
        double distance = 0.0;
        if (f.size() != 5 || !csv::parse_int(f[2], rank) || !csv::parse_double(f[4], distance)) {
            throw Error(ErrorCode::ParseError, "bad results row at line " + std::to_string(i + 1));
        }
        if (out.empty() || out.back().probe_image_id != f[0]) {
            if (rank != 1) {
                throw Error(ErrorCode::ParseError, "ranking must start at rank 1, line " + std::to_string(i + 1));
            }
            out.push_back({f[0], f[1], {}});
        } else if (static_cast<std::size_t>(rank) != out.back().ranked.size() + 1) {
            throw Error(ErrorCode::ParseError, "ranks out of order at line " + std::to_string(i + 1));
        }
        out.back().ranked.push_back({f[3], distance});
    }
    return out;
}

}  // namespace lrfr
