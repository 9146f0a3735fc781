#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lrfr/embedding.hpp"
#include "lrfr/error.hpp"

namespace lrfr {

/// Correlation distance: one minus the Pearson correlation of u and v,
///
///   1 - <u - mean(u), v - mean(v)> / (|u - mean(u)| |v - mean(v)|)
///
/// accumulated in double for any scalar type and clamped to [0, 2].
/// Throws DimMismatch for unequal or < 2 sizes and DegenerateEmbedding when
/// either vector has zero variance.
template <typename DerivedU, typename DerivedV>
double correlation_distance(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v) {
    if (u.size() != v.size()) {
        throw Error(ErrorCode::DimMismatch, "correlation distance of vectors with dims " +
                                                std::to_string(u.size()) + " and " +
                                                std::to_string(v.size()));
    }
    if (u.size() < 2) throw Error(ErrorCode::DimMismatch, "correlation distance needs dim >= 2");

    const Eigen::VectorXd uc = u.template cast<double>().reshaped().array() -
                               u.template cast<double>().mean();
    const Eigen::VectorXd vc = v.template cast<double>().reshaped().array() -
                               v.template cast<double>().mean();
    const double nu2 = uc.squaredNorm();
    const double nv2 = vc.squaredNorm();
    if (!(nu2 > 0.0) || !(nv2 > 0.0)) {
        throw Error(ErrorCode::DegenerateEmbedding, "zero-variance vector in correlation distance");
    }
    // One square root of the product keeps exact (anti)correlation exact.
    return std::clamp(1.0 - uc.dot(vc) / std::sqrt(nu2 * nv2), 0.0, 2.0);
}

struct RankedSubject {
    std::string subject_id;
    double distance = 0.0;

    friend bool operator==(const RankedSubject&, const RankedSubject&) = default;
};

/// Full ranking of every gallery subject for one probe, ascending by
/// distance, ties broken by subject id.
struct IdentificationResult {
    std::string probe_image_id;
    std::string true_subject_id;
    std::vector<RankedSubject> ranked;

    /// 1-based rank of the true subject, or 0 when it is not enrolled.
    std::size_t rank_of_truth() const;

    friend bool operator==(const IdentificationResult&, const IdentificationResult&) = default;
};

/// Gallery of mean-centered vectors (double) with precomputed squared norms, one
/// column per subject in lexicographic subject order. Immutable and
/// shareable across threads once built.
class GalleryIndex {
public:
    /// Throws DuplicateSubject or DegenerateEmbedding.
    explicit GalleryIndex(const EmbeddingSet& gallery);

    int dim() const noexcept { return static_cast<int>(centered_.rows()); }
    std::size_t size() const noexcept { return subjects_.size(); }
    const std::vector<std::string>& subjects() const noexcept { return subjects_; }
    const Eigen::MatrixXd& centered() const noexcept { return centered_; }
    const Eigen::VectorXd& squared_norms() const noexcept { return squared_norms_; }

    /// Gallery restricted to the given subjects (ids absent from the index
    /// are ignored).
    GalleryIndex restricted_to(const std::vector<std::string>& subjects) const;

private:
    GalleryIndex() = default;

    std::vector<std::string> subjects_;
    Eigen::MatrixXd centered_;
    Eigen::VectorXd squared_norms_;
};

GalleryIndex build_gallery(const EmbeddingSet& gallery);

IdentificationResult identify(const Embedding& probe, const GalleryIndex& gallery);

struct ProbeError {
    std::string probe_image_id;
    ErrorCode code;
    std::string message;

    friend bool operator==(const ProbeError&, const ProbeError&) = default;
};

struct IdentificationBatch {
    std::vector<IdentificationResult> results;  // probe input order, failures skipped
    std::vector<ProbeError> errors;             // probe input order
};

/// identify() over every probe, fanned out over `jobs` workers (0 = use
/// LRFR_JOBS or hardware concurrency). Output is independent of `jobs`.
IdentificationBatch identify_all(const EmbeddingSet& probes, const GalleryIndex& gallery,
                                 unsigned jobs = 0);

inline constexpr const char* kResultsHeader = "probe_image_id,true_subject_id,rank,subject_id,distance";

/// One row per (probe, rank); distances with 9 significant digits.
std::string format_results(const std::vector<IdentificationResult>& results);
/// Inverse of format_results (distances are read back at printed precision).
std::vector<IdentificationResult> parse_results(const std::string& text);

}  // namespace lrfr
