#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lrfr/corpus.hpp"
#include "lrfr/matcher.hpp"

namespace lrfr {

/// Percentage of results whose true subject is within the first k ranks.
/// Throws EmptyResults, InvalidArgument (k < 1).
double rank_k_ir(const std::vector<IdentificationResult>& results, int k);

struct CmcPoint {
    int rank = 0;
    double ir_percent = 0.0;
};

/// Rank-k IR for k = 1..G. Throws EmptyResults, InconsistentGallery when the
/// ranked lists differ in length.
std::vector<CmcPoint> cmc(const std::vector<IdentificationResult>& results);

struct ConditionScore {
    std::map<int, double> rank_k_ir;  // empty when every probe failed
    std::size_t probe_count = 0;      // probes with a result
    std::size_t error_count = 0;      // manifest probes without a result
};

struct EvalReport {
    std::map<std::string, ConditionScore> conditions;
    ConditionScore overall;
};

/// Groups results by the condition of their probe record. Manifest probes
/// without a result count as errors and stay out of the denominator.
EvalReport evaluate(const Manifest& manifest, const std::vector<IdentificationResult>& results,
                    const std::vector<int>& ranks);

/// SplitMix64: the portable generator behind every seeded draw.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound) by rejection of the biased low range.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

/// Subjects for one RRSSV repeat: a SplitMix64 stream seeded with
/// seed + (repeat + 1) * 0x9E3779B97F4A7C15 drives a Fisher-Yates shuffle
/// (i from n-1 down to 1, j = below(i + 1)) of the sorted subject list; the
/// first subset_size entries are returned, sorted.
std::vector<std::string> draw_subjects(const std::vector<std::string>& sorted_subjects,
                                       std::size_t subset_size, std::uint64_t seed, std::size_t repeat);

struct RunningStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n - 1); 0 for a single value
};

/// Welford accumulation of mean and sample standard deviation.
RunningStats mean_std(const std::vector<double>& values);

struct RrssvCondition {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> values;  // one Rank-1 IR per repeat
};

struct RrssvReport {
    std::size_t repeats = 0;
    std::size_t subset_size = 0;
    std::uint64_t seed = 0;
    std::map<std::string, RrssvCondition> conditions;
    std::vector<std::vector<std::string>> subsets;  // per repeat, sorted
};

/// Repeated random sub-sampling from full rankings: each repeat keeps the
/// drawn subjects, drops the others from every ranked list and from the
/// probe set, and scores Rank-1 IR per condition.
RrssvReport rrssv(const Manifest& manifest, const std::vector<IdentificationResult>& results,
                  std::size_t subset_size, std::size_t repeats, std::uint64_t seed);

/// Same protocol, re-running the matcher on a restricted gallery each repeat.
RrssvReport rrssv(const Manifest& manifest, const EmbeddingSet& gallery, const EmbeddingSet& probes,
                  std::size_t subset_size, std::size_t repeats, std::uint64_t seed, unsigned jobs = 0);

struct SweepCell {
    double crop_ratio = 1.0;
    int resolution = 0;  // 0 = gallery not resolution-matched
    std::string condition;
    std::optional<double> rank1_ir;  // empty when the cell failed
    std::string error;
};

/// Rank-1 IR over crop_ratios x resolutions x conditions, ratio-major.
struct SweepGrid {
    std::vector<double> crop_ratios;
    std::vector<int> resolutions;
    std::vector<std::string> conditions;
    std::vector<SweepCell> cells;

    const SweepCell* find(double ratio, int resolution, const std::string& condition) const;
};

}  // namespace lrfr
