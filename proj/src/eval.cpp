#include "lrfr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace lrfr {

namespace {

double percent(std::size_t hits, std::size_t total) {
    return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

std::unordered_map<std::string, std::string> probe_conditions(const Manifest& manifest) {
    std::unordered_map<std::string, std::string> out;
    for (const auto& r : manifest.records()) {
        if (r.role == Role::Probe) out.emplace(r.image_id, r.condition);
    }
    return out;
}

IdentificationResult restrict_ranking(const IdentificationResult& r,
                                      const std::unordered_set<std::string>& keep) {
    IdentificationResult out{r.probe_image_id, r.true_subject_id, {}};
    for (const auto& entry : r.ranked) {
        if (keep.contains(entry.subject_id)) out.ranked.push_back(entry);
    }
    return out;
}

// Rank-1 IR per probe condition of one repeat's results.
std::map<std::string, double> rank1_by_condition(
    const std::map<std::string, std::vector<IdentificationResult>>& grouped) {
    std::map<std::string, double> out;
    for (const auto& [condition, results] : grouped) {
        if (results.empty()) {
            throw Error(ErrorCode::EmptyResults,
                        "no scored probes for condition '" + condition + "' in this subset");
        }
        out[condition] = rank_k_ir(results, 1);
    }
    return out;
}

void check_rrssv_args(std::size_t subject_count, std::size_t subset_size, std::size_t repeats) {
    if (subset_size > subject_count) {
        throw Error(ErrorCode::SubsetTooLarge, "subset of " + std::to_string(subset_size) +
                                                   " subjects requested from " +
                                                   std::to_string(subject_count));
    }
    if (subset_size < 1 || repeats < 1) {
        throw Error(ErrorCode::InvalidArgument, "subset size and repeats must be at least 1");
    }
}

void finish(RrssvReport& report) {
    for (auto& [condition, c] : report.conditions) {
        const RunningStats s = mean_std(c.values);
        c.mean = s.mean;
        c.stddev = s.stddev;
    }
}

}  // namespace

double rank_k_ir(const std::vector<IdentificationResult>& results, int k) {
    if (results.empty()) throw Error(ErrorCode::EmptyResults, "no identification results");
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "rank must be at least 1");
    std::size_t hits = 0;
    for (const auto& r : results) {
        const auto end = r.ranked.begin() + std::min<std::size_t>(k, r.ranked.size());
        hits += std::any_of(r.ranked.begin(), end, [&](const RankedSubject& s) {
            return s.subject_id == r.true_subject_id;
        });
    }
    return percent(hits, results.size());
}

std::vector<CmcPoint> cmc(const std::vector<IdentificationResult>& results) {
    if (results.empty()) throw Error(ErrorCode::EmptyResults, "no identification results");
    const std::size_t gallery_size = results.front().ranked.size();
    std::vector<std::size_t> first_hit(gallery_size + 1, 0);
    for (const auto& r : results) {
        if (r.ranked.size() != gallery_size) {
            throw Error(ErrorCode::InconsistentGallery,
                        "probe '" + r.probe_image_id + "' was ranked against " +
                            std::to_string(r.ranked.size()) + " subjects, expected " +
                            std::to_string(gallery_size));
        }
        ++first_hit[r.rank_of_truth()];  // slot 0 collects misses
    }
    std::vector<CmcPoint> curve;
    curve.reserve(gallery_size);
    std::size_t cumulative = 0;
    for (std::size_t k = 1; k <= gallery_size; ++k) {
        cumulative += first_hit[k];
        curve.push_back({static_cast<int>(k), percent(cumulative, results.size())});
    }
    return curve;
}

EvalReport evaluate(const Manifest& manifest, const std::vector<IdentificationResult>& results,
                    const std::vector<int>& ranks) {
    const auto conditions = probe_conditions(manifest);
    std::map<std::string, std::vector<IdentificationResult>> grouped;
    std::unordered_set<std::string> scored;
    for (const auto& [condition, probes] : partition_by_condition(manifest)) grouped[condition];
    for (const auto& r : results) {
        auto it = conditions.find(r.probe_image_id);
        if (it == conditions.end()) {
            throw Error(ErrorCode::InvalidArgument,
                        "result for '" + r.probe_image_id + "' which is not a probe in the manifest");
        }
        grouped[it->second].push_back(r);
        scored.insert(r.probe_image_id);
    }

    auto score = [&](const std::vector<IdentificationResult>& rs) {
        ConditionScore s;
        s.probe_count = rs.size();
        if (!rs.empty()) {
            for (int k : ranks) s.rank_k_ir[k] = rank_k_ir(rs, k);
        }
        return s;
    };

    EvalReport report;
    for (const auto& [condition, rs] : grouped) report.conditions[condition] = score(rs);
    report.overall = score(results);
    for (const auto& [id, condition] : conditions) {
        if (!scored.contains(id)) {
            ++report.conditions[condition].error_count;
            ++report.overall.error_count;
        }
    }
    return report;
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    if (bound == 0) throw Error(ErrorCode::InvalidArgument, "empty range");
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
        const std::uint64_t x = next();
        if (x >= threshold) return x % bound;
    }
}

std::vector<std::string> draw_subjects(const std::vector<std::string>& sorted_subjects,
                                       std::size_t subset_size, std::uint64_t seed, std::size_t repeat) {
    check_rrssv_args(sorted_subjects.size(), subset_size, 1);
    SplitMix64 rng(seed + (static_cast<std::uint64_t>(repeat) + 1) * 0x9E3779B97F4A7C15ULL);
    std::vector<std::string> pool = sorted_subjects;
    for (std::size_t i = pool.size(); i-- > 1;) {
        std::swap(pool[i], pool[rng.below(i + 1)]);
    }
    pool.resize(subset_size);
    std::sort(pool.begin(), pool.end());
    return pool;
}

RunningStats mean_std(const std::vector<double>& values) {
    if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double x : values) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    return {mean, std::sqrt(std::max(var, 0.0))};
}

RrssvReport rrssv(const Manifest& manifest, const std::vector<IdentificationResult>& results,
                  std::size_t subset_size, std::size_t repeats, std::uint64_t seed) {
    const auto subjects = subject_ids(manifest);
    check_rrssv_args(subjects.size(), subset_size, repeats);
    const auto conditions = probe_conditions(manifest);

    RrssvReport report{repeats, subset_size, seed, {}, {}};
    for (std::size_t rep = 0; rep < repeats; ++rep) {
        auto subset = draw_subjects(subjects, subset_size, seed, rep);
        const std::unordered_set<std::string> keep(subset.begin(), subset.end());

        std::map<std::string, std::vector<IdentificationResult>> grouped;
        for (const auto& [condition, probes] : partition_by_condition(manifest)) grouped[condition];
        for (const auto& r : results) {
            if (!keep.contains(r.true_subject_id)) continue;
            auto it = conditions.find(r.probe_image_id);
            if (it == conditions.end()) {
                throw Error(ErrorCode::InvalidArgument,
                            "result for '" + r.probe_image_id + "' which is not a probe in the manifest");
            }
            grouped[it->second].push_back(restrict_ranking(r, keep));
        }
        for (const auto& [condition, ir] : rank1_by_condition(grouped)) {
            report.conditions[condition].values.push_back(ir);
        }
        report.subsets.push_back(std::move(subset));
    }
    finish(report);
    return report;
}

RrssvReport rrssv(const Manifest& manifest, const EmbeddingSet& gallery, const EmbeddingSet& probes,
                  std::size_t subset_size, std::size_t repeats, std::uint64_t seed, unsigned jobs) {
    const auto subjects = subject_ids(manifest);
    check_rrssv_args(subjects.size(), subset_size, repeats);
    const auto conditions = probe_conditions(manifest);
    const GalleryIndex full(gallery);

    RrssvReport report{repeats, subset_size, seed, {}, {}};
    for (std::size_t rep = 0; rep < repeats; ++rep) {
        auto subset = draw_subjects(subjects, subset_size, seed, rep);
        const std::unordered_set<std::string> keep(subset.begin(), subset.end());

        EmbeddingSet kept(probes.dim());
        for (const auto& e : probes.entries()) {
            if (keep.contains(e.subject_id)) kept.add(e);
        }
        const auto batch = identify_all(kept, full.restricted_to(subset), jobs);

        std::map<std::string, std::vector<IdentificationResult>> grouped;
        for (const auto& [condition, ps] : partition_by_condition(manifest)) grouped[condition];
        for (const auto& r : batch.results) {
            auto it = conditions.find(r.probe_image_id);
            if (it == conditions.end()) {
                throw Error(ErrorCode::InvalidArgument,
                            "embedding for '" + r.probe_image_id + "' which is not a probe in the manifest");
            }
            grouped[it->second].push_back(r);
        }
        for (const auto& [condition, ir] : rank1_by_condition(grouped)) {
            report.conditions[condition].values.push_back(ir);
        }
        report.subsets.push_back(std::move(subset));
    }
    finish(report);
    return report;
}

const SweepCell* SweepGrid::find(double ratio, int resolution, const std::string& condition) const {
    for (const auto& c : cells) {
        if (c.crop_ratio == ratio && c.resolution == resolution && c.condition == condition) return &c;
    }
    return nullptr;
}

}  // namespace lrfr
