#include "lrfr/report.hpp"

#include <cstdio>

#include "lrfr/csv.hpp"

namespace lrfr {

std::uint64_t Provenance::config_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](std::string_view s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [key, value] : config) {
        feed(key);
        feed("=");
        feed(value);
        feed("\n");
    }
    return h;
}

std::string Provenance::header() const {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash()));
    std::string out = std::string("# lrfr-toolkit ") + kToolkitVersion + "\n";
    out += std::string("# config_hash ") + hash + "\n";
    out += "# seed " + std::to_string(seed) + "\n";
    for (const auto& [key, value] : config) out += "# " + key + "=" + value + "\n";
    return out;
}

std::string format_percent(double value) {
    return csv::format_significant(value, 10);
}

std::string format_eval_csv(const EvalReport& report, const Provenance& provenance) {
    std::string out = provenance.header();
    auto counts = [&](const std::string& name, const ConditionScore& s) {
        out += "# counts " + name + " probes=" + std::to_string(s.probe_count) +
               " errors=" + std::to_string(s.error_count) + "\n";
    };
    for (const auto& [condition, s] : report.conditions) counts(condition, s);
    counts("all", report.overall);

    out += "condition,rank,ir_percent\n";
    auto rows = [&](const std::string& name, const ConditionScore& s) {
        for (const auto& [rank, ir] : s.rank_k_ir) {
            out += csv::join({name, std::to_string(rank), format_percent(ir)}) + "\n";
        }
    };
    for (const auto& [condition, s] : report.conditions) rows(condition, s);
    rows("all", report.overall);
    return out;
}

std::string format_cmc_csv(const std::map<std::string, std::vector<CmcPoint>>& curves,
                           const Provenance& provenance) {
    std::string out = provenance.header();
    out += "condition,rank,ir_percent\n";
    for (const auto& [condition, curve] : curves) {
        for (const auto& p : curve) {
            out += csv::join({condition, std::to_string(p.rank), format_percent(p.ir_percent)}) + "\n";
        }
    }
    return out;
}

std::string format_rrssv_csv(const RrssvReport& report, const Provenance& provenance) {
    std::string out = provenance.header();
    out += "# repeats " + std::to_string(report.repeats) + "\n";
    out += "# subset_size " + std::to_string(report.subset_size) + "\n";
    std::vector<std::string> header{"condition", "mean", "std"};
    for (std::size_t i = 0; i < report.repeats; ++i) header.push_back("repeat_" + std::to_string(i + 1));
    out += csv::join(header) + "\n";
    for (const auto& [condition, c] : report.conditions) {
        std::vector<std::string> row{condition, format_percent(c.mean), format_percent(c.stddev)};
        for (double v : c.values) row.push_back(format_percent(v));
        out += csv::join(row) + "\n";
    }
    return out;
}

std::string format_sweep_csv(const SweepGrid& grid, const Provenance& provenance) {
    std::string out = provenance.header();
    out += "crop_ratio,resolution,condition,rank1_ir\n";
    std::string failures;
    for (const auto& c : grid.cells) {
        const std::string ratio = csv::format_double(c.crop_ratio);
        const std::string res = c.resolution > 0 ? std::to_string(c.resolution) : "none";
        out += csv::join({ratio, res, c.condition, c.rank1_ir ? format_percent(*c.rank1_ir) : ""}) + "\n";
        if (!c.rank1_ir) failures += "# failed " + ratio + "," + res + "," + c.condition + ": " + c.error + "\n";
    }
    return out + failures;
}

}  // namespace lrfr
