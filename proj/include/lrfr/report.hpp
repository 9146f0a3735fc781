#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lrfr/eval.hpp"

namespace lrfr {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Every parameter of a run, serialized into `#` comment lines at the top of
/// each report so the file documents how it was produced.
struct Provenance {
    std::vector<std::pair<std::string, std::string>> config;  // key order is kept
    std::uint64_t seed = 0;

    /// FNV-1a 64 over "key=value\n" for every entry, in order.
    std::uint64_t config_hash() const;
    std::string header() const;
};

/// `condition,rank,ir_percent`, one row per condition and rank plus an
/// "all" aggregate; probe/error counts go into comment lines.
std::string format_eval_csv(const EvalReport& report, const Provenance& provenance);

/// Full CMC curves in the eval layout.
std::string format_cmc_csv(const std::map<std::string, std::vector<CmcPoint>>& curves,
                           const Provenance& provenance);

/// `condition,mean,std,repeat_1..repeat_n`.
std::string format_rrssv_csv(const RrssvReport& report, const Provenance& provenance);

/// `crop_ratio,resolution,condition,rank1_ir`; failed cells leave rank1_ir
/// empty and are explained in trailing comment lines.
std::string format_sweep_csv(const SweepGrid& grid, const Provenance& provenance);

/// Percentages are printed with 10 significant digits.
std::string format_percent(double value);

}  // namespace lrfr
