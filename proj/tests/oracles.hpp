#pragma once

// Reference computations that deliberately share no code with the library.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lrfr/embedding.hpp"

namespace lrfr::testing {

/// Correlation distance by direct evaluation in long double, element by element.
template <typename U, typename V>
long double oracle_distance(const U& u, const V& v) {
    const auto n = u.size();
    long double mu = 0, mv = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        mu += static_cast<long double>(u[i]);
        mv += static_cast<long double>(v[i]);
    }
    mu /= n;
    mv /= n;
    long double dot = 0, nu = 0, nv = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const long double a = static_cast<long double>(u[i]) - mu;
        const long double b = static_cast<long double>(v[i]) - mv;
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    long double d = 1.0L - dot / (std::sqrt(nu) * std::sqrt(nv));
    return std::clamp(d, 0.0L, 2.0L);
}

/// Full ranking by a naive loop over the gallery, ties by subject id.
inline std::vector<std::pair<std::string, long double>> oracle_identify(const Embedding& probe,
                                                                       const EmbeddingSet& gallery) {
    std::vector<std::pair<std::string, long double>> out;
    for (const auto& g : gallery.entries()) out.emplace_back(g.subject_id, oracle_distance(probe.vector, g.vector));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    return out;
}

/// Two-pass sample mean and standard deviation.
inline std::pair<double, double> oracle_mean_std(const std::vector<double>& xs) {
    long double sum = 0;
    for (double x : xs) sum += x;
    const long double mean = sum / xs.size();
    long double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const long double var = xs.size() > 1 ? ss / (xs.size() - 1) : 0;
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var))};
}

}  // namespace lrfr::testing
