#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lrfr/corpus.hpp"
#include "lrfr/embedding.hpp"
#include "lrfr/image.hpp"

namespace lrfr::testing {

/// Smooth low-frequency pattern plus mild noise; stands in for a natural image.
ImageBuffer textured_image(int width, int height, int channels, std::uint64_t seed);

/// Random vector with standard normal entries.
Eigen::VectorXf random_vector(int dim, std::mt19937_64& rng);

/// Gallery centers on the unit sphere, probes = center + N(0, sigma^2) noise.
/// Probe ids are "<subject>_p<k>", conditions cycle through `conditions`.
struct SyntheticEmbeddings {
    EmbeddingSet gallery;
    EmbeddingSet probes;
    Manifest manifest;
};
SyntheticEmbeddings sphere_embeddings(int subjects, int probes_per_subject, int dim, double sigma,
                                      std::uint64_t seed,
                                      const std::vector<std::string>& conditions = {"d1", "d2", "d3"});

struct CorpusSpec {
    int subjects = 10;
    std::vector<std::string> conditions{"d1", "d2", "d3"};
    int probes_per_condition = 2;
    std::uint64_t seed = 7;
};

/// Writes per-subject face-like images (a large gallery shot and small noisy
/// probe shots sharing the same content relative to the face box) and
/// returns the manifest path. Reference embeddings of the same subject stay
/// close across resolutions, so the corpus is separable.
std::filesystem::path write_image_corpus(const std::filesystem::path& dir, const CorpusSpec& spec);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::string read_file(const std::filesystem::path& path);

}  // namespace lrfr::testing
