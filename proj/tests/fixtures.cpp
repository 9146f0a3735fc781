#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace lrfr::testing {

namespace {

struct Wave {
    double fx, fy, phase, amplitude;
};

std::vector<Wave> random_waves(std::mt19937_64& rng, int count, double max_freq, double total_amplitude) {
    std::uniform_real_distribution<double> freq(-max_freq, max_freq);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<Wave> waves;
    for (int i = 0; i < count; ++i) {
        waves.push_back({freq(rng), freq(rng), phase(rng), total_amplitude / count});
    }
    return waves;
}

double evaluate(const std::vector<Wave>& waves, double u, double v, int channel) {
    double s = 128.0;
    for (const auto& w : waves) {
        s += w.amplitude * std::sin(2.0 * std::numbers::pi * (w.fx * u + w.fy * v) + w.phase + 0.7 * channel);
    }
    return s;
}

std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Renders a subject's pattern on a canvas whose face box is (box, box, box, box)
// and canvas side is 2 * box; u, v are relative to the box center in box units.
ImageBuffer render_subject(const std::vector<Wave>& waves, int box, double noise, std::mt19937_64& rng) {
    const int side = 2 * box;
    ImageBuffer img(side, side, 3);
    std::uniform_real_distribution<double> jitter(-noise, noise);
    const double center = side / 2.0;
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const double u = (x + 0.5 - center) / box;
            const double v = (y + 0.5 - center) / box;
            for (int c = 0; c < 3; ++c) {
                img.at(x, y, c) = clamp_u8(evaluate(waves, u, v, c) + (noise > 0 ? jitter(rng) : 0.0));
            }
        }
    }
    return img;
}

}  // namespace

ImageBuffer textured_image(int width, int height, int channels, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto waves = random_waves(rng, 6, 4.0, 90.0);
    std::uniform_real_distribution<double> noise(-6.0, 6.0);
    ImageBuffer img(width, height, channels);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                img.at(x, y, c) =
                    clamp_u8(evaluate(waves, static_cast<double>(x) / width, static_cast<double>(y) / height, c) +
                             noise(rng));
            }
        }
    }
    return img;
}

Eigen::VectorXf random_vector(int dim, std::mt19937_64& rng) {
    std::normal_distribution<float> n(0.0f, 1.0f);
    Eigen::VectorXf v(dim);
    for (int i = 0; i < dim; ++i) v[i] = n(rng);
    return v;
}

SyntheticEmbeddings sphere_embeddings(int subjects, int probes_per_subject, int dim, double sigma,
                                      std::uint64_t seed, const std::vector<std::string>& conditions) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    SyntheticEmbeddings out{EmbeddingSet(dim), EmbeddingSet(dim), Manifest()};
    std::vector<ImageRecord> records;
    for (int s = 0; s < subjects; ++s) {
        char sid[16];
        std::snprintf(sid, sizeof sid, "s%03d", s);
        const Eigen::VectorXf center = random_vector(dim, rng).normalized();
        out.gallery.add({std::string(sid) + "_g", sid, center});
        records.push_back({std::string(sid) + "_g", sid, Role::Gallery, "gallery",
                           std::string(sid) + "_g.png", std::nullopt, std::nullopt});
        for (int k = 0; k < probes_per_subject; ++k) {
            Eigen::VectorXf p = center;
            for (int i = 0; i < dim; ++i) p[i] += static_cast<float>(noise(rng));
            const std::string id = std::string(sid) + "_p" + std::to_string(k);
            out.probes.add({id, sid, p});
            records.push_back({id, sid, Role::Probe, conditions[k % conditions.size()], id + ".png",
                               std::nullopt, std::nullopt});
        }
    }
    out.manifest = Manifest("synthetic", std::move(records));
    return out;
}

std::filesystem::path write_image_corpus(const std::filesystem::path& dir, const CorpusSpec& spec) {
    std::filesystem::create_directories(dir / "raw");
    std::mt19937_64 rng(spec.seed);
    std::vector<ImageRecord> records;
    // Probe face size grows with the condition index, like increasing camera proximity.
    auto probe_box = [](std::size_t condition) { return 14 + 8 * static_cast<int>(condition); };
    for (int s = 0; s < spec.subjects; ++s) {
        char sid[16];
        std::snprintf(sid, sizeof sid, "subj%02d", s);
        const auto waves = random_waves(rng, 5, 1.5, 100.0);

        const int gbox = 72;
        const std::string gid = std::string(sid) + "_frontal";
        write_png(render_subject(waves, gbox, 0.0, rng), dir / "raw" / (gid + ".png"));
        records.push_back({gid, sid, Role::Gallery, "mugshot", "raw/" + gid + ".png",
                           FaceBox{gbox / 2.0, gbox / 2.0, double(gbox), double(gbox)}, std::nullopt});

        for (std::size_t c = 0; c < spec.conditions.size(); ++c) {
            const int pbox = probe_box(c);
            for (int k = 0; k < spec.probes_per_condition; ++k) {
                const std::string pid = std::string(sid) + "_" + spec.conditions[c] + "_" + std::to_string(k);
                write_png(render_subject(waves, pbox, 4.0, rng), dir / "raw" / (pid + ".png"));
                records.push_back({pid, sid, Role::Probe, spec.conditions[c], "raw/" + pid + ".png",
                                   FaceBox{pbox / 2.0, pbox / 2.0, double(pbox), double(pbox)}, std::nullopt});
            }
        }
    }
    const auto path = dir / "manifest.csv";
    write_manifest(Manifest("manifest", std::move(records)), path);
    return path;
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("lrfr_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace lrfr::testing
