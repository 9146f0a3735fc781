#include <doctest.h>

#include "fixtures.hpp"
#include "lrfr/error.hpp"
#include "lrfr/geometry.hpp"
#include "lrfr/pipeline.hpp"
#include "oracles.hpp"

using namespace lrfr;

namespace {

struct Corpus {
    std::filesystem::path dir;
    Manifest manifest;
};

const Corpus& corpus() {
    static const Corpus c = [] {
        const auto dir = testing::scratch_dir("pipeline_corpus");
        return Corpus{dir, load_manifest(testing::write_image_corpus(dir, {}))};
    }();
    return c;
}

}  // namespace

TEST_CASE("prepare_images crops, pads and resizes every record") {
    const auto& c = corpus();
    const ImageSet set = prepare_images(c.manifest, c.dir, 1.2, 112, 1);
    CHECK(set.issues.empty());
    REQUIRE(set.records.size() == c.manifest.records().size());
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        CHECK(set.images[i].width() == 112);
        CHECK(set.images[i].height() == 112);
        const auto& rec = set.records[i];
        const ImageBuffer raw = load_record_image(rec, c.dir);
        const ImageBuffer crop = crop_padded(raw, extend_box(*rec.box, 1.2));
        CHECK(set.images[i] == resize(crop, 112, 112, kernel_for(crop, 112, 112)));
    }
}

TEST_CASE("prepare_images skips records it cannot process and keeps the set closed") {
    const auto& c = corpus();
    auto records = c.manifest.records();
    std::size_t probes_of_subj00 = 0;
    for (auto& r : records) {
        if (r.image_id == "subj00_frontal") r.box.reset();
        if (r.image_id == "subj01_d2_0") r.path = "raw/missing.png";
        probes_of_subj00 += r.subject_id == "subj00" && r.role == Role::Probe;
    }
    const Manifest broken("broken", records);
    const ImageSet set = prepare_images(broken, c.dir, 1.0, 64, 1);
    CHECK(set.records.size() == records.size() - 2 - probes_of_subj00);
    REQUIRE(set.issues.size() == 2 + probes_of_subj00);
    CHECK(set.issues[0].code == "MissingBox");
    std::size_t decode = 0, dropped = 0;
    for (const auto& issue : set.issues) {
        decode += issue.code == "DecodeError";
        dropped += issue.code == "UnknownProbeSubject";
    }
    CHECK(decode == 1);
    CHECK(dropped == probes_of_subj00);
    for (const auto& r : set.records) CHECK(r.subject_id != "subj00");
}

TEST_CASE("match_gallery touches gallery images only") {
    const auto& c = corpus();
    const ImageSet prepared = prepare_images(c.manifest, c.dir, 1.1, 112, 1);
    const ImageSet same = match_gallery(prepared, std::nullopt, 112, 1);
    CHECK(same.images == prepared.images);

    const ImageSet matched = match_gallery(prepared, 24, 112, 1);
    CHECK(matched.issues.empty());
    for (std::size_t i = 0; i < prepared.records.size(); ++i) {
        if (prepared.records[i].role == Role::Gallery)
            CHECK(matched.images[i] == match_resolution(prepared.images[i], 24, 112));
        else
            CHECK(matched.images[i] == prepared.images[i]);
    }

    // A target above the prepared size is an upscale; it is applied and flagged.
    const ImageSet up = match_gallery(prepare_images(c.manifest, c.dir, 1.0, 32, 1), 48, 32, 1);
    CHECK(up.issues.size() == 10);
    CHECK(up.issues.front().code == "UpscaleAsMatch");
}

TEST_CASE("image sets survive a write/load round trip") {
    const auto& c = corpus();
    const ImageSet prepared = prepare_images(c.manifest, c.dir, 1.35, 64, 1);
    const auto out = testing::scratch_dir("pipeline_roundtrip");
    const Manifest derived = write_image_set(prepared, "prepared", out);
    CHECK(derived.records().size() == prepared.records.size());
    for (const auto& r : derived.records()) {
        CHECK_FALSE(r.box);
        CHECK(r.path.starts_with("images/"));
    }
    const ImageSet back = load_image_set(derived, out, 1);
    CHECK(back.images == prepared.images);
    CHECK(sanitize_id("a/b c:d.png") == "a_b_c_d.png");
}

TEST_CASE("embedding a set equals embedding each image directly") {
    const auto& c = corpus();
    const ImageSet set = prepare_images(c.manifest, c.dir, 1.0, 112, 1);
    const BackendPtr backend = resolve_backend("reference");
    const EmbeddedSets e = embed_image_set(set, *backend, 1);
    CHECK(e.issues.empty());
    CHECK(e.gallery.size() == 10);
    CHECK(e.probes.size() == 60);
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        const auto& set_for_role = set.records[i].role == Role::Gallery ? e.gallery : e.probes;
        const Embedding* got = set_for_role.find(set.records[i].image_id);
        REQUIRE(got);
        CHECK(got->vector == reference_embed(set.images[i]));
    }
}

TEST_CASE("run_single equals the hand-composed stages") {
    const auto& c = corpus();
    const BackendPtr backend = resolve_backend("reference");
    const RunParams params{1.3, 32, 112, {1, 3}};
    const EvalReport report = run_single(c.manifest, c.dir, *backend, params, 1);

    const ImageSet matched = match_gallery(prepare_images(c.manifest, c.dir, 1.3, 112, 1), 32, 112, 1);
    const EmbeddedSets e = embed_image_set(matched, *backend, 1);
    const auto batch = identify_all(e.probes, GalleryIndex(e.gallery), 1);
    const EvalReport manual = evaluate(c.manifest, batch.results, {1, 3});
    REQUIRE(report.conditions.size() == manual.conditions.size());
    for (const auto& [name, score] : manual.conditions) {
        CHECK(report.conditions.at(name).rank_k_ir == score.rank_k_ir);
        CHECK(report.conditions.at(name).probe_count == score.probe_count);
    }
}

TEST_CASE("sweep: shape, agreement with single runs, and separability by brute force") {
    const auto& c = corpus();
    const BackendPtr backend = resolve_backend("reference");
    const std::vector<double> ratios{1.0, 1.2, 1.4};
    const std::vector<int> resolutions{24, 48};
    const SweepGrid grid = sweep(c.manifest, c.dir, *backend, ratios, resolutions, 112, 1);
    CHECK(grid.cells.size() == 3 * 2 * 3);
    CHECK(grid.conditions == std::vector<std::string>{"d1", "d2", "d3"});

    for (double ratio : ratios) {
        for (int res : resolutions) {
            const auto report = run_single(c.manifest, c.dir, *backend, {ratio, res, 112, {1}}, 1);

            // Independent nearest-neighbour check over the same embeddings.
            const ImageSet matched = match_gallery(prepare_images(c.manifest, c.dir, ratio, 112, 1), res, 112, 1);
            const EmbeddedSets e = embed_image_set(matched, *backend, 1);
            std::map<std::string, int> correct;
            for (const auto& p : e.probes.entries())
                correct[c.manifest.find(p.image_id)->condition] +=
                    testing::oracle_identify(p, e.gallery).front().first == p.subject_id;

            for (const auto& cond : grid.conditions) {
                const SweepCell* cell = grid.find(ratio, res, cond);
                REQUIRE(cell);
                REQUIRE(cell->rank1_ir);
                CHECK(*cell->rank1_ir == report.conditions.at(cond).rank_k_ir.at(1));
                CHECK(*cell->rank1_ir == 100.0 * correct[cond] / 20.0);
                CHECK(*cell->rank1_ir == 100.0);
            }
        }
    }
}

TEST_CASE("sweep and run_single do not depend on the worker count") {
    const auto& c = corpus();
    const BackendPtr backend = resolve_backend("reference");
    const SweepGrid one = sweep(c.manifest, c.dir, *backend, {1.1}, {32, 64}, 112, 1);
    const SweepGrid many = sweep(c.manifest, c.dir, *backend, {1.1}, {32, 64}, 112, 8);
    REQUIRE(one.cells.size() == many.cells.size());
    for (std::size_t i = 0; i < one.cells.size(); ++i) CHECK(one.cells[i].rank1_ir == many.cells[i].rank1_ir);

    const ImageSet a = prepare_images(c.manifest, c.dir, 1.4, 224, 1);
    const ImageSet b = prepare_images(c.manifest, c.dir, 1.4, 224, 8);
    CHECK(a.images == b.images);
}

TEST_CASE("sweep records failing cells and carries on") {
    const auto& c = corpus();
    const BackendPtr backend = resolve_backend("reference");
    const SweepGrid grid = sweep(c.manifest, c.dir, *backend, {-1.0, 1.0}, {32}, 112, 1);
    REQUIRE(grid.cells.size() == 6);
    for (const auto& cond : grid.conditions) {
        const SweepCell* bad = grid.find(-1.0, 32, cond);
        REQUIRE(bad);
        CHECK_FALSE(bad->rank1_ir);
        CHECK_FALSE(bad->error.empty());
        CHECK(grid.find(1.0, 32, cond)->rank1_ir);
    }
}
