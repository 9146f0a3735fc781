#include "lrfr/embedding.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include "file_util.hpp"
#include "lrfr/error.hpp"

namespace lrfr {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

bool all_finite(const Eigen::VectorXf& v) {
    return v.allFinite();
}

class ByteWriter {
public:
    explicit ByteWriter(std::string& out) : out_(out) {}

    template <typename T>
    void put(T value) {
        using U = std::make_unsigned_t<T>;
        U u = static_cast<U>(value);
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            out_.push_back(static_cast<char>(u & 0xFF));
            u = static_cast<U>(u >> 8);
        }
    }
    void put_f32(float f) { put(std::bit_cast<std::uint32_t>(f)); }
    void put_bytes(std::string_view s) { out_.append(s); }

private:
    std::string& out_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view in) : in_(in) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        std::make_unsigned_t<T> u = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            u |= static_cast<std::make_unsigned_t<T>>(static_cast<unsigned char>(in_[pos_ + i]))
                 << (8 * i);
        }
        pos_ += sizeof(T);
        return static_cast<T>(u);
    }
    float get_f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
    std::string_view get_bytes(std::size_t n) {
        need(n);
        auto s = in_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return in_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) {
            throw Error(ErrorCode::TruncatedFile, "embedding file ends early at byte " + std::to_string(pos_));
        }
    }

    std::string_view in_;
    std::size_t pos_ = 0;
};

void put_string(ByteWriter& w, const std::string& s, const char* what) {
    if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " longer than 65535 bytes");
    }
    w.put(static_cast<std::uint16_t>(s.size()));
    w.put_bytes(s);
}

class ReferenceBackend final : public EmbeddingBackend {
public:
    const BackendDescriptor& descriptor() const override { return descriptor_; }
    bool needs_pixels() const override { return true; }

protected:
    Eigen::VectorXf compute(const std::string&, const ImageBuffer* img) const override {
        return reference_embed(*img);
    }

private:
    BackendDescriptor descriptor_{"reference", 0, kReferenceDim,
                                  "none (deterministic 16x16 grayscale thumbnail)"};
};

}  // namespace

const std::vector<BackendDescriptor>& model_catalog() {
    static const std::vector<BackendDescriptor> models{
        {"model-a", 224, 2048, "ResNet-50; VGGFace2"},
        {"model-b", 224, 2048, "ResNet-50; MS-Celeb-1M, fine-tuned on VGGFace2"},
        {"model-c", 224, 2048, "SENet-50; VGGFace2"},
        {"model-d", 224, 2048, "SENet-50; MS-Celeb-1M, fine-tuned on VGGFace2"},
        {"model-e", 112, 512, "LResNet50E-IR; MS-Celeb-1M"},
        {"model-f", 112, 512, "LResNet50E-IR; MS-Celeb-1M, fine-tuned on VGGFace2"},
        {"model-g", 112, 512, "LResNet100E-IR; MS-Celeb-1M"},
        {"model-h", 112, 512, "LResNet100E-IR; MS-Celeb-1M, fine-tuned on VGGFace2"},
    };
    return models;
}

std::optional<BackendDescriptor> find_model(std::string_view name) {
    for (const auto& m : model_catalog()) {
        if (m.name == name) return m;
    }
    return std::nullopt;
}

EmbeddingSet::EmbeddingSet(int dim, BackendDescriptor backend)
    : dim_(dim), backend_(std::move(backend)) {
    if (dim < 1) throw Error(ErrorCode::DimMismatch, "embedding dim must be positive");
}

void EmbeddingSet::add(Embedding e) {
    if (e.vector.size() != dim_) {
        throw Error(ErrorCode::DimMismatch, "embedding '" + e.image_id + "' has dim " +
                                                std::to_string(e.vector.size()) + ", set expects " +
                                                std::to_string(dim_));
    }
    if (!all_finite(e.vector)) {
        throw Error(ErrorCode::NonFiniteEmbedding, "embedding '" + e.image_id + "' contains NaN/Inf");
    }
    if (index_.contains(e.image_id)) {
        throw Error(ErrorCode::DuplicateImageId, "duplicate embedding for '" + e.image_id + "'");
    }
    index_.emplace(e.image_id, entries_.size());
    entries_.push_back(std::move(e));
}

const Embedding* EmbeddingSet::find(const std::string& image_id) const {
    auto it = index_.find(image_id);
    return it == index_.end() ? nullptr : &entries_[it->second];
}

bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
    if (a.dim_ != b.dim_ || a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
        const auto& x = a.entries_[i];
        const auto& y = b.entries_[i];
        if (x.image_id != y.image_id || x.subject_id != y.subject_id) return false;
        if (std::memcmp(x.vector.data(), y.vector.data(), sizeof(float) * a.dim_) != 0) return false;
    }
    return true;
}

std::string encode_embeddings(const EmbeddingSet& set) {
    std::string out;
    out.reserve(22 + set.size() * (8 + 4 * static_cast<std::size_t>(set.dim())));
    ByteWriter w(out);
    w.put_bytes(std::string_view(kEmbeddingMagic, sizeof kEmbeddingMagic));
    w.put(kEmbeddingVersion);
    w.put(static_cast<std::uint32_t>(set.dim()));
    w.put(static_cast<std::uint64_t>(set.size()));
    for (const auto& e : set.entries()) {
        put_string(w, e.image_id, "image_id");
        put_string(w, e.subject_id, "subject_id");
        for (Eigen::Index i = 0; i < e.vector.size(); ++i) w.put_f32(e.vector[i]);
    }
    return out;
}

EmbeddingSet decode_embeddings(std::string_view bytes) {
    if (bytes.size() < sizeof kEmbeddingMagic ||
        std::memcmp(bytes.data(), kEmbeddingMagic, sizeof kEmbeddingMagic) != 0) {
        throw Error(ErrorCode::BadMagic, "not an LRFR-EMB embedding file");
    }
    ByteReader r(bytes.substr(sizeof kEmbeddingMagic));
    const auto version = r.get<std::uint16_t>();
    if (version != kEmbeddingVersion) {
        throw Error(ErrorCode::VersionUnsupported,
                    "embedding file version " + std::to_string(version) + " is not supported");
    }
    const auto dim = r.get<std::uint32_t>();
    const auto count = r.get<std::uint64_t>();
    if (dim == 0 || dim > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
        throw Error(ErrorCode::DimMismatch, "invalid dim " + std::to_string(dim));
    }
    // Each record needs at least 4 + 4*dim bytes; reject impossible counts before allocating.
    if (count > r.remaining() / (4 + 4ULL * dim) + 1) {
        throw Error(ErrorCode::TruncatedFile, "record count exceeds file size");
    }

    EmbeddingSet set(static_cast<int>(dim));
    for (std::uint64_t i = 0; i < count; ++i) {
        Embedding e;
        e.image_id = std::string(r.get_bytes(r.get<std::uint16_t>()));
        e.subject_id = std::string(r.get_bytes(r.get<std::uint16_t>()));
        e.vector.resize(dim);
        for (std::uint32_t k = 0; k < dim; ++k) e.vector[k] = r.get_f32();
        set.add(std::move(e));
    }
    if (r.remaining() != 0) {
        throw Error(ErrorCode::DimMismatch, std::to_string(r.remaining()) +
                                                " bytes left after the last record; record length "
                                                "does not match header dim");
    }
    return set;
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
    detail::write_file(path, encode_embeddings(set));
}

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
    EmbeddingSet set = decode_embeddings(detail::read_file(path));
    set.set_backend({"file:" + path.string(), 0, set.dim(), ""});
    return set;
}

Eigen::VectorXf reference_embed(const ImageBuffer& img) {
    const ImageBuffer thumb = resize(to_grayscale(img), 16, 16, ResizeKernel::Area);
    Eigen::VectorXf v(kReferenceDim);
    const auto px = thumb.pixels();
    double sum = 0.0;
    for (int i = 0; i < kReferenceDim; ++i) sum += px[i];
    const double mean = sum / kReferenceDim;
    for (int i = 0; i < kReferenceDim; ++i) v[i] = static_cast<float>(px[i] - mean);
    return v;
}

Eigen::VectorXf EmbeddingBackend::embed(const std::string& image_id, const ImageBuffer* img) const {
    if (needs_pixels() && img == nullptr) {
        throw Error(ErrorCode::InvalidArgument,
                    "backend '" + descriptor().name + "' needs pixels for '" + image_id + "'");
    }
    Eigen::VectorXf v = compute(image_id, img);
    if (v.size() != descriptor().dim) {
        throw Error(ErrorCode::DimMismatch, "backend '" + descriptor().name + "' returned dim " +
                                                std::to_string(v.size()) + ", declared " +
                                                std::to_string(descriptor().dim));
    }
    if (!all_finite(v)) {
        throw Error(ErrorCode::NonFiniteEmbedding, "backend '" + descriptor().name +
                                                       "' produced NaN/Inf for '" + image_id + "'");
    }
    return v;
}

FileBackend::FileBackend(EmbeddingSet set, std::string name)
    : set_(std::move(set)), descriptor_{std::move(name), 0, set_.dim(), ""} {}

std::shared_ptr<FileBackend> FileBackend::open(const std::filesystem::path& path) {
    return std::make_shared<FileBackend>(read_embeddings(path), "file:" + path.string());
}

Eigen::VectorXf FileBackend::compute(const std::string& image_id, const ImageBuffer*) const {
    const Embedding* e = set_.find(image_id);
    if (!e) {
        throw Error(ErrorCode::MissingEmbedding,
                    "no embedding for '" + image_id + "' in " + descriptor_.name);
    }
    return e->vector;
}

BackendRegistry BackendRegistry::with_builtins() {
    BackendRegistry r;
    r.add("reference", [] { return std::make_shared<const ReferenceBackend>(); });
    return r;
}

void BackendRegistry::add(std::string name, BackendFactory factory) {
    factories_[std::move(name)] = std::move(factory);
}

bool BackendRegistry::contains(std::string_view name) const {
    return factories_.find(name) != factories_.end();
}

BackendPtr BackendRegistry::resolve(std::string_view name) const {
    if (name.starts_with("file:")) {
        const std::string_view path = name.substr(5);
        if (path.empty()) throw Error(ErrorCode::UnknownBackend, "file backend needs a path");
        return FileBackend::open(std::filesystem::path(std::string(path)));
    }
    auto it = factories_.find(name);
    if (it == factories_.end()) {
        throw Error(ErrorCode::UnknownBackend, "unknown embedding backend '" + std::string(name) + "'");
    }
    return it->second();
}

BackendPtr resolve_backend(std::string_view name, const BackendRegistry& registry) {
    return registry.resolve(name);
}

}  // namespace lrfr
