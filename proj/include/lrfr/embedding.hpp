#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "lrfr/image.hpp"

namespace lrfr {

/// Metadata about the network (or stand-in) that produced a set of vectors.
/// input_size 0 means the backend accepts any image size.
struct BackendDescriptor {
    std::string name;
    int input_size = 0;
    int dim = 0;
    std::string training_data;

    friend bool operator==(const BackendDescriptor&, const BackendDescriptor&) = default;
};

/// The deep models evaluated in the original study, by catalog name
/// "model-a" ... "model-h". They never run in-process; their vectors arrive
/// through the file backend.
const std::vector<BackendDescriptor>& model_catalog();
std::optional<BackendDescriptor> find_model(std::string_view name);

struct Embedding {
    std::string image_id;
    std::string subject_id;
    Eigen::VectorXf vector;
};

/// Identity-tagged vectors of one fixed dimension. Insertion order is kept;
/// image ids are unique.
class EmbeddingSet {
public:
    explicit EmbeddingSet(int dim, BackendDescriptor backend = {});

    /// Throws DimMismatch, NonFiniteEmbedding or DuplicateImageId.
    void add(Embedding e);

    int dim() const noexcept { return dim_; }
    const BackendDescriptor& backend() const noexcept { return backend_; }
    void set_backend(BackendDescriptor backend) { backend_ = std::move(backend); }
    const std::vector<Embedding>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    const Embedding* find(const std::string& image_id) const;

    /// Value equality of dimension and entries (the descriptor is metadata
    /// and is not part of the on-disk format).
    friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b);

private:
    int dim_;
    BackendDescriptor backend_;
    std::vector<Embedding> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Binary format, little-endian, no padding:
//   "LRFR-EMB" | u16 version (=1) | u32 dim | u64 count |
//   count x { u16 id_len | id | u16 subj_len | subj | dim x f32 }
inline constexpr char kEmbeddingMagic[8] = {'L', 'R', 'F', 'R', '-', 'E', 'M', 'B'};
inline constexpr std::uint16_t kEmbeddingVersion = 1;

std::string encode_embeddings(const EmbeddingSet& set);
/// Throws BadMagic, VersionUnsupported, TruncatedFile, DimMismatch
/// (bytes left over after `count` records), NonFiniteEmbedding.
EmbeddingSet decode_embeddings(std::string_view bytes);

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet read_embeddings(const std::filesystem::path& path);

inline constexpr int kReferenceDim = 256;

/// Grayscale, area-resize to 16x16, flatten row-major, subtract the mean.
/// A crude stand-in for a deep model so pipelines can run without weights.
Eigen::VectorXf reference_embed(const ImageBuffer& img);

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;

    virtual const BackendDescriptor& descriptor() const = 0;
    /// False for lookup backends that key on image id alone.
    virtual bool needs_pixels() const = 0;

    /// Runs the backend and enforces its declared dimension and finiteness.
    /// Safe to call concurrently.
    Eigen::VectorXf embed(const std::string& image_id, const ImageBuffer* img) const;

protected:
    virtual Eigen::VectorXf compute(const std::string& image_id, const ImageBuffer* img) const = 0;
};

using BackendPtr = std::shared_ptr<const EmbeddingBackend>;
using BackendFactory = std::function<BackendPtr()>;

/// Serves precomputed vectors by image id; read-only after construction.
class FileBackend final : public EmbeddingBackend {
public:
    explicit FileBackend(EmbeddingSet set, std::string name);
    static std::shared_ptr<FileBackend> open(const std::filesystem::path& path);

    const BackendDescriptor& descriptor() const override { return descriptor_; }
    bool needs_pixels() const override { return false; }
    const EmbeddingSet& set() const noexcept { return set_; }

protected:
    Eigen::VectorXf compute(const std::string& image_id, const ImageBuffer* img) const override;

private:
    EmbeddingSet set_;
    BackendDescriptor descriptor_;
};

class BackendRegistry {
public:
    /// A registry holding the built-in "reference" backend.
    static BackendRegistry with_builtins();

    void add(std::string name, BackendFactory factory);
    bool contains(std::string_view name) const;

    /// Resolves a registered name, or "file:<path>" for a precomputed set.
    /// Throws UnknownBackend.
    BackendPtr resolve(std::string_view name) const;

private:
    std::map<std::string, BackendFactory, std::less<>> factories_;
};

BackendPtr resolve_backend(std::string_view name,
                           const BackendRegistry& registry = BackendRegistry::with_builtins());

}  // namespace lrfr
