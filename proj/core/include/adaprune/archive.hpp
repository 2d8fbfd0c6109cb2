#pragma once

#include "adaprune/errors.hpp"
#include "adaprune/matrix.hpp"
#include "adaprune/model.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace adaprune {

// Tensor archive layout:
//   "ADPR1\n" | u64 LE manifest length | UTF-8 JSON manifest | payload
// The payload is concatenated little-endian IEEE-754 doubles, row-major.
// docs/formats.md describes the manifest fields.

inline constexpr std::string_view kArchiveMagic = "ADPR1\n";

class ArchiveError : public DataError {
public:
    enum class Kind { bad_magic, truncated, bounds, manifest, io };

    ArchiveError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

struct NamedTensor {
    std::string name;
    /// Declared shape; 1-D tensors load as a single-row matrix.
    std::vector<std::size_t> shape;
    Matrix value;
};

struct TensorArchive {
    std::string name;
    std::map<std::string, std::string> metadata;
    std::vector<NamedTensor> tensors;

    const NamedTensor* find(std::string_view tensor_name) const;
};

std::string encode_archive(const TensorArchive& archive);
TensorArchive decode_archive(std::string_view bytes);

void save_tensors(const TensorArchive& archive, const std::filesystem::path& path);
TensorArchive load_tensors(const std::filesystem::path& path);

/// Checkpoint archives carry a "layers" topology in the manifest on top of
/// the tensor table.
std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_archive(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_archive(const std::filesystem::path& path);

/// Single-matrix archives (calibration sets, embeddings).
void save_matrix(const Matrix& m, std::string_view tensor_name, const std::filesystem::path& path);
Matrix load_matrix(const std::filesystem::path& path, std::string_view tensor_name);

/// FNV-1a over the raw payload bytes of every tensor, in archive order.
std::uint64_t payload_checksum(const TensorArchive& archive);

}  // namespace adaprune
