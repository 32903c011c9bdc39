#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fjlt {

/// Dense row-major collection of `count` vectors of dimension n.
class VectorDataset {
public:
    VectorDataset() = default;
    VectorDataset(std::size_t n, std::size_t count);
    VectorDataset(std::size_t n, std::vector<double> values);

    std::size_t n() const noexcept { return n_; }
    std::size_t count() const noexcept { return n_ == 0 ? 0 : values_.size() / n_; }

    std::span<double> row(std::size_t i) { return {values_.data() + i * n_, n_}; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }
    std::vector<std::vector<double>> rows() const;
    const std::vector<double>& values() const noexcept { return values_; }

    friend bool operator==(const VectorDataset&, const VectorDataset&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

// Binary layout, little endian:
//   magic "FJLV" | version u16 | n u32 | count u64 | count*n float64 row-major
inline constexpr std::uint16_t kDatasetFormatVersion = 1;

void write_dataset_bin(std::ostream& out, const VectorDataset& data);
VectorDataset read_dataset_bin(std::istream& in);

/// One vector per line, comma separated, "%.17g" precision (round-trips).
void write_dataset_csv(std::ostream& out, const VectorDataset& data);
VectorDataset read_dataset_csv(std::istream& in);

enum class FileFormat { bin, csv };
FileFormat parse_file_format(const std::string& text);

void save_dataset(const std::filesystem::path& path, const VectorDataset& data, FileFormat format);
/// Detects the format from the magic bytes.
VectorDataset load_dataset(const std::filesystem::path& path);

enum class DatasetKind { unit_sphere, sparse, clustered, near_duplicate };
DatasetKind parse_dataset_kind(const std::string& text);
const char* to_string(DatasetKind kind);

struct GenOptions {
    DatasetKind kind = DatasetKind::unit_sphere;
    std::size_t n = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::size_t sparsity = 1;      // nonzeros per vector for kind=sparse
    std::size_t clusters = 8;      // centers for kind=clustered
    double spread = 0.1;           // cluster radius / duplicate perturbation size
};

/// Deterministic synthetic corpora. Vector i draws from derive_seed(seed, i),
/// so the dataset is independent of generation order. Every kind except
/// near_duplicate produces unit vectors.
VectorDataset generate_dataset(const GenOptions& options);

struct PaddedDataset {
    VectorDataset data;
    std::size_t original_n = 0;
};

/// Zero-pads every vector to the next power of two. Norms are unchanged.
PaddedDataset pad_dataset(const VectorDataset& data);

}  // namespace fjlt
