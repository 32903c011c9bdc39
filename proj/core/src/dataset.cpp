#include "fjlt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "byte_io.hpp"
#include "fjlt/errors.hpp"
#include "fjlt/hadamard.hpp"
#include "fjlt/random.hpp"

namespace fjlt {

VectorDataset::VectorDataset(std::size_t n, std::size_t count) : n_(n), values_(n * count, 0.0) {}

VectorDataset::VectorDataset(std::size_t n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
    if (n_ == 0 ? !values_.empty() : values_.size() % n_ != 0)
        throw std::invalid_argument("VectorDataset: " + std::to_string(values_.size()) +
                                    " values do not form rows of length " + std::to_string(n_));
}

std::vector<std::vector<double>> VectorDataset::rows() const {
    std::vector<std::vector<double>> out;
    out.reserve(count());
    for (std::size_t i = 0; i < count(); ++i) out.emplace_back(row(i).begin(), row(i).end());
    return out;
}

void write_dataset_bin(std::ostream& out, const VectorDataset& data) {
    if (data.n() > 0xffffffffu) throw std::invalid_argument("write_dataset_bin: n exceeds u32");
    out.write("FJLV", 4);
    detail::write_le<std::uint16_t>(out, kDatasetFormatVersion);
    detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.n()));
    detail::write_le<std::uint64_t>(out, data.count());
    for (double v : data.values()) detail::write_le<double>(out, v);
    if (!out) throw std::runtime_error("write_dataset_bin: stream error");
}

VectorDataset read_dataset_bin(std::istream& in) {
    detail::expect_magic(in, "FJLV");
    const auto version = detail::read_le<std::uint16_t>(in, "version");
    if (version != kDatasetFormatVersion)
        throw FormatError("unsupported dataset version " + std::to_string(version));
    const auto n = detail::read_le<std::uint32_t>(in, "n");
    const auto count = detail::read_le<std::uint64_t>(in, "count");
    if (n == 0 && count != 0) throw FormatError("dataset with n=0 must be empty");
    std::vector<double> values;
    const std::uint64_t total = static_cast<std::uint64_t>(n) * count;
    values.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(total, 1u << 24)));
    for (std::uint64_t i = 0; i < total; ++i) values.push_back(detail::read_le<double>(in, "payload"));
    if (in.peek() != std::char_traits<char>::eof())
        throw FormatError("trailing bytes after dataset payload");
    return VectorDataset(n, std::move(values));
}

void write_dataset_csv(std::ostream& out, const VectorDataset& data) {
    char buf[32];
    for (std::size_t i = 0; i < data.count(); ++i) {
        const auto row = data.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", row[j]);
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

VectorDataset read_dataset_csv(std::istream& in) {
    std::vector<double> values;
    std::size_t n = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::size_t fields = 0;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str())
                throw FormatError("csv line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            values.push_back(v);
            ++fields;
        }
        if (n == 0) n = fields;
        if (fields != n)
            throw FormatError("csv line " + std::to_string(line_no) + " has " +
                              std::to_string(fields) + " fields, expected " + std::to_string(n));
    }
    return VectorDataset(n, std::move(values));
}

FileFormat parse_file_format(const std::string& text) {
    if (text == "bin") return FileFormat::bin;
    if (text == "csv") return FileFormat::csv;
    throw std::invalid_argument("unknown format '" + text + "' (expected bin or csv)");
}

void save_dataset(const std::filesystem::path& path, const VectorDataset& data, FileFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (format == FileFormat::bin)
        write_dataset_bin(out, data);
    else
        write_dataset_csv(out, data);
}

VectorDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[4] = {};
    in.read(magic, 4);
    const bool is_bin = in.gcount() == 4 && std::string(magic, 4) == "FJLV";
    in.clear();
    in.seekg(0);
    return is_bin ? read_dataset_bin(in) : read_dataset_csv(in);
}

DatasetKind parse_dataset_kind(const std::string& text) {
    if (text == "unit-sphere") return DatasetKind::unit_sphere;
    if (text == "sparse") return DatasetKind::sparse;
    if (text == "clustered") return DatasetKind::clustered;
    if (text == "near-duplicate") return DatasetKind::near_duplicate;
    throw std::invalid_argument("unknown dataset kind '" + text +
                                "' (expected unit-sphere, sparse, clustered, near-duplicate)");
}

const char* to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::unit_sphere: return "unit-sphere";
        case DatasetKind::sparse: return "sparse";
        case DatasetKind::clustered: return "clustered";
        case DatasetKind::near_duplicate: return "near-duplicate";
    }
    return "?";
}

namespace {

void normalize(std::span<double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq == 0.0) return;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
}

void gaussian_unit(Rng& rng, std::span<double> v) {
    do {
        rng.fill_normal(v);
        normalize(v);
    } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
}

}  // namespace

VectorDataset generate_dataset(const GenOptions& o) {
    if (o.n == 0) throw std::invalid_argument("gen: n must be >= 1");
    if (o.kind == DatasetKind::sparse && (o.sparsity < 1 || o.sparsity > o.n))
        throw std::invalid_argument("gen: sparsity must lie in [1, n]");
    if (o.kind == DatasetKind::clustered && o.clusters < 1)
        throw std::invalid_argument("gen: clusters must be >= 1");

    VectorDataset data(o.n, o.count);
    const std::uint64_t center_stream = derive_seed(o.seed, ~std::uint64_t{0});

    std::vector<double> centers;
    if (o.kind == DatasetKind::clustered) {
        centers.resize(o.clusters * o.n);
        for (std::size_t c = 0; c < o.clusters; ++c) {
            Rng rng(derive_seed(center_stream, c));
            gaussian_unit(rng, std::span<double>(centers.data() + c * o.n, o.n));
        }
    }

    for (std::size_t i = 0; i < o.count; ++i) {
        auto row = data.row(i);
        switch (o.kind) {
            case DatasetKind::unit_sphere: {
                Rng rng(derive_seed(o.seed, i));
                gaussian_unit(rng, row);
                break;
            }
            case DatasetKind::sparse: {
                Rng rng(derive_seed(o.seed, i));
                // Partial Fisher-Yates over the coordinates.
                std::vector<std::uint32_t> perm(o.n);
                for (std::size_t j = 0; j < o.n; ++j) perm[j] = static_cast<std::uint32_t>(j);
                for (std::size_t j = 0; j < o.sparsity; ++j)
                    std::swap(perm[j], perm[j + rng.below(o.n - j)]);
                std::vector<double> vals(o.sparsity);
                gaussian_unit(rng, vals);
                for (std::size_t j = 0; j < o.sparsity; ++j) row[perm[j]] = vals[j];
                break;
            }
            case DatasetKind::clustered: {
                Rng rng(derive_seed(o.seed, i));
                const auto c = rng.below(o.clusters);
                std::vector<double> noise(o.n);
                gaussian_unit(rng, noise);
                for (std::size_t j = 0; j < o.n; ++j)
                    row[j] = centers[c * o.n + j] + o.spread * noise[j];
                normalize(row);
                break;
            }
            case DatasetKind::near_duplicate: {
                // Rows 2m and 2m+1 share base vector m; the odd row is perturbed
                // by a vector of norm `spread`.
                Rng base_rng(derive_seed(o.seed, i / 2));
                gaussian_unit(base_rng, row);
                if (i % 2 == 1) {
                    Rng rng(derive_seed(o.seed, i));
                    std::vector<double> noise(o.n);
                    gaussian_unit(rng, noise);
                    for (std::size_t j = 0; j < o.n; ++j) row[j] += o.spread * noise[j];
                }
                break;
            }
        }
    }
    return data;
}

PaddedDataset pad_dataset(const VectorDataset& data) {
    PaddedDataset out;
    out.original_n = data.n();
    if (data.n() == 0 || is_power_of_two(data.n())) {
        out.data = data;
        return out;
    }
    const std::size_t padded = next_power_of_two(data.n());
    VectorDataset result(padded, data.count());
    for (std::size_t i = 0; i < data.count(); ++i) {
        auto src = data.row(i);
        std::copy(src.begin(), src.end(), result.row(i).begin());
    }
    out.data = std::move(result);
    return out;
}

}  // namespace fjlt
