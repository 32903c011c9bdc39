#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fjlt/dataset.hpp"
#include "fjlt/report.hpp"
#include "fjlt/transform.hpp"

// Experiment drivers behind `fjlt verify ...`.
//
// Each driver is a pure function of its config block: the CLI renders the
// parsed options into a Report config, and run_verify() reads only that
// block. Re-running from a report header therefore reproduces the report.
namespace fjlt::cli {

/// Seeds for the j-th transform / estimator stream of an experiment.
std::uint64_t phi_seed(std::uint64_t seed, std::size_t k, std::uint64_t j);
std::uint64_t estimator_seed(std::uint64_t seed, std::size_t k, std::uint64_t j);

/// How the target dimensions were chosen; echoed for provenance only.
struct KSource {
    bool from_formula = false;
    TransformParams params;
    bool clamped = false;
};

struct RipConfig {
    std::size_t n = 64;
    std::vector<std::size_t> ks{16};
    std::size_t r = 2;
    std::uint64_t budget = 20000;
    std::uint64_t phi_seeds = 1;
    bool full = false;  // k = n, every row once
    SamplingMode mode = SamplingMode::with_replacement;
    std::uint64_t seed = 0;
    KSource k_source;
};

struct EAlphaConfig {
    std::size_t n = 64;
    std::vector<std::size_t> ks{16};
    std::optional<double> alpha;   // default 1/sqrt(r)
    std::size_t r = 4;
    std::uint64_t samples = 64;
    std::uint64_t ascent_iters = 32;
    std::uint64_t phi_seeds = 1;
    bool full = false;
    SamplingMode mode = SamplingMode::with_replacement;
    std::uint64_t seed = 0;
    KSource k_source;
};

struct DistortConfig {
    std::string input;             // dataset path; empty -> generate
    DatasetKind kind = DatasetKind::unit_sphere;
    std::size_t n = 256;
    std::size_t count = 100;
    std::size_t sparsity = 4;
    std::vector<std::size_t> ks{32};
    double delta = 0.5;
    std::uint64_t pairs = 0;       // >0: sample this many difference vectors
    bool all_pairs = false;
    std::uint64_t phi_seeds = 1;
    SamplingMode mode = SamplingMode::with_replacement;
    std::uint64_t seed = 0;
    KSource k_source;
};

struct CrossConfig {
    std::size_t n = 64;
    std::size_t k = 16;
    std::size_t r = 8;
    std::uint64_t trials = 100000;
    std::uint64_t vectors = 10;
    SamplingMode mode = SamplingMode::with_replacement;
    std::uint64_t seed = 0;
};

struct ConcConfig {
    std::size_t n = 256;
    std::size_t k = 32;
    std::size_t r = 32;            // light part of a random unit vector split at r
    std::uint64_t trials = 10000;
    std::uint64_t vectors = 20;
    SamplingMode mode = SamplingMode::with_replacement;
    std::uint64_t seed = 0;
};

Report to_config(const RipConfig& c);
Report to_config(const EAlphaConfig& c);
Report to_config(const DistortConfig& c);
Report to_config(const CrossConfig& c);
Report to_config(const ConcConfig& c);

/// Runs the experiment named by the `command` key of `config` and returns
/// the config block plus results and table. `validation` in the result block
/// is "pass" or "fail: <reason>".
Report run_verify(const Report& config, unsigned threads = 1);

bool validation_passed(const Report& report);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// FNV-1a over the raw bytes of the dataset values; identifies input files
/// in report headers.
std::string dataset_fingerprint(const VectorDataset& data);

/// Difference vectors y_i - y_j for `pairs` sampled pairs (i != j), or for all
/// i < j when pairs == 0.
std::vector<RealVector> difference_vectors(const VectorDataset& data, std::uint64_t pairs,
                                           std::uint64_t seed);

}  // namespace fjlt::cli
