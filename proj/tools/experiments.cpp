#include "experiments.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fjlt/errors.hpp"
#include "fjlt/estimators.hpp"
#include "fjlt/heavy_light.hpp"
#include "fjlt/random.hpp"

namespace fjlt::cli {

namespace {

constexpr std::uint64_t kEstimatorStream = 0xE57;
constexpr std::uint64_t kVectorStream = 0xC0FFEE;
constexpr std::uint64_t kPairStream = 0xDA12;

std::string join_list(const std::vector<std::size_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

void common_header(Report& r, const std::string& command, std::uint64_t seed) {
    r.config("command", command);
    r.config("generator", std::uint64_t{kGeneratorId});
    r.config("seed", seed);
}

void echo_k_source(Report& r, const KSource& s) {
    r.config("k_source", s.from_formula ? "formula" : "explicit");
    if (!s.from_formula) return;
    r.config("delta", s.params.delta);
    r.config("points", s.params.points);
    r.config("c_k", s.params.c_k);
    r.config("k_clamped", bool_text(s.clamped));
}

// Typed access to a config block.
class ConfigReader {
public:
    explicit ConfigReader(const Report& r) : report_(r) {}

    bool has(const std::string& key) const { return report_.find_config(key).has_value(); }

    std::string str(const std::string& key) const {
        auto v = report_.find_config(key);
        if (!v) throw std::invalid_argument("report config is missing key '" + key + "'");
        return *v;
    }
    std::uint64_t u64(const std::string& key) const {
        const auto s = str(key);
        std::size_t pos = 0;
        const auto v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("config key '" + key + "': bad integer");
        return v;
    }
    double dbl(const std::string& key) const { return parse_double(str(key)); }
    bool flag(const std::string& key) const {
        const auto s = str(key);
        if (s == "true") return true;
        if (s == "false") return false;
        throw std::invalid_argument("config key '" + key + "': expected true/false");
    }
    std::vector<std::size_t> list(const std::string& key) const {
        std::vector<std::size_t> out;
        std::stringstream ss(str(key));
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(std::stoull(cell));
        if (out.empty()) throw std::invalid_argument("config key '" + key + "' is empty");
        return out;
    }

private:
    const Report& report_;
};

Report copy_config(const Report& config) {
    Report out;
    for (const auto& [k, v] : config.config_entries()) out.config(k, v);
    return out;
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string key_for(std::size_t k, const std::string& name) {
    return "k" + std::to_string(k) + "." + name;
}

RowIndexSet draw_rows(std::size_t n, std::size_t k, bool full, SamplingMode mode,
                      std::uint64_t seed) {
    if (full) return RowIndexSet::full(n);
    return sample_transform(n, k, seed, mode).rows();
}

void finish_validation(Report& out, const std::vector<std::string>& failures) {
    if (failures.empty()) {
        out.result("validation", "pass");
        return;
    }
    std::string msg = "fail:";
    for (const auto& f : failures) msg += " " + f + ";";
    out.result("validation", msg);
}

Report run_rip(const Report& config, unsigned /*threads*/) {
    const ConfigReader c(config);
    const auto seed = c.u64("seed");
    const auto n = c.u64("n");
    const bool full = c.flag("full");
    const auto ks = full ? std::vector<std::size_t>{n} : c.list("k");
    const auto r = c.u64("r");
    const auto budget = c.u64("budget");
    const auto phis = c.u64("phi_seeds");
    const auto mode = parse_sampling_mode(c.str("mode"));

    Report out = copy_config(config);
    out.set_table({"k", "phi", "delta_hat", "exhaustive", "supports_checked", "witness_support"});
    std::vector<std::string> failures;
    std::vector<double> means;
    for (auto k : ks) {
        std::vector<double> values;
        for (std::uint64_t j = 0; j < phis; ++j) {
            const auto rows = draw_rows(n, k, full, mode, phi_seed(seed, k, j));
            const auto rep = rip_constant_bruteforce(rows, k, r, budget, estimator_seed(seed, k, j));
            const double again = rip_support_deviation(RowGram(rows, k), rep.witness_support);
            if (std::abs(again - rep.delta_hat) > 1e-9)
                failures.push_back("witness mismatch at k=" + std::to_string(k));
            if (!rep.all_converged)
                failures.push_back("spectral norm did not converge at k=" + std::to_string(k));
            values.push_back(rep.delta_hat);
            out.add_row({std::to_string(k), std::to_string(j), format_double(rep.delta_hat),
                         bool_text(rep.exhaustive), std::to_string(rep.supports_checked),
                         join_indices(rep.witness_support)});
        }
        means.push_back(mean_of(values));
        out.result(key_for(k, "mean_delta_hat"), means.back());
        out.result(key_for(k, "max_delta_hat"), *std::max_element(values.begin(), values.end()));
        out.result(key_for(k, "std_delta_hat"), std_of(values));
    }
    if (ks.size() >= 2 && std::all_of(means.begin(), means.end(), [](double m) { return m > 0; })) {
        std::vector<double> kx(ks.begin(), ks.end());
        out.result("loglog_slope", loglog_slope(kx, means));
    }
    finish_validation(out, failures);
    return out;
}

Report run_ealpha(const Report& config, unsigned threads) {
    const ConfigReader c(config);
    const auto seed = c.u64("seed");
    const auto n = c.u64("n");
    const bool full = c.flag("full");
    const auto ks = full ? std::vector<std::size_t>{n} : c.list("k");
    const double alpha = c.dbl("alpha");
    const auto samples = c.u64("samples");
    const auto ascent = c.u64("ascent_iters");
    const auto phis = c.u64("phi_seeds");
    const auto mode = parse_sampling_mode(c.str("mode"));

    Report out = copy_config(config);
    out.set_table({"k", "phi", "lower_bound", "witness_linf_sq", "witness_support_size"});
    std::vector<std::string> failures;
    std::vector<double> means;
    for (auto k : ks) {
        std::vector<double> values;
        std::vector<double> linf;
        for (std::uint64_t j = 0; j < phis; ++j) {
            const auto rows = draw_rows(n, k, full, mode, phi_seed(seed, k, j));
            const auto est =
                estimate_e_alpha(rows, k, alpha, samples, ascent, estimator_seed(seed, k, j), threads);
            if (!in_feasible_set(est.witness, alpha))
                failures.push_back("infeasible witness at k=" + std::to_string(k));
            const double again = e_alpha_objective(RowGram(rows, k), est.witness);
            if (std::abs(again - est.lower_bound) > 1e-9)
                failures.push_back("witness mismatch at k=" + std::to_string(k));
            values.push_back(est.lower_bound);
            linf.push_back(est.witness_linf_sq);
            const auto support = static_cast<std::size_t>(
                std::count_if(est.witness.begin(), est.witness.end(), [](double v) { return v != 0.0; }));
            out.add_row({std::to_string(k), std::to_string(j), format_double(est.lower_bound),
                         format_double(est.witness_linf_sq), std::to_string(support)});
        }
        means.push_back(mean_of(values));
        out.result(key_for(k, "mean_lower_bound"), means.back());
        out.result(key_for(k, "std_lower_bound"), std_of(values));
        out.result(key_for(k, "mean_witness_linf_sq"), mean_of(linf));
    }
    out.result("alpha", alpha);
    out.result("alpha_sq", alpha * alpha);
    if (ks.size() >= 2 && std::all_of(means.begin(), means.end(), [](double m) { return m > 0; })) {
        std::vector<double> kx(ks.begin(), ks.end());
        out.result("loglog_slope", loglog_slope(kx, means));
    }
    finish_validation(out, failures);
    return out;
}

Report run_distort(const Report& config, unsigned threads) {
    const ConfigReader c(config);
    const auto seed = c.u64("seed");
    const auto ks = c.list("k");
    const double delta = c.dbl("delta");
    const auto pairs = c.u64("pairs");
    const bool all_pairs = c.flag("all_pairs");
    const auto phis = c.u64("phi_seeds");
    const auto mode = parse_sampling_mode(c.str("mode"));

    VectorDataset data;
    const auto input = c.str("input");
    if (input != "-") {
        data = load_dataset(input);
        if (dataset_fingerprint(data) != c.str("input_fingerprint"))
            throw std::invalid_argument("input dataset " + input +
                                        " does not match the fingerprint in the config");
    } else {
        GenOptions g;
        g.kind = parse_dataset_kind(c.str("kind"));
        g.n = c.u64("n");
        g.count = c.u64("count");
        g.sparsity = c.u64("sparsity");
        g.seed = derive_seed(seed, kVectorStream);
        data = generate_dataset(g);
    }
    if (!is_power_of_two(data.n()))
        throw std::invalid_argument("dataset dimension " + std::to_string(data.n()) +
                                    " is not a power of two; run `fjlt pad` first");

    std::vector<RealVector> vectors;
    if (pairs > 0 || all_pairs)
        vectors = difference_vectors(data, all_pairs ? 0 : pairs, derive_seed(seed, kPairStream));
    else
        vectors = data.rows();

    Report out = copy_config(config);
    out.set_table({"k", "phi", "ratio_min", "ratio_max", "ratio_mean", "max_abs_deviation",
                   "success_fraction", "skipped"});
    std::vector<double> means;
    for (auto k : ks) {
        std::vector<double> devs;
        for (std::uint64_t j = 0; j < phis; ++j) {
            const auto t = sample_transform(data.n(), k, phi_seed(seed, k, j), mode);
            const auto d = distortion_stats(t, vectors, delta, threads);
            devs.push_back(d.max_abs_deviation);
            out.add_row({std::to_string(k), std::to_string(j), format_double(d.min),
                         format_double(d.max), format_double(d.mean),
                         format_double(d.max_abs_deviation), format_double(d.success_fraction),
                         std::to_string(d.skipped.size())});
            if (phis == 1) {
                out.result(key_for(k, "ratio_min"), d.min);
                out.result(key_for(k, "ratio_max"), d.max);
                out.result(key_for(k, "ratio_mean"), d.mean);
                out.result(key_for(k, "success_fraction"), d.success_fraction);
            }
        }
        means.push_back(mean_of(devs));
        out.result(key_for(k, "max_abs_deviation"), means.back());
    }
    out.result("vectors", std::uint64_t{vectors.size()});
    if (ks.size() >= 2 && std::all_of(means.begin(), means.end(), [](double m) { return m > 0; })) {
        std::vector<double> kx(ks.begin(), ks.end());
        out.result("loglog_slope", loglog_slope(kx, means));
    }
    finish_validation(out, {});
    return out;
}

VectorDataset unit_vectors(std::size_t n, std::uint64_t count, std::uint64_t seed) {
    GenOptions g;
    g.kind = DatasetKind::unit_sphere;
    g.n = n;
    g.count = count;
    g.seed = derive_seed(seed, kVectorStream);
    return generate_dataset(g);
}

Report run_cross(const Report& config, unsigned threads) {
    const ConfigReader c(config);
    const auto seed = c.u64("seed");
    const auto n = c.u64("n");
    const auto k = c.u64("k");
    const auto r = c.u64("r");
    const auto trials = c.u64("trials");
    const auto count = c.u64("vectors");
    const auto mode = parse_sampling_mode(c.str("mode"));

    const auto rows = sample_transform(n, k, phi_seed(seed, k, 0), mode).rows();
    const auto ys = unit_vectors(n, count, seed);
    Report out = copy_config(config);
    out.set_table({"vector", "mean", "std", "standard_errors"});
    double worst = 0.0;
    for (std::uint64_t v = 0; v < count; ++v) {
        const auto split = split_heavy_light(ys.row(v), r);
        const auto s = cross_term_stats(rows, k, split, trials, estimator_seed(seed, k, v), threads);
        const double se = s.std / std::sqrt(static_cast<double>(trials));
        const double z = se > 0.0 ? std::abs(s.mean) / se : 0.0;
        worst = std::max(worst, z);
        out.add_row({std::to_string(v), format_double(s.mean), format_double(s.std), format_double(z)});
    }
    out.result("max_standard_errors", worst);
    out.result("within_4_standard_errors", bool_text(worst <= 4.0));
    finish_validation(out, {});
    return out;
}

Report run_conc(const Report& config, unsigned threads) {
    const ConfigReader c(config);
    const auto seed = c.u64("seed");
    const auto n = c.u64("n");
    const auto k = c.u64("k");
    const auto r = c.u64("r");
    const auto trials = c.u64("trials");
    const auto count = c.u64("vectors");
    const auto mode = parse_sampling_mode(c.str("mode"));

    const auto rows = sample_transform(n, k, phi_seed(seed, k, 0), mode).rows();
    const auto ys = unit_vectors(n, count, seed);
    Report out = copy_config(config);
    out.set_table({"vector", "median", "rms", "sigma", "normalized_gap", "tail_1sigma",
                   "tail_2sigma", "tail_3sigma"});
    double max_gap = 0.0;
    double max_tail3 = 0.0;
    for (std::uint64_t v = 0; v < count; ++v) {
        const auto light = split_heavy_light(ys.row(v), r).light;
        const auto rep = concentration_check(rows, k, light, trials, estimator_seed(seed, k, v), threads);
        max_gap = std::max(max_gap, rep.normalized_gap);
        max_tail3 = std::max(max_tail3, rep.tail_two_sided[2]);
        out.add_row({std::to_string(v), format_double(rep.median), format_double(rep.rms),
                     format_double(rep.sigma), format_double(rep.normalized_gap),
                     format_double(rep.tail_two_sided[0]), format_double(rep.tail_two_sided[1]),
                     format_double(rep.tail_two_sided[2])});
    }
    out.result("max_normalized_gap", max_gap);
    out.result("max_tail_3sigma", max_tail3);
    finish_validation(out, {});
    return out;
}

}  // namespace

std::uint64_t phi_seed(std::uint64_t seed, std::size_t k, std::uint64_t j) {
    return derive_seed(derive_seed(seed, k), j);
}

std::uint64_t estimator_seed(std::uint64_t seed, std::size_t k, std::uint64_t j) {
    return derive_seed(derive_seed(derive_seed(seed, kEstimatorStream), k), j);
}

Report to_config(const RipConfig& c) {
    Report r;
    common_header(r, "verify rip", c.seed);
    r.config("n", std::uint64_t{c.n});
    r.config("full", bool_text(c.full));
    r.config("k", c.full ? std::to_string(c.n) : join_list(c.ks));
    r.config("r", std::uint64_t{c.r});
    r.config("budget", c.budget);
    r.config("phi_seeds", c.phi_seeds);
    r.config("mode", to_string(c.mode));
    echo_k_source(r, c.k_source);
    return r;
}

Report to_config(const EAlphaConfig& c) {
    Report r;
    common_header(r, "verify ealpha", c.seed);
    r.config("n", std::uint64_t{c.n});
    r.config("full", bool_text(c.full));
    r.config("k", c.full ? std::to_string(c.n) : join_list(c.ks));
    r.config("alpha", c.alpha.value_or(1.0 / std::sqrt(static_cast<double>(c.r))));
    r.config("samples", c.samples);
    r.config("ascent_iters", c.ascent_iters);
    r.config("phi_seeds", c.phi_seeds);
    r.config("mode", to_string(c.mode));
    echo_k_source(r, c.k_source);
    return r;
}

Report to_config(const DistortConfig& c) {
    Report r;
    common_header(r, "verify distort", c.seed);
    if (c.input.empty()) {
        r.config("input", "-");
        r.config("kind", to_string(c.kind));
        r.config("n", std::uint64_t{c.n});
        r.config("count", std::uint64_t{c.count});
        r.config("sparsity", std::uint64_t{c.sparsity});
    } else {
        r.config("input", c.input);
        r.config("input_fingerprint", dataset_fingerprint(load_dataset(c.input)));
    }
    r.config("k", join_list(c.ks));
    r.config("delta", c.delta);
    r.config("pairs", c.pairs);
    r.config("all_pairs", bool_text(c.all_pairs));
    r.config("phi_seeds", c.phi_seeds);
    r.config("mode", to_string(c.mode));
    echo_k_source(r, c.k_source);
    return r;
}

Report to_config(const CrossConfig& c) {
    Report r;
    common_header(r, "verify cross", c.seed);
    r.config("n", std::uint64_t{c.n});
    r.config("k", std::uint64_t{c.k});
    r.config("r", std::uint64_t{c.r});
    r.config("trials", c.trials);
    r.config("vectors", c.vectors);
    r.config("mode", to_string(c.mode));
    return r;
}

Report to_config(const ConcConfig& c) {
    Report r;
    common_header(r, "verify conc", c.seed);
    r.config("n", std::uint64_t{c.n});
    r.config("k", std::uint64_t{c.k});
    r.config("r", std::uint64_t{c.r});
    r.config("trials", c.trials);
    r.config("vectors", c.vectors);
    r.config("mode", to_string(c.mode));
    return r;
}

Report run_verify(const Report& config, unsigned threads) {
    const ConfigReader c(config);
    if (c.u64("generator") != kGeneratorId)
        throw std::invalid_argument("report was produced with generator id " + c.str("generator") +
                                    ", this build uses " + std::to_string(kGeneratorId));
    const auto command = c.str("command");
    if (command == "verify rip") return run_rip(config, threads);
    if (command == "verify ealpha") return run_ealpha(config, threads);
    if (command == "verify distort") return run_distort(config, threads);
    if (command == "verify cross") return run_cross(config, threads);
    if (command == "verify conc") return run_conc(config, threads);
    throw std::invalid_argument("unknown command '" + command + "' in report config");
}

bool validation_passed(const Report& report) {
    const auto v = report.find_result("validation");
    return v && *v == "pass";
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("loglog_slope: need at least two matching points");
    const auto m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::string dataset_fingerprint(const VectorDataset& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](const void* p, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::uint64_t n = data.n();
    feed(&n, sizeof n);
    feed(data.values().data(), data.values().size() * sizeof(double));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<RealVector> difference_vectors(const VectorDataset& data, std::uint64_t pairs,
                                           std::uint64_t seed) {
    const std::size_t count = data.count();
    if (count < 2) throw std::invalid_argument("difference vectors need at least two points");
    std::vector<RealVector> out;
    auto diff = [&](std::size_t i, std::size_t j) {
        RealVector d(data.n());
        for (std::size_t t = 0; t < d.size(); ++t) d[t] = data.row(i)[t] - data.row(j)[t];
        out.push_back(std::move(d));
    };
    if (pairs == 0) {
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = i + 1; j < count; ++j) diff(i, j);
        return out;
    }
    Rng rng(seed);
    for (std::uint64_t p = 0; p < pairs; ++p) {
        const auto i = rng.below(count);
        auto j = rng.below(count - 1);
        if (j >= i) ++j;
        diff(i, j);
    }
    return out;
}

}  // namespace fjlt::cli
