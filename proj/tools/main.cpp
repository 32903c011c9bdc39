// fjlt: dataset generation, embedding, timing and verification experiments
// for the subsampled randomized Hadamard transform.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiments.hpp"
#include "fjlt/dataset.hpp"
#include "fjlt/errors.hpp"
#include "fjlt/random.hpp"
#include "fjlt/timing.hpp"
#include "fjlt/transform.hpp"

namespace {

using namespace fjlt;

struct Globals {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
    std::string format = "bin";
};

struct KOptions {
    std::vector<std::size_t> ks;
    double delta = 0.5;
    double points = 0.0;  // 0 -> command default
    double c_k = 1.0;
};

void add_k_options(CLI::App* cmd, KOptions& k) {
    cmd->add_option("--k", k.ks, "Target dimension(s); omit to use the formula")->delimiter(',');
    cmd->add_option("--delta", k.delta, "Distortion in (0, 1/2] for the k formula");
    cmd->add_option("--points", k.points, "Point-set size N for the k formula");
    cmd->add_option("--c-k", k.c_k, "Leading constant of the k formula");
}

std::vector<std::size_t> resolve_ks(const KOptions& k, std::size_t n, double default_points,
                                    cli::KSource& source) {
    if (!k.ks.empty()) return k.ks;
    source.from_formula = true;
    source.params.n = n;
    source.params.points = k.points > 0 ? k.points : std::max(2.0, default_points);
    source.params.delta = k.delta;
    source.params.c_k = k.c_k;
    const auto td = target_dimension(source.params);
    source.clamped = td.clamped;
    return {td.k};
}

void write_text_file(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

std::string render(const Report& r) {
    std::ostringstream ss;
    r.write_text(ss);
    return ss.str();
}

std::string render_csv(const Report& r) {
    std::ostringstream ss;
    r.write_csv(ss);
    return ss.str();
}

int emit_verify(const Report& report, const Globals& g, const std::string& csv_path) {
    write_text_file(g.out, render(report));
    if (!csv_path.empty()) write_text_file(csv_path, render_csv(report));
    if (!cli::validation_passed(report)) {
        std::cerr << "fjlt: " << report.find_result("validation").value_or("validation failed") << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fast Johnson-Lindenstrauss transform toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Root seed for all randomness");
    app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output path ('-' or empty for stdout where allowed)");
    app.add_option("--format", g.format, "Dataset output format")->check(CLI::IsMember({"bin", "csv"}));

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    GenOptions gen_opts;
    std::string gen_kind = "unit-sphere";
    gen->add_option("--kind", gen_kind, "unit-sphere | sparse | clustered | near-duplicate");
    gen->add_option("--n", gen_opts.n, "Dimension")->required();
    gen->add_option("--count", gen_opts.count, "Number of vectors")->required();
    gen->add_option("--sparsity", gen_opts.sparsity, "Nonzeros per vector for --kind sparse");
    gen->add_option("--clusters", gen_opts.clusters, "Cluster count for --kind clustered");
    gen->add_option("--spread", gen_opts.spread, "Cluster radius / duplicate perturbation");

    // pad
    auto* pad = app.add_subcommand("pad", "Zero-pad vectors to the next power of two");
    std::string pad_in;
    pad->add_option("--in", pad_in, "Input dataset")->required()->check(CLI::ExistingFile);

    // embed
    auto* embed = app.add_subcommand("embed", "Apply a sampled transform to every vector");
    std::string embed_in;
    std::string embed_mode = "with-replacement";
    std::string transform_path;
    KOptions embed_k;
    embed->add_option("--in", embed_in, "Input dataset")->required()->check(CLI::ExistingFile);
    embed->add_option("--mode", embed_mode, "with-replacement | without-replacement");
    embed->add_option("--save-transform", transform_path, "Also write the transform header");
    add_k_options(embed, embed_k);

    // bench
    auto* bench = app.add_subcommand("bench", "Time the fast transform against a dense multiply");
    BenchOptions bench_opts;
    std::optional<std::size_t> bench_k;
    bench_opts.n_list = {1u << 14, 1u << 15, 1u << 16, 1u << 17, 1u << 18};
    bench->add_option("--n-list", bench_opts.n_list, "Dimensions to time")->delimiter(',');
    bench->add_option("--k", bench_k, "Fixed target dimension");
    bench->add_option("--k-frac", bench_opts.k_fraction, "k = n * fraction when --k is absent");
    bench->add_option("--repeats", bench_opts.repeats, "Timed samples per cell")->check(CLI::PositiveNumber);
    bench->add_option("--dense-max-n", bench_opts.dense_max_n, "Skip the dense baseline above this n");
    std::string bench_csv;
    bench->add_option("--csv", bench_csv, "Write the timing table as CSV");

    // verify
    auto* verify = app.add_subcommand("verify", "Run an estimator experiment");
    verify->fallthrough();
    std::string from_report;
    std::string csv_path;
    verify->add_option("--from-report", from_report, "Re-run the config block of a report")
        ->check(CLI::ExistingFile);
    verify->add_option("--csv", csv_path, "Write the per-run table as CSV");

    std::string mode_text = "with-replacement";
    auto add_mode = [&](CLI::App* cmd) {
        cmd->add_option("--mode", mode_text, "Row sampling: with-replacement | without-replacement");
    };

    auto* v_rip = verify->add_subcommand("rip", "Restricted isometry constant by enumeration");
    cli::RipConfig rip;
    KOptions rip_k;
    v_rip->add_option("--n", rip.n, "Dimension");
    v_rip->add_option("--r", rip.r, "Sparsity");
    v_rip->add_option("--budget", rip.budget, "Support budget before sampling");
    v_rip->add_option("--phi-seeds", rip.phi_seeds, "Independent row draws per k");
    v_rip->add_flag("--full", rip.full, "Use every row once (k = n)");
    add_k_options(v_rip, rip_k);
    add_mode(v_rip);

    auto* v_ealpha = verify->add_subcommand("ealpha", "Lower-bound the deviation supremum");
    cli::EAlphaConfig ea;
    KOptions ea_k;
    v_ealpha->add_option("--n", ea.n, "Dimension");
    v_ealpha->add_option("--alpha", ea.alpha, "l_inf radius (default 1/sqrt(r))");
    v_ealpha->add_option("--r", ea.r, "Sparsity level defining alpha");
    v_ealpha->add_option("--samples", ea.samples, "Starting points");
    v_ealpha->add_option("--ascent-iters", ea.ascent_iters, "Coordinate moves per start");
    v_ealpha->add_option("--phi-seeds", ea.phi_seeds, "Independent row draws per k");
    v_ealpha->add_flag("--full", ea.full, "Use every row once (k = n)");
    add_k_options(v_ealpha, ea_k);
    add_mode(v_ealpha);

    auto* v_distort = verify->add_subcommand("distort", "Norm distortion over a point set");
    cli::DistortConfig dist;
    KOptions dist_k;
    std::string dist_kind = "unit-sphere";
    v_distort->add_option("--in", dist.input, "Dataset (default: generate)")->check(CLI::ExistingFile);
    v_distort->add_option("--kind", dist_kind, "Generated dataset kind");
    v_distort->add_option("--n", dist.n, "Generated dimension");
    v_distort->add_option("--count", dist.count, "Generated vector count");
    v_distort->add_option("--sparsity", dist.sparsity, "Nonzeros for --kind sparse");
    v_distort->add_option("--threshold", dist.delta, "Success threshold on |ratio - 1|");
    v_distort->add_option("--pairs", dist.pairs, "Embed this many sampled difference vectors");
    v_distort->add_flag("--all-pairs", dist.all_pairs, "Embed all N(N-1)/2 difference vectors");
    v_distort->add_option("--phi-seeds", dist.phi_seeds, "Independent transforms per k");
    add_k_options(v_distort, dist_k);
    add_mode(v_distort);

    auto* v_cross = verify->add_subcommand("cross", "Zero-mean check of the heavy/light cross term");
    cli::CrossConfig cross;
    v_cross->add_option("--n", cross.n, "Dimension");
    v_cross->add_option("--k", cross.k, "Target dimension");
    v_cross->add_option("--r", cross.r, "Split level");
    v_cross->add_option("--trials", cross.trials, "Sign vectors per input");
    v_cross->add_option("--vectors", cross.vectors, "Random unit inputs");
    add_mode(v_cross);

    auto* v_conc = verify->add_subcommand("conc", "Median vs RMS concentration of the light part");
    cli::ConcConfig conc;
    v_conc->add_option("--n", conc.n, "Dimension");
    v_conc->add_option("--k", conc.k, "Target dimension");
    v_conc->add_option("--r", conc.r, "Split level for the light part");
    v_conc->add_option("--trials", conc.trials, "Sign vectors per input");
    v_conc->add_option("--vectors", conc.vectors, "Random unit inputs");
    add_mode(v_conc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version are reported as parse "errors" with code 0.
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            if (g.out.empty()) throw std::invalid_argument("gen requires --out");
            gen_opts.kind = parse_dataset_kind(gen_kind);
            gen_opts.seed = g.seed;
            save_dataset(g.out, generate_dataset(gen_opts), parse_file_format(g.format));
            return 0;
        }

        if (pad->parsed()) {
            if (g.out.empty()) throw std::invalid_argument("pad requires --out");
            const auto padded = pad_dataset(load_dataset(pad_in));
            save_dataset(g.out, padded.data, parse_file_format(g.format));
            Report meta;
            meta.config("command", "pad");
            meta.config("input", pad_in);
            meta.result("original_n", std::uint64_t{padded.original_n});
            meta.result("n", std::uint64_t{padded.data.n()});
            meta.result("count", std::uint64_t{padded.data.count()});
            write_text_file(g.out + ".meta", render(meta));
            return 0;
        }

        if (embed->parsed()) {
            if (g.out.empty()) throw std::invalid_argument("embed requires --out");
            const auto data = load_dataset(embed_in);
            if (!is_power_of_two(data.n()))
                throw std::invalid_argument("dimension " + std::to_string(data.n()) +
                                            " is not a power of two; run `fjlt pad` first");
            cli::KSource source;
            const auto ks = resolve_ks(embed_k, data.n(), static_cast<double>(data.count()), source);
            if (ks.size() != 1) throw std::invalid_argument("embed takes a single --k");
            const auto mode = parse_sampling_mode(embed_mode);
            const auto t = sample_transform(data.n(), ks[0], g.seed, mode);
            const auto embedded = t.apply_batch(data.rows(), g.threads);
            std::vector<double> flat;
            flat.reserve(embedded.size() * t.k());
            for (const auto& v : embedded) flat.insert(flat.end(), v.begin(), v.end());
            save_dataset(g.out, VectorDataset(t.k(), std::move(flat)), parse_file_format(g.format));

            Report meta;
            meta.config("command", "embed");
            meta.config("generator", std::uint64_t{kGeneratorId});
            meta.config("input", embed_in);
            meta.config("seed", g.seed);
            meta.config("mode", to_string(mode));
            meta.config("n", std::uint64_t{t.n()});
            meta.config("k", std::uint64_t{t.k()});
            meta.config("k_source", source.from_formula ? "formula" : "explicit");
            if (source.from_formula) {
                meta.config("delta", source.params.delta);
                meta.config("points", source.params.points);
            }
            meta.config("c_k", source.params.c_k);
            meta.config("k_clamped", source.clamped ? "true" : "false");
            meta.result("count", std::uint64_t{embedded.size()});
            write_text_file(g.out + ".meta", render(meta));
            if (!transform_path.empty()) {
                std::ofstream tf(transform_path, std::ios::binary);
                write_transform(tf, t);
            }
            return 0;
        }

        if (bench->parsed()) {
            bench_opts.k = bench_k;
            bench_opts.seed = g.seed;
            Report report;
            report.config("command", "bench");
            report.config("generator", std::uint64_t{kGeneratorId});
            report.config("seed", g.seed);
            std::string n_list;
            for (auto n : bench_opts.n_list) n_list += (n_list.empty() ? "" : ",") + std::to_string(n);
            report.config("n_list", n_list);
            if (bench_opts.k)
                report.config("k", std::uint64_t{*bench_opts.k});
            else
                report.config("k_fraction", bench_opts.k_fraction);
            report.config("repeats", std::uint64_t{bench_opts.repeats});
            report.config("dense_max_n", std::uint64_t{bench_opts.dense_max_n});

            // Every result below is a timing field.
            const auto rows = run_bench(bench_opts);
            report.set_table({"n", "k", "repeats", "fwht_ns", "apply_ns", "dense_ns",
                              "fwht_ratio_per_doubling", "dense_speedup"});
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto& r = rows[i];
                const std::string key = "n" + std::to_string(r.n) + ".";
                report.result(key + "k", std::uint64_t{r.k});
                report.result(key + "fwht_ns", r.fwht_ns);
                report.result(key + "apply_ns", r.apply_ns);
                std::string dense, ratio, speedup;
                if (r.dense_ns) {
                    report.result(key + "dense_ns", *r.dense_ns);
                    report.result(key + "dense_speedup", *r.dense_ns / r.apply_ns);
                    dense = format_double(*r.dense_ns);
                    speedup = format_double(*r.dense_ns / r.apply_ns);
                }
                if (i > 0 && rows[i - 1].n * 2 == r.n) {
                    report.result(key + "fwht_ratio_per_doubling", r.fwht_ns / rows[i - 1].fwht_ns);
                    ratio = format_double(r.fwht_ns / rows[i - 1].fwht_ns);
                }
                report.add_row({std::to_string(r.n), std::to_string(r.k), std::to_string(r.repeats),
                                format_double(r.fwht_ns), format_double(r.apply_ns), dense, ratio,
                                speedup});
            }
            write_text_file(g.out, render(report));
            if (!bench_csv.empty()) write_text_file(bench_csv, render_csv(report));
            return 0;
        }

        if (verify->parsed()) {
            if (!from_report.empty()) {
                std::ifstream in(from_report);
                const auto config = Report::parse_text(in);
                return emit_verify(cli::run_verify(config, g.threads), g, csv_path);
            }
            const auto mode = parse_sampling_mode(mode_text);
            Report config;
            if (v_rip->parsed()) {
                rip.seed = g.seed;
                rip.mode = mode;
                if (!rip.full) rip.ks = resolve_ks(rip_k, rip.n, 1024, rip.k_source);
                config = cli::to_config(rip);
            } else if (v_ealpha->parsed()) {
                ea.seed = g.seed;
                ea.mode = mode;
                if (!ea.full) ea.ks = resolve_ks(ea_k, ea.n, 1024, ea.k_source);
                config = cli::to_config(ea);
            } else if (v_distort->parsed()) {
                dist.seed = g.seed;
                dist.mode = mode;
                dist.kind = parse_dataset_kind(dist_kind);
                std::size_t n = dist.n;
                double points = static_cast<double>(dist.count);
                if (!dist.input.empty()) {
                    const auto data = load_dataset(dist.input);
                    n = data.n();
                    points = static_cast<double>(data.count());
                }
                dist.ks = resolve_ks(dist_k, n, points, dist.k_source);
                config = cli::to_config(dist);
            } else if (v_cross->parsed()) {
                cross.seed = g.seed;
                cross.mode = mode;
                config = cli::to_config(cross);
            } else if (v_conc->parsed()) {
                conc.seed = g.seed;
                conc.mode = mode;
                config = cli::to_config(conc);
            } else {
                throw std::invalid_argument("verify needs a subcommand or --from-report");
            }
            return emit_verify(cli::run_verify(config, g.threads), g, csv_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "fjlt: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
