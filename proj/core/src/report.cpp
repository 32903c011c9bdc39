#include "fjlt/report.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "fjlt/errors.hpp"

namespace fjlt {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("not a number: '" + text + "'");
    return value;
}

std::string join_indices(std::span<const std::uint32_t> indices) {
    std::string out;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(indices[i]);
    }
    return out;
}

void Report::config(const std::string& key, const std::string& value) { config_.emplace_back(key, value); }
void Report::config(const std::string& key, double value) { config(key, format_double(value)); }
void Report::config(const std::string& key, std::uint64_t value) { config(key, std::to_string(value)); }
void Report::result(const std::string& key, const std::string& value) { result_.emplace_back(key, value); }
void Report::result(const std::string& key, double value) { result(key, format_double(value)); }
void Report::result(const std::string& key, std::uint64_t value) { result(key, std::to_string(value)); }

void Report::set_table(std::vector<std::string> header) {
    header_ = std::move(header);
    rows_.clear();
}

void Report::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size())
        throw std::invalid_argument("Report::add_row: " + std::to_string(row.size()) +
                                    " cells for " + std::to_string(header_.size()) + " columns");
    rows_.push_back(std::move(row));
}

namespace {

std::optional<std::string> find(const std::vector<Report::Entry>& entries, const std::string& key) {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    return std::nullopt;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::optional<std::string> Report::find_config(const std::string& key) const { return find(config_, key); }
std::optional<std::string> Report::find_result(const std::string& key) const { return find(result_, key); }

void Report::write_text(std::ostream& out) const {
    out << "# fjlt report v1\n[config]\n";
    for (const auto& [k, v] : config_) out << k << " = " << v << '\n';
    out << "[result]\n";
    for (const auto& [k, v] : result_) out << k << " = " << v << '\n';
}

void Report::write_csv(std::ostream& out) const {
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    emit(header_);
    for (const auto& row : rows_) emit(row);
}

Report Report::parse_text(std::istream& in) {
    Report report;
    enum class Section { none, config, result } section = Section::none;
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || trim(line) != "# fjlt report v1")
        throw FormatError("report: missing '# fjlt report v1' header");
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t == "[config]") {
            section = Section::config;
            continue;
        }
        if (t == "[result]") {
            section = Section::result;
            continue;
        }
        const auto eq = t.find(" = ");
        if (eq == std::string::npos || section == Section::none)
            throw FormatError("report line " + std::to_string(line_no) + ": expected 'key = value'");
        auto key = t.substr(0, eq);
        auto value = t.substr(eq + 3);
        if (section == Section::config)
            report.config(key, value);
        else
            report.result(key, value);
    }
    return report;
}

void append_result(Report& report, const RipReport& rip) {
    report.result("r", std::uint64_t{rip.r});
    report.result("delta_hat", rip.delta_hat);
    report.result("witness_support", join_indices(rip.witness_support));
    report.result("supports_checked", rip.supports_checked);
    report.result("exhaustive", rip.exhaustive ? "true" : "false");
    report.result("all_converged", rip.all_converged ? "true" : "false");
}

void append_result(Report& report, const EAlphaEstimate& e) {
    report.result("alpha", e.alpha);
    report.result("lower_bound", e.lower_bound);
    report.result("samples", e.samples);
    report.result("ascent_iters", e.ascent_iters);
    report.result("evaluations", e.evaluations);
    report.result("flat_support_size", std::uint64_t{e.flat_support_size});
    report.result("witness_linf_sq", e.witness_linf_sq);
    report.result("alpha_sq", e.alpha * e.alpha);
    std::vector<std::uint32_t> support;
    std::string values;
    for (std::size_t i = 0; i < e.witness.size(); ++i) {
        if (e.witness[i] == 0.0) continue;
        support.push_back(static_cast<std::uint32_t>(i));
        if (!values.empty()) values += ' ';
        values += format_double(e.witness[i]);
    }
    report.result("witness_support", join_indices(support));
    report.result("witness_values", values);
}

void append_result(Report& report, const DistortionReport& d) {
    report.result("vectors", std::uint64_t{d.ratios.size()});
    report.result("skipped_zero_vectors", std::uint64_t{d.skipped.size()});
    report.result("ratio_min", d.min);
    report.result("ratio_max", d.max);
    report.result("ratio_mean", d.mean);
    report.result("max_abs_deviation", d.max_abs_deviation);
    report.result("delta", d.delta);
    report.result("success_fraction", d.success_fraction);
}

void append_result(Report& report, const CrossTermStats& c) {
    report.result("trials", c.trials);
    report.result("cross_mean", c.mean);
    report.result("cross_std", c.std);
}

void append_result(Report& report, const ConcentrationReport& c) {
    report.result("trials", c.trials);
    report.result("median", c.median);
    report.result("rms", c.rms);
    report.result("sigma", c.sigma);
    report.result("normalized_gap", c.normalized_gap);
    const auto& mult = ConcentrationReport::kTailMultipliers;
    for (std::size_t j = 0; j < mult.size(); ++j) {
        const auto tag = std::to_string(static_cast<int>(mult[j]));
        report.result("tail_upper_" + tag + "sigma", c.tail_upper[j]);
        report.result("tail_lower_" + tag + "sigma", c.tail_lower[j]);
        report.result("tail_two_sided_" + tag + "sigma", c.tail_two_sided[j]);
    }
}

}  // namespace fjlt
