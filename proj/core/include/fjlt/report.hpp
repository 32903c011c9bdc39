#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fjlt/estimators.hpp"

namespace fjlt {

/// Text report: a [config] block echoing every input needed to reproduce the
/// run, followed by a [result] block. Lines are `key = value`; order is
/// insertion order. An optional table is written separately as CSV.
///
///   # fjlt report v1
///   [config]
///   command = verify rip
///   seed = 7
///   [result]
///   delta_hat = 0.25
class Report {
public:
    using Entry = std::pair<std::string, std::string>;

    void config(const std::string& key, const std::string& value);
    void config(const std::string& key, double value);
    void config(const std::string& key, std::uint64_t value);
    void result(const std::string& key, const std::string& value);
    void result(const std::string& key, double value);
    void result(const std::string& key, std::uint64_t value);

    void set_table(std::vector<std::string> header);
    void add_row(std::vector<std::string> row);

    const std::vector<Entry>& config_entries() const noexcept { return config_; }
    const std::vector<Entry>& result_entries() const noexcept { return result_; }
    const std::vector<std::string>& table_header() const noexcept { return header_; }
    const std::vector<std::vector<std::string>>& table_rows() const noexcept { return rows_; }

    std::optional<std::string> find_config(const std::string& key) const;
    std::optional<std::string> find_result(const std::string& key) const;

    void write_text(std::ostream& out) const;
    void write_csv(std::ostream& out) const;

    /// Parses write_text output (the table is not part of the text form).
    static Report parse_text(std::istream& in);

    friend bool operator==(const Report&, const Report&) = default;

private:
    std::vector<Entry> config_;
    std::vector<Entry> result_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

std::string join_indices(std::span<const std::uint32_t> indices);

void append_result(Report& report, const RipReport& rip);
void append_result(Report& report, const EAlphaEstimate& estimate);
void append_result(Report& report, const DistortionReport& distortion);
void append_result(Report& report, const CrossTermStats& cross);
void append_result(Report& report, const ConcentrationReport& concentration);

}  // namespace fjlt
