#pragma once

#include <string>
#include <vector>

namespace snspd::io {

/// Fixed-point decimal formatting ("%.*f"); the workhorse for deterministic
/// text artifacts.
[[nodiscard]] std::string fmt_fixed(double v, int decimals);

/// Shortest round-trip representation for numbers that must survive
/// JSON round-trips without quantization.
[[nodiscard]] std::string fmt_full(double v);

/// RFC 4180 CSV: CRLF line endings, fields quoted when they contain
/// commas, quotes, or newlines.
struct CsvWriter {
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(std::vector<std::string> fields);
    [[nodiscard]] std::string str() const;

  private:
    std::size_t columns_;
    std::string body_;
};

/// Minimal CSV reader: accepts LF or CRLF, quoted fields, returns rows of
/// strings including the header row.
[[nodiscard]] std::vector<std::vector<std::string>> parse_csv(const std::string& text);

[[nodiscard]] std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace snspd::io
