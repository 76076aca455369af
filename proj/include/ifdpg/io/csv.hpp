#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "ifdpg/dataset.hpp"
#include "ifdpg/synth.hpp"

namespace ifdpg::io {

struct CsvOptions {
  // nullopt: a first row with any non-numeric cell is taken as a header.
  std::optional<bool> has_header;
  // Header name, or a zero-based column index written as digits.
  std::optional<std::string> label_column;
};

// RFC 4180 reader. Numeric columns become features; a column whose first
// data cell is not a number is dropped. Throws InputError on an empty file,
// ragged rows, no numeric column, unparseable or non-finite numbers (with
// the 1-based line number) and unknown label tokens.
Dataset read_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::string_view text, const CsvOptions& options = {},
                  std::string_view source = "<memory>");

// Header plus one row per sample at round-trip precision. Ground-truth labels,
// when present, go into a trailing "label" column as "inlier"/"outlier".
void write_csv(const Dataset& data, std::ostream& out);
void write_csv(const Dataset& data, const std::filesystem::path& path);

// Columns: sample,feature,initial,final,alteration,sigma,factor.
void write_injection_log(std::span<const InjectionRecord> log, std::ostream& out);
void write_injection_log(std::span<const InjectionRecord> log, const std::filesystem::path& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace ifdpg::io
