#include "ifdpg/io/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ifdpg/error.hpp"

namespace ifdpg::io {

namespace {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

std::vector<Record> parse_records(std::string_view text, std::string_view source) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<Record> records;
  Record current;
  std::string field;
  std::size_t line = 1;
  current.line = 1;
  bool quoted = false;
  bool field_started = false;

  const auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_record = [&] {
    // A line with nothing on it is not a record.
    if (!(current.fields.size() == 1 && current.fields[0].empty())) records.push_back(std::move(current));
    current = Record{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started)
          throw InputError(std::string(source) + ":" + std::to_string(line) + ": stray quote inside a field");
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_field();
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw InputError(std::string(source) + ": unterminated quoted field");
  if (field_started || !current.fields.empty()) {
    end_field();
    end_record();
  }
  return records;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Whole-cell numeric parse; accepts "inf"/"nan" so they can be reported as
// non-finite rather than as unparseable.
std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (cell.starts_with('+')) cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec == std::errc::result_out_of_range) return std::numeric_limits<double>::infinity();
  if (ec != std::errc{} || end != cell.data() + cell.size()) return std::nullopt;
  return value;
}

std::optional<Label> parse_label(std::string_view cell) {
  const std::string token = lower(trim(cell));
  if (token == "o" || token == "outlier" || token == "1") return Label::Outlier;
  if (token == "n" || token == "inlier" || token == "0") return Label::Inlier;
  return std::nullopt;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::size_t resolve_label_column(const std::string& spec, const std::vector<std::string>* header,
                                 std::size_t width, std::string_view source) {
  if (header != nullptr) {
    for (std::size_t c = 0; c < header->size(); ++c) {
      if (std::string(trim((*header)[c])) == spec) return c;
    }
    for (std::size_t c = 0; c < header->size(); ++c) {
      if (lower(trim((*header)[c])) == lower(spec)) return c;
    }
  }
  if (all_digits(spec)) {
    const std::size_t index = std::stoul(spec);
    if (index < width) return index;
  }
  throw InputError(std::string(source) + ": unknown label column '" + spec + "'");
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buffer, end);
}

Dataset parse_csv(std::string_view text, const CsvOptions& options, std::string_view source) {
  const std::string where(source);
  std::vector<Record> records = parse_records(text, source);
  if (records.empty()) throw InputError(where + ": empty file");

  const std::size_t width = records.front().fields.size();
  for (const Record& r : records) {
    if (r.fields.size() != width)
      throw InputError(where + ":" + std::to_string(r.line) + ": row has " + std::to_string(r.fields.size()) +
                       " fields, expected " + std::to_string(width));
  }

  bool has_header = false;
  if (options.has_header) {
    has_header = *options.has_header;
  } else {
    has_header = std::any_of(records.front().fields.begin(), records.front().fields.end(),
                             [](const std::string& cell) { return !parse_number(cell).has_value(); });
  }
  const std::vector<std::string>* header = has_header ? &records.front().fields : nullptr;
  const std::size_t first_data = has_header ? 1 : 0;
  if (records.size() <= first_data) throw InputError(where + ": no data rows");

  std::optional<std::size_t> label_column;
  if (options.label_column)
    label_column = resolve_label_column(*options.label_column, header, width, source);

  std::vector<std::size_t> columns;
  for (std::size_t c = 0; c < width; ++c) {
    if (c == label_column) continue;
    if (parse_number(records[first_data].fields[c])) columns.push_back(c);
  }
  if (columns.empty()) throw InputError(where + ": no numeric columns");

  std::vector<std::string> names;
  for (const std::size_t c : columns) {
    names.push_back(header != nullptr ? std::string(trim((*header)[c])) : "f" + std::to_string(names.size()));
  }

  std::vector<double> values;
  values.reserve((records.size() - first_data) * columns.size());
  std::vector<Label> labels;
  std::vector<std::string> problems;
  for (std::size_t r = first_data; r < records.size(); ++r) {
    const Record& record = records[r];
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const std::string& cell = record.fields[columns[k]];
      const auto value = parse_number(cell);
      if (!value) {
        problems.push_back("line " + std::to_string(record.line) + ", column '" + names[k] +
                           "': cannot parse '" + cell + "'");
      } else if (!std::isfinite(*value)) {
        problems.push_back("line " + std::to_string(record.line) + ", column '" + names[k] +
                           "': non-finite value '" + cell + "'");
      }
      values.push_back(value.value_or(0.0));
    }
    if (label_column) {
      const auto label = parse_label(record.fields[*label_column]);
      if (!label)
        throw InputError(where + ":" + std::to_string(record.line) + ": unknown label token '" +
                         record.fields[*label_column] + "'");
      labels.push_back(*label);
    }
  }
  if (!problems.empty()) {
    std::string message = where + ": rejected rows:";
    const std::size_t shown = std::min<std::size_t>(problems.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) message += "\n  " + problems[i];
    if (problems.size() > shown) message += "\n  ... and " + std::to_string(problems.size() - shown) + " more";
    throw InputError(message);
  }

  try {
    return Dataset(std::move(values), columns.size(), header != nullptr ? std::move(names) : std::vector<std::string>{},
                   label_column ? std::optional(std::move(labels)) : std::nullopt);
  } catch (const std::invalid_argument& e) {
    throw InputError(where + ": " + e.what());
  }
}

Dataset read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), options, path.string());
}

void write_csv(const Dataset& data, std::ostream& out) {
  const auto& names = data.feature_names();
  for (std::size_t f = 0; f < names.size(); ++f) out << (f ? "," : "") << quote_if_needed(names[f]);
  if (data.labels()) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < data.n_samples(); ++i) {
    const auto row = data.row(i);
    for (std::size_t f = 0; f < row.size(); ++f) out << (f ? "," : "") << format_double(row[f]);
    if (data.labels()) out << ',' << to_string((*data.labels())[i]);
    out << '\n';
  }
}

namespace {

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string() + ": cannot open for writing");
  writer(out);
  out.flush();
  if (!out) throw InputError(path.string() + ": write failed");
}

}  // namespace

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_csv(data, out); });
}

void write_injection_log(std::span<const InjectionRecord> log, std::ostream& out) {
  out << "sample,feature,initial,final,alteration,sigma,factor\n";
  for (const InjectionRecord& r : log) {
    out << r.sample << ',' << r.feature << ',' << format_double(r.initial) << ',' << format_double(r.final_value)
        << ',' << format_double(r.alteration) << ',' << format_double(r.sigma) << ',' << format_double(r.factor)
        << '\n';
  }
}

void write_injection_log(std::span<const InjectionRecord> log, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_injection_log(log, out); });
}

}  // namespace ifdpg::io
