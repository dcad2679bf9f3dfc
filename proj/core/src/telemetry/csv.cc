#include "opms/telemetry/csv.h"

#include <charconv>
#include <cmath>
#include <vector>

#include "opms/error.h"
#include "opms/io.h"

namespace opms::telemetry {
namespace {

constexpr std::string_view kLabelColumns[] = {"label", "attack_kind", "intensity"};

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

Label parse_label(std::span<const std::string_view> cells, std::size_t line_no) {
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::kMalformedRow,
                 "line " + std::to_string(line_no) + ": " + why);
  };
  if (cells[0] == "Normal") {
    if (!cells[1].empty() || !cells[2].empty()) {
      throw bad("Normal rows must have empty attack_kind and intensity");
    }
    return Label::normal();
  }
  if (cells[0] != "Attack") throw bad("label must be Normal or Attack");
  auto kind = parse_attack_kind(cells[1]);
  auto intensity = parse_intensity(cells[2]);
  if (!kind || !intensity) throw bad("Attack rows need attack_kind and intensity");
  return Label::attack({*kind, *intensity});
}

Dataset parse_body(std::span<const std::string_view> lines,
                   const FeatureSchema& schema) {
  const std::size_t width = schema.size();
  RowMatrix rows(static_cast<Eigen::Index>(lines.size()),
                 static_cast<Eigen::Index>(width));
  std::vector<Label> labels;
  labels.reserve(lines.size());
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const std::size_t line_no = r + 2;
    auto cells = split_line(lines[r]);
    if (cells.size() != width + 3) {
      throw Error(ErrorCode::kMalformedRow,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(width + 3) + " cells, got " +
                      std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      std::string_view cell = cells[c];
      double v = 0.0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::kMalformedRow,
                    "line " + std::to_string(line_no) + ": bad number '" +
                        std::string(cell) + "'");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "line " + std::to_string(line_no) + ", column " +
                        schema[c].name);
      }
      rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
    labels.push_back(parse_label(std::span(cells).subspan(width), line_no));
  }
  return Dataset(schema, std::move(rows), std::move(labels));
}

}  // namespace

std::string to_csv(const Dataset& ds) {
  std::string out;
  for (const auto& e : ds.schema().entries()) {
    out += e.name;
    out += ',';
  }
  out += "label,attack_kind,intensity\n";
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (double v : ds.row(r)) {
      append_double(out, v);
      out += ',';
    }
    const Label& l = ds.labels()[r];
    if (l.is_attack()) {
      out += "Attack,";
      out += attack_kind_name(l.attack_type()->kind);
      out += ',';
      out += intensity_name(l.attack_type()->intensity);
    } else {
      out += "Normal,,";
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  write_file_atomic(path, to_csv(ds));
}

Dataset from_csv(std::string_view text, const FeatureSchema& schema) {
  auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::kHeaderMismatch, "empty file");
  auto header = split_line(lines[0]);
  bool ok = header.size() == schema.size() + 3;
  for (std::size_t c = 0; ok && c < schema.size(); ++c) {
    ok = header[c] == schema[c].name;
  }
  for (std::size_t k = 0; ok && k < 3; ++k) {
    ok = header[schema.size() + k] == kLabelColumns[k];
  }
  if (!ok) {
    throw Error(ErrorCode::kHeaderMismatch,
                "header does not match schema (" + std::to_string(schema.size()) +
                    " features + label columns)");
  }
  return parse_body(std::span(lines).subspan(1), schema);
}

Dataset read_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
  return from_csv(read_file(path), schema);
}

Dataset read_csv_infer_schema(const std::filesystem::path& path) {
  std::string text = read_file(path);
  auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::kHeaderMismatch, "empty file");
  auto header = split_line(lines[0]);
  if (header.size() < 4) throw Error(ErrorCode::kHeaderMismatch, "too few columns");
  std::vector<std::string> names(header.begin(), header.end() - 3);
  return from_csv(text, FeatureSchema::from_names(names));
}

}  // namespace opms::telemetry
