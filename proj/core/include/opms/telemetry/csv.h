#ifndef OPMS_TELEMETRY_CSV_H_
#define OPMS_TELEMETRY_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "opms/telemetry/dataset.h"

namespace opms::telemetry {

// Header: schema names, then label,attack_kind,intensity. Values use 17
// significant digits so a read after write is bit-exact.
std::string to_csv(const Dataset& ds);
void write_csv(const Dataset& ds, const std::filesystem::path& path);

// Throws HeaderMismatch, NonFiniteValue or MalformedRow.
Dataset from_csv(std::string_view text, const FeatureSchema& schema);
Dataset read_csv(const std::filesystem::path& path, const FeatureSchema& schema);

// Reads the schema from the header line (names must be catalogue features).
Dataset read_csv_infer_schema(const std::filesystem::path& path);

}  // namespace opms::telemetry

#endif  // OPMS_TELEMETRY_CSV_H_
