#pragma once

#include <string>
#include <vector>

#include "fouk/structure.hpp"
#include "fouk/verifier.hpp"

namespace fouk {

/// StructureReport as JSON (bases serialized as lists of column vectors).
std::string structure_report_to_json(const StructureReport& report);

/// VerificationReport serialization. with_timestamp adds an ISO-8601 field
/// (excluded under the CLI's --no-timestamp comparison mode).
std::string report_to_json(const VerificationReport& report, bool with_timestamp);

/// Stable CSV: header "experiment,parameter,value,fitted,predicted,pass",
/// one row per series entry (parameter column carries "label:value").
std::string report_to_csv(const VerificationReport& report);

/// Parses report_to_csv output back (round-trip check surface).
VerificationReport report_from_csv(const std::string& text);

/// ExponentFit embedded into the generic report shape.
VerificationReport fit_as_report(const std::string& experiment,
                                 const ExponentFit& fit);

/// Write-then-rename so readers never observe partial files.
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace fouk
