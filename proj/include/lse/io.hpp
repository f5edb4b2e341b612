#pragma once

// Run configuration (strict JSON with unit-suffixed keys), CSV ingestion and
// export, atomic file writes and content hashes.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lse/analysis.hpp"
#include "lse/fit.hpp"
#include "lse/spectrum.hpp"

namespace lse {

struct RunConfig {
  ModelConfig model;
  std::vector<double> temperatures;  // K
  bool normalize = true;
};

/// Parses the JSON text of a run configuration. Errors name the field
/// without its unit suffix, e.g. MissingKey("rate_laws.E_a").
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical form: sorted keys, two-space indent, shortest round-trip
/// numbers, trailing newline.
std::string serialize_config(const RunConfig& config);

RunConfig reference_run_config();

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

/// Header line plus rows; numbers in shortest round-trip form, LF endings.
std::string format_csv(const CsvTable& table);
/// Strict numeric CSV: mandatory header, no NaN/inf, equal field counts.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Two-column file, or the column named for the kind (peak_eV, fwhm_eV,
/// intensity_au, lifetime_ps) against the first column. Sorted by abscissa.
ObservedCurve parse_observed_csv(std::string_view text, CurveKind kind);
ObservedCurve load_observed_csv(const std::filesystem::path& path, CurveKind kind);

CsvTable spectrum_table(const Spectrum& s);
CsvTable observables_table(const SweepResult& sweep);

std::string format_number(double v);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace lse
