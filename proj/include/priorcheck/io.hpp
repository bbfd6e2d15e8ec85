#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "priorcheck/calibration.hpp"
#include "priorcheck/checks.hpp"
#include "priorcheck/model.hpp"

namespace priorcheck::io {

// Long-format CSV: the exact header line `group,value`, then one
// `label,value` row per observation. CRLF line endings and blank lines are
// accepted. Errors carry the 1-based line number.
GroupedDataset parse_dataset_csv(std::istream& in);
GroupedDataset load_dataset_csv(const std::filesystem::path& path);
std::string dataset_to_csv(const GroupedDataset& data);

struct DiscrepancyNames {
  std::string model = "chisq_total";
  std::string pi2 = "skew";
  std::string pi1 = "mahalanobis_mv";
};

struct RunConfig {
  double sigma2 = 1.0;
  double alpha = 0.05;
  std::size_t n_draws = 10000;
  std::uint64_t seed = 1;
  DiscrepancyNames discrepancies;
  HyperPrior hyperprior = HyperPrior::improper_flat();
  std::optional<std::string> output;

  ProtocolConfig protocol(unsigned threads) const;
};

// Strict parsing: unknown keys, wrong JSON types and missing sigma2 or
// hyperprior are errors; other fields take their defaults.
RunConfig parse_config_json(std::string_view text);
RunConfig load_config_json(const std::filesystem::path& path);

// Report schema "1". Numbers use 17 significant digits.
std::string report_to_json(const CheckReport& report);
CheckReport parse_report_json(std::string_view text);
void write_report_json(const CheckReport& report, const std::filesystem::path& path);

std::string calibration_to_json(const CalibrationResult& result);

// Writes `text` to `path`, throwing Io on failure.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace priorcheck::io
