#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "tsgrasp/config.hpp"
#include "tsgrasp/harness.hpp"

namespace tsgrasp {

inline constexpr const char* kToolVersion = "1.0.0";

/// Shortest round-trippable text for a double.
std::string format_number(double value);

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_curves_csv(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<RunRecord>& records);
void write_summary_csv(std::ostream& out, const SummaryTable& table);

/// records.csv, curves.csv, summary.csv and manifest.json under `dir`.
void write_results(const std::filesystem::path& dir, const ExperimentConfig& config,
                   const ExperimentResult& result);

}  // namespace tsgrasp
