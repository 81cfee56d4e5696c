#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kltest/experiment.hpp"
#include "kltest/simplex.hpp"

namespace kltest {

/// Parses a distribution text file: one probability per line, or
/// comma/whitespace separated values; weights are normalized through
/// make_distribution. Errors name the file and line.
Distribution read_distribution_file(const std::filesystem::path& path);

/// Parses a sample file of whitespace-separated integer symbols.
/// Errors name the file and line.
std::vector<int> read_samples_file(const std::filesystem::path& path);

/// Parses a flat key/value experiment config (`key = value` or `key value`
/// lines, '#' comments). Relative law paths resolve against the config file's
/// directory.
ExperimentSpec read_experiment_config(const std::filesystem::path& path);

/// Float formatting for CSV artifacts: 12 significant digits, +inf as the
/// literal "inf".
std::string format_float(double value);

/// Reads (n, beta) pairs from a CSV with a header row; uses the `n` column
/// and the `beta_hat` (or `beta` / `type_2`) column.
std::vector<std::pair<std::int64_t, double>> read_beta_csv(
    const std::filesystem::path& path);

}  // namespace kltest
