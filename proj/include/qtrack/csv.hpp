#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qtrack/evaluation.hpp"
#include "qtrack/learner.hpp"
#include "qtrack/qstructure.hpp"
#include "qtrack/types.hpp"

namespace qtrack {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

// One header row naming each entry "H[i,j]", one data row of values.
void write_weights_csv(const std::filesystem::path& path, const Vec& w,
                       const SparsityPattern& pattern);

// Validates the header against the pattern before reading the row.
Vec read_weights_csv(const std::filesystem::path& path,
                     const SparsityPattern& pattern);

// Dense matrix with header c0..c{p-1}.
void write_dense_csv(const std::filesystem::path& path, const Mat& M);

// Per-step log (k, x, u, r_k, c_k); the RNG seed heads the file.
void write_steps_csv(const std::filesystem::path& path,
                     const std::vector<StepRecord>& steps, std::uint64_t seed);

// Per-sweep log (i, dw, e_I, e_II); error columns are empty when no
// oracle weights were supplied.
void write_iterations_csv(const std::filesystem::path& path,
                          const std::vector<IterationRecord>& iterations,
                          std::uint64_t seed);

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRow>& rows);

// Tidy long-format plot data: series, k, value.
struct TidyRow {
  std::string series;
  long k = 0;
  double value = 0.0;
};
void write_tidy_csv(const std::filesystem::path& path,
                    const std::vector<TidyRow>& rows);

// Tabulated reference: header r1..rn, one row per time step.
std::vector<Vec> read_tabulated_csv(const std::filesystem::path& path, int n);

}  // namespace qtrack
