#pragma once

#include <string>
#include <vector>

#include "tailfield/common.hpp"
#include "tailfield/simulate.hpp"

namespace tailfield {

// Locale-independent formatting with 17 significant digits; round-trips
// doubles exactly.
std::string format_double(double v);

// First row: grid locations. Subsequent rows: trajectories.
void write_sample_csv(const std::string& path, const FunctionalSample& sample);

FunctionalSample read_sample_csv(const std::string& path);

// Sidecar metadata (seed, model tag, shape) next to a sample CSV.
void write_sample_metadata(const std::string& path, const FunctionalSample& sample);

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header = {});

std::string metadata_path_for(const std::string& csv_path);

}  // namespace tailfield
