#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "axnn/dataset.hpp"

namespace axnn {

struct CsvSchema {
  std::string target = "y";
  /// Covariates to read, in order. Empty means every non-target column.
  std::vector<std::string> features;
  std::optional<Task> task;  // inferred as regression when unset
};

/// Comma separated, one header row, '.' decimals, no quoting.
Dataset read_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
/// Feature columns then the target; 17 significant digits.
void write_csv(const Dataset& data, const std::filesystem::path& path);
/// One column per true component, plus the noiseless total "f".
void write_components_csv(const Dataset& data, const std::filesystem::path& path);
std::vector<Component> read_components_csv(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace axnn
