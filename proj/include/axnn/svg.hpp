#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "axnn/matrix.hpp"

namespace axnn::svg {

std::string escape(std::string_view text);

/// Horizontal bars, one per label, in the order given.
std::string bar_chart(std::string_view title, std::span<const std::string> labels,
                      std::span<const double> values);

std::string line_chart(std::string_view title, std::string_view x_label, std::string_view y_label,
                       std::span<const double> xs, std::span<const double> ys);

/// z is grid_y.size() x grid_x.size(); cells are coloured on a diverging scale.
std::string heatmap(std::string_view title, std::string_view x_label, std::string_view y_label,
                    std::span<const double> grid_x, std::span<const double> grid_y, const Matrix& z);

std::string histogram(std::string_view title, std::string_view x_label, std::span<const double> values,
                      std::size_t bins, double lo, double hi);

void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace axnn::svg
