#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mccs::svg {

struct Heatmap {
    std::string title;
    std::vector<std::string> row_labels;
    std::vector<std::string> column_labels;
    std::vector<std::vector<std::optional<double>>> values;  // rows x columns; absent cells are grey
    /// Diverging scale symmetric around zero up to this magnitude; 0 = max |value|.
    double scale = 0.0;
    /// Multiplier and suffix for the printed cell text (e.g. 100 and "%").
    double display_factor = 1.0;
    std::string display_suffix;
    bool show_text = true;
    int cell_width = 64;
    int cell_height = 18;
};

/// Blue (negative) - white - red (positive) heatmap. Each cell carries its exact
/// value in a data-value attribute and a title tooltip.
std::string render(const Heatmap& heatmap);
void write(const std::filesystem::path& path, const Heatmap& heatmap);

}  // namespace mccs::svg
