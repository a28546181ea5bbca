#pragma once

#include <string>
#include <vector>

#include "minpred/results.hpp"

namespace minpred {

// Aligned plain-text rendering of a results document (strength matrix,
// score matrix, benchmark grid or lambda-selection diagnostics).
std::string render_table(const ResultsDocument& doc);

// Heatmap of a square (or source-by-target) matrix as a static SVG grid.
std::string render_heatmap_svg(const std::vector<double>& values,
                               std::size_t rows, std::size_t cols,
                               const std::vector<std::string>& row_names,
                               const std::vector<std::string>& col_names,
                               const std::string& title);

// Predictive strength vs window horizon: one polyline per directed pair,
// across several strength-matrix documents (each carrying its K in the
// manifest config).
std::string render_strength_vs_k_svg(
    const std::vector<ResultsDocument>& strength_docs);

}  // namespace minpred
