#pragma once

#include "lapeig/io.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace lapeig::plots {

/// Sorted eigenvalues against the nodal values of their paired dofs.
std::string pairing_scatter(const io::CsvTable& pairing);
/// Support intervals as whiskers with the paired eigenvalue.
std::string interval_whiskers(const io::CsvTable& pairing);
/// Gap, loose bound and first Taylor term per dof, log scale.
std::string gap_vs_bound(const io::CsvTable& bounds);
/// Relative energy error against iteration for each trace, log scale.
std::string convergence_curves(const std::vector<std::pair<std::string, io::CsvTable>>& traces);
/// Cumulative distribution as a step path in data coordinates.
std::string distribution_steps(const io::CsvTable& distribution);

/// Render every plot whose CSV inputs exist in the directory; returns the SVG paths.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir);

} // namespace lapeig::plots
