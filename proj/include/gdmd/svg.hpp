#pragma once

#include <Eigen/Core>

#include <complex>
#include <string>

#include "gdmd/innovation.hpp"

namespace gdmd {

/// Deterministic standalone SVG documents (valid XML, no external deps).

/// Line plot of r_k vs k on a [0,1] axis.
std::string svg_profile(const InnovationProfile& p, const std::string& title);

/// Heatmap of r_{l,k}: one cell per (l,k), value 0 black .. 1 white,
/// absent cells left blank.
std::string svg_spectrogram(const GapSpectrogram& sg, const std::string& title);

/// Eigenvalues overlaid on the unit circle.
std::string svg_unit_circle(const Eigen::VectorXcd& eigenvalues, const std::string& title);

} // namespace gdmd
