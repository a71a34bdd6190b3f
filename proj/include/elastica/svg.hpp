#pragma once

#include <string>

#include "elastica/scenario.hpp"

namespace elastica {

struct SvgStyle {
  double width = 900.0;
  double height = 560.0;
  double margin = 70.0;
  double inset_size = 60.0;
  std::string title;
};

/// Ordinate against the swept parameter: solid paths where the index is 0,
/// dashed where it is positive, a marker at every fold and a small centerline
/// glyph at each labeled point.  Paths are split at folds.
std::string render_svg(const BranchArtifact& artifact, const SvgStyle& style = {});

}  // namespace elastica
