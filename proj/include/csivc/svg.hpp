#pragma once

#include <optional>
#include <string>
#include <vector>

namespace csivc::svg {

struct Series {
  std::vector<double> x;
  std::vector<std::optional<double>> y;  // gaps break the line
};

struct Panel {
  std::string title;
  std::string x_label;
  Series median;
  Series lower;
  Series upper;
  Series truth;
};

// Self-contained SVG document with the panels side by side: shaded
// lower/upper band, solid median, dashed truth.
std::string render(const std::vector<Panel>& panels, const std::string& caption);

}  // namespace csivc::svg
