#pragma once

#include <filesystem>
#include <set>
#include <string>

#include "oip/analysis.hpp"

namespace oip::analysis {

enum class RenderFormat { Csv, Markdown, Svg };

/// Writes the report under out_dir/<report name>/ with fixed file names:
/// one CSV per table, report.md, and one SVG per figure. Byte-deterministic
/// for fixed inputs. Throws UnsupportedFormat for formats outside the set.
std::vector<std::filesystem::path> render_report(const AnalysisReport& report,
                                                 const std::set<RenderFormat>& formats,
                                                 const std::filesystem::path& out_dir);

std::string table_to_csv(const Table& table);
std::string report_to_markdown(const AnalysisReport& report);
std::string figure_to_svg(const Figure& figure);

}  // namespace oip::analysis
