#pragma once

#include <string>
#include <vector>

#include "fracap/analysis.hpp"
#include "fracap/classical.hpp"
#include "fracap/extension.hpp"
#include "fracap/geometry.hpp"

namespace fracap {

// Shape documents:
//   {"kind":"ball","center":[...],"radius":r}
//   {"kind":"box","lo":[...],"hi":[...]}
//   {"kind":"union","parts":[...]}
//   {"kind":"voxels","origin":[...],"spacing":h,"dims":[...],"mask":"<base64>"}
Shape parseShapeJson(const std::string& text);
std::string shapeToJson(const Shape& shape);

std::string base64Encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64Decode(const std::string& text);

// bit packing for voxel masks: cell order as stored, LSB first within a byte
std::vector<std::uint8_t> packBits(const std::vector<std::uint8_t>& cells);
std::vector<std::uint8_t> unpackBits(const std::vector<std::uint8_t>& bytes,
                                     std::size_t count);

std::string capacityResultToJson(const CapacityResult& r);
std::string stabilityReportToJson(const StabilityReport& r);
std::string levelStatsToJson(const LevelStats& s);
std::string slabReportToJson(const SlabReport& r);
std::string sweepReportToJson(const SweepReport& r);
std::string sweepReportToCsv(const SweepReport& r);
std::string scanReportToJson(const ScanReport& r);
std::string scanReportToCsv(const ScanReport& r);
std::string asymmetryResultToJson(const AsymmetryResult& r);

std::string readFileText(const std::string& path);
void writeFileText(const std::string& path, const std::string& text);

}  // namespace fracap
