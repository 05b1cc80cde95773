#include "fracap/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fracap {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const char* kB64 = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

Point parsePoint(const json& j, int n) {
  if (!j.is_array() || (int)j.size() != n)
    throw std::runtime_error("shape file: point arity does not match dimension");
  Point p{0, 0, 0};
  for (int k = 0; k < n; ++k) p[k] = j[k].get<double>();
  return p;
}

json pointJson(const Point& p, int n) {
  json a = json::array();
  for (int k = 0; k < n; ++k) a.push_back(p[k]);
  return a;
}

Shape parseShape(const json& j) {
  if (!j.contains("kind")) throw std::runtime_error("shape file: missing kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ball") {
    const json& c = j.at("center");
    const int n = (int)c.size();
    return Shape::ball(n, parsePoint(c, n), j.at("radius").get<double>());
  }
  if (kind == "box") {
    const json& lo = j.at("lo");
    const int n = (int)lo.size();
    return Shape::box(n, parsePoint(lo, n), parsePoint(j.at("hi"), n));
  }
  if (kind == "union") {
    std::vector<Shape> parts;
    for (const auto& p : j.at("parts")) parts.push_back(parseShape(p));
    return Shape::unionOf(std::move(parts));
  }
  if (kind == "voxels") {
    VoxelMask m;
    const json& o = j.at("origin");
    m.n = (int)o.size();
    m.origin = parsePoint(o, m.n);
    m.h = j.at("spacing").get<double>();
    const json& d = j.at("dims");
    if ((int)d.size() != m.n) throw std::runtime_error("shape file: dims arity mismatch");
    for (int k = 0; k < m.n; ++k) m.dims[k] = d[k].get<int>();
    auto bytes = base64Decode(j.at("mask").get<std::string>());
    m.mask = unpackBits(bytes, m.cellCount());
    return Shape::fromVoxels(std::move(m));
  }
  throw std::runtime_error("shape file: unknown kind '" + kind + "'");
}

ordered_json shapeJson(const Shape& s) {
  ordered_json j;
  switch (s.kind) {
    case Shape::Kind::Ball:
      j["kind"] = "ball";
      j["center"] = pointJson(s.center, s.n);
      j["radius"] = s.radius;
      break;
    case Shape::Kind::Box:
      j["kind"] = "box";
      j["lo"] = pointJson(s.lo, s.n);
      j["hi"] = pointJson(s.hi, s.n);
      break;
    case Shape::Kind::Union: {
      j["kind"] = "union";
      ordered_json parts = ordered_json::array();
      for (const auto& p : s.parts) parts.push_back(shapeJson(p));
      j["parts"] = parts;
      break;
    }
    case Shape::Kind::Voxels: {
      j["kind"] = "voxels";
      j["origin"] = pointJson(s.voxels.origin, s.n);
      j["spacing"] = s.voxels.h;
      json d = json::array();
      for (int k = 0; k < s.n; ++k) d.push_back(s.voxels.dims[k]);
      j["dims"] = d;
      j["mask"] = base64Encode(packBits(s.voxels.mask));
      break;
    }
  }
  return j;
}

}  // namespace

Shape parseShapeJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("malformed shape file: ") + e.what());
  }
  return parseShape(j);
}

std::string shapeToJson(const Shape& shape) { return shapeJson(shape).dump(2); }

std::string base64Encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    std::uint32_t v = bytes[i] << 16;
    const bool b1 = i + 1 < bytes.size(), b2 = i + 2 < bytes.size();
    if (b1) v |= bytes[i + 1] << 8;
    if (b2) v |= bytes[i + 2];
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(b1 ? kB64[(v >> 6) & 63] : '=');
    out.push_back(b2 ? kB64[v & 63] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64Decode(const std::string& text) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    if (c == '=') return -1;
    throw std::runtime_error("malformed shape file: invalid base64");
  };
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '\n' || c == '\r' || c == ' ') continue;
    const int v = val(c);
    if (v < 0) break;
    acc = (acc << 6) | (std::uint32_t)v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back((std::uint8_t)((acc >> bits) & 0xFF));
    }
  }
  return out;
}

std::vector<std::uint8_t> packBits(const std::vector<std::uint8_t>& cells) {
  std::vector<std::uint8_t> bytes((cells.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i]) bytes[i / 8] |= (std::uint8_t)(1u << (i % 8));
  return bytes;
}

std::vector<std::uint8_t> unpackBits(const std::vector<std::uint8_t>& bytes,
                                     std::size_t count) {
  if (bytes.size() * 8 < count)
    throw std::runtime_error("malformed shape file: mask shorter than dims");
  std::vector<std::uint8_t> cells(count, 0);
  for (std::size_t i = 0; i < count; ++i)
    cells[i] = (bytes[i / 8] >> (i % 8)) & 1u;
  return cells;
}

std::string capacityResultToJson(const CapacityResult& r) {
  ordered_json j;
  j["value"] = r.value;
  j["energy"] = r.energy;
  j["residual"] = r.residual;
  j["h"] = r.h;
  j["R"] = r.R;
  j["iterations"] = r.iterations;
  j["method"] = r.method;
  j["farAmplitude"] = r.farAmplitude;
  j["maxPrincipleViolation"] = r.maxPrincipleViolation;
  return j.dump(2);
}

std::string stabilityReportToJson(const StabilityReport& r) {
  ordered_json j;
  j["shape"] = r.shapeId;
  j["n"] = r.n;
  j["s"] = r.s;
  j["gamma"] = r.gamma;
  j["C4"] = r.C4;
  j["capacity"]["direct"] = r.capDirect;
  if (r.capExtension) j["capacity"]["extension"] = *r.capExtension;
  j["capBallUnitRadius"] = r.capBallUnitRadius;
  j["ballCapacityEqualVolume"] = r.ballCapacityEqualVolume;
  j["volume"] = r.volume;
  j["deficit"] = r.deficit;
  j["asymmetry"] = r.asymmetry;
  j["stabilityConstant"] = r.stabilityConstantValue;
  j["stabilityConstantBranch"] = r.stabilityConstantBranch;
  j["rhs"] = r.rhs;
  j["rhsConditional"] = r.rhsConditional;
  j["branch"] = r.branch;
  j["T"] = r.T;
  j["hatT"] = r.hatT;
  j["kappa"] = r.kappa;
  j["tolerance"] = r.tolerance;
  j["unconditionalApplicable"] = r.unconditionalApplicable;
  j["unconditionalMargin"] = r.unconditionalMargin;
  j["conditionalMargin"] = r.conditionalMargin;
  if (r.smallGapChainMargin) j["smallGapChainMargin"] = *r.smallGapChainMargin;
  j["passed"] = r.passed;
  return j.dump(2);
}

std::string levelStatsToJson(const LevelStats& s) {
  ordered_json j;
  j["T"] = s.T;
  j["hatT"] = s.hatT;
  j["z0"] = s.z0;
  j["rigid"] = s.rigid;
  j["asymmetry"] = s.asymmetry;
  j["volume"] = s.volume;
  j["gamma"] = s.gamma;
  j["capValue"] = s.capValue;
  j["tSamples"] = s.tSamples;
  j["zLevels"] = s.zLevels;
  j["muZ"] = s.muZ;
  return j.dump(2);
}

std::string slabReportToJson(const SlabReport& r) {
  ordered_json j;
  j["vacuous"] = r.vacuous;
  j["windowUnresolved"] = r.windowUnresolved;
  j["cGamma"] = r.cGamma;
  j["allNonnegative"] = r.allNonnegative();
  ordered_json rows = ordered_json::array();
  for (const auto& s : r.samples) {
    ordered_json row;
    row["t"] = s.t;
    row["z"] = s.z;
    row["measure"] = s.measure;
    row["asymmetry"] = s.asym;
    row["volMargin"] = s.volMargin;
    row["asymMargin"] = s.asymMargin;
    row["fromConvolution"] = s.fromConvolution;
    rows.push_back(row);
  }
  j["samples"] = rows;
  return j.dump(2);
}

std::string sweepReportToJson(const SweepReport& r) {
  ordered_json j;
  j["classicalCap"] = r.classicalCap;
  j["target"] = r.target;
  j["extrapolated"] = r.extrapolated;
  if (r.extrapolated) {
    j["limitEstimate"] = r.limitEstimate;
    j["relError"] = r.relError;
  }
  j["upperTol"] = r.upperTol;
  ordered_json rows = ordered_json::array();
  for (const auto& p : r.points) {
    ordered_json row;
    row["s"] = p.s;
    row["caps"] = p.caps;
    row["scaled"] = p.scaled;
    row["upperBoundOk"] = p.upperBoundOk;
    rows.push_back(row);
  }
  j["points"] = rows;
  return j.dump(2);
}

std::string sweepReportToCsv(const SweepReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "s,cap_s,(1-s)cap_s,upperBoundOk\n";
  for (const auto& p : r.points)
    out << p.s << "," << p.caps << "," << p.scaled << "," << (p.upperBoundOk ? 1 : 0)
        << "\n";
  return out.str();
}

std::string scanReportToJson(const ScanReport& r) {
  ordered_json j;
  j["fitDone"] = r.fitDone;
  j["degenerate"] = r.degenerate;
  j["underdetermined"] = r.underdetermined;
  if (r.fitDone) {
    j["exponent"] = r.exponent;
    j["prefactor"] = r.prefactor;
  }
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json x;
    x["shape"] = row.name;
    x["A"] = row.A;
    x["d"] = row.d;
    x["rhs"] = row.rhs;
    x["branch"] = row.branch;
    x["margin"] = row.margin;
    rows.push_back(x);
  }
  j["rows"] = rows;
  return j.dump(2);
}

std::string scanReportToCsv(const ScanReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "shape,A,d,rhs,branch,margin\n";
  for (const auto& row : r.rows)
    out << row.name << "," << row.A << "," << row.d << "," << row.rhs << "," << row.branch
        << "," << row.margin << "\n";
  return out.str();
}

std::string asymmetryResultToJson(const AsymmetryResult& r) {
  ordered_json j;
  j["value"] = r.value;
  j["optimalCenter"] = std::vector<double>(r.optimalCenter.begin(), r.optimalCenter.end());
  j["optimalRadius"] = r.optimalRadius;
  return j.dump(2);
}

std::string readFileText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFileText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

}  // namespace fracap
