#include "dataset.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "camext/error.h"

namespace camext::cli {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "error reading " + path.string());
  return ss.str();
}

void WriteFile(const fs::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "error writing " + path.string());
}

void RequireDirectory(const fs::path& path, std::string_view what) {
  std::error_code ec;
  if (!fs::is_directory(path, ec)) {
    throw Error(ErrorCode::kIo, std::string(what) + " directory not found: " +
                                    path.string());
  }
}

void RequireFile(const fs::path& path, std::string_view what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kIo,
                std::string(what) + " file not found: " + path.string());
  }
}

std::vector<std::string> ListFrameIds(const fs::path& dir) {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      ids.push_back(entry.path().stem().string());
    }
  }
  if (ec) throw Error(ErrorCode::kIo, "cannot list " + dir.string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<ObjectLabel> LoadLabels(const fs::path& dir, const std::string& id,
                                    bool missing_ok) {
  const fs::path path = dir / (id + ".txt");
  std::error_code ec;
  if (missing_ok && !fs::exists(path, ec)) return {};
  try {
    return ParseLabelFile(ReadFile(path));
  } catch (const ParseError& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

CameraIntrinsics LoadIntrinsics(const fs::path& calib_dir,
                                const std::string& id) {
  const fs::path path = calib_dir / (id + ".txt");
  return ParseCalibFile(ReadFile(path)).Intrinsics();
}

std::optional<LoadedImage> LoadImage(const fs::path& dir,
                                     const std::string& id) {
  for (const char* ext : {".ppm", ".pgm"}) {
    const fs::path path = dir / (id + ext);
    std::error_code ec;
    if (fs::exists(path, ec)) {
      return LoadedImage{DecodeNetpbm(ReadFile(path)), ext};
    }
  }
  return std::nullopt;
}

std::string WriteHorizonVpFile(const std::vector<HorizonVpRecord>& records) {
  std::string out;
  for (const HorizonVpRecord& r : records) {
    nlohmann::ordered_json j;
    j["frame_id"] = r.frame_id;
    j["horizon_slope"] = r.observation.horizon.slope;
    j["horizon_intercept_v"] = r.observation.horizon.intercept_v;
    j["vp_u"] = r.observation.vp.u;
    j["vp_v"] = r.observation.vp.v;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<HorizonVpRecord> ParseHorizonVpFile(std::string_view text) {
  std::vector<HorizonVpRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      HorizonVpRecord r;
      r.frame_id = j.at("frame_id").get<std::string>();
      r.observation.horizon.slope = j.at("horizon_slope").get<double>();
      r.observation.horizon.intercept_v =
          j.at("horizon_intercept_v").get<double>();
      r.observation.vp.u = j.at("vp_u").get<double>();
      r.observation.vp.v = j.at("vp_v").get<double>();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(ErrorCode::kMalformedLine, line_no, e.what());
    }
  }
  return records;
}

}  // namespace camext::cli
