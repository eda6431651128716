#ifndef CAMEXT_CLI_DATASET_H_
#define CAMEXT_CLI_DATASET_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camext/geometry.h"
#include "camext/horizon_vp.h"
#include "camext/kitti_io.h"
#include "camext/raster.h"

namespace camext::cli {

namespace fs = std::filesystem;

// File-system helpers; all failures throw Error(kIo) naming the path.
std::string ReadFile(const fs::path& path);
void WriteFile(const fs::path& path, std::string_view contents);
void RequireDirectory(const fs::path& path, std::string_view what);
void RequireFile(const fs::path& path, std::string_view what);

// Stems of the *.txt files in `dir`, sorted.
std::vector<std::string> ListFrameIds(const fs::path& dir);

// Labels for one frame; a missing file yields an empty list when
// `missing_ok`.
std::vector<ObjectLabel> LoadLabels(const fs::path& dir, const std::string& id,
                                    bool missing_ok);

CameraIntrinsics LoadIntrinsics(const fs::path& calib_dir,
                                const std::string& id);

struct LoadedImage {
  RasterImage image;
  std::string extension;  // ".ppm" or ".pgm"
};
std::optional<LoadedImage> LoadImage(const fs::path& dir,
                                     const std::string& id);

// JSON lines: {"frame_id", "horizon_slope", "horizon_intercept_v", "vp_u",
// "vp_v"}.
struct HorizonVpRecord {
  std::string frame_id;
  HorizonObservation observation;
};
std::string WriteHorizonVpFile(const std::vector<HorizonVpRecord>& records);
std::vector<HorizonVpRecord> ParseHorizonVpFile(std::string_view text);

}  // namespace camext::cli

#endif  // CAMEXT_CLI_DATASET_H_
