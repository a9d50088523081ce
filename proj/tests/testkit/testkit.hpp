#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "seedo/evaluator.hpp"
#include "seedo/keyframe_select.hpp"
#include "seedo/plan_model.hpp"
#include "seedo/visual_prompt.hpp"
#include "seedo/vlm_interpreter.hpp"

namespace testkit {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

seedo::ObjectRef obj(const std::string& name);
seedo::ObjectRef obj(const std::string& name, int id);
seedo::PlanStep step(const std::string& picked, seedo::SpatialRelation relation, const std::string& reference);
seedo::Plan plan(std::vector<seedo::PlanStep> steps);

/// Up to `max_steps` steps over `objects` object names and all six relations;
/// picked != reference always.
seedo::Plan random_plan(std::mt19937& rng, int max_steps, int objects);

namespace oracle {

/// Two-pointer greedy in-order matching written independently of the library:
/// every predicted step scans the ground truth forward from the cursor.
std::size_t greedy_matches(const seedo::Plan& pred, const seedo::Plan& gt);
std::size_t lcs_length(const seedo::Plan& pred, const seedo::Plan& gt);

/// Centered moving average truncated at the edges, straight from the definition.
std::vector<double> truncated_mean(const std::vector<double>& values, int window);

/// Centroid of the polygon's pixel mass, by even-odd sampling on a grid of
/// `samples_per_unit` points per unit length.
Eigen::Vector2d pixel_mass_centroid(const seedo::PointListd& polygon, int samples_per_unit);

/// Local minima (plateaus collapsed to their middle) of a sequence.
std::vector<int> brute_force_minima(const std::vector<double>& values);

}  // namespace oracle

/// Synthetic speed series with `k` planted dips, 10% of frames missing.
struct PlantedSeries {
  seedo::SpeedSeries series;
  std::vector<int> dips;
  seedo::SelectionParams params;
};
PlantedSeries planted_dips(std::uint32_t seed, int k, int frames = 300);

/// Two keyframes (pick of the red chili, drop into the white bowl) on small
/// synthetic frames, plus the canned answers of the worked chili example.
namespace prompt1 {

inline constexpr const char* kPlanLine = "Drop red chili in the white bowl";

seedo::PromptBundle bundle(const std::string& video_id = "prompt1");
std::map<std::string, std::string> responses(const seedo::PromptBundle& bundle,
                                             const seedo::InterpreterOptions& options = {});
seedo::Plan ground_truth();

/// Writes frame PNGs, keyframes, tracks and the fixture files so the CLI
/// pipeline can run from disk. Returns the frames directory.
struct OnDisk {
  std::filesystem::path frames_dir;
  std::filesystem::path keyframes;
  std::filesystem::path tracks;
  std::filesystem::path fixtures_dir;
  std::filesystem::path gt;
};
OnDisk write_inputs(const std::filesystem::path& root, const std::string& video_id = "prompt1");

}  // namespace prompt1

}  // namespace testkit
