#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace layergen::evalmetrics {

using Mask = std::vector<std::uint8_t>;  // 0/1 per pixel

// |A n B| / |A u B|; 1 when both masks are empty, 0 when exactly one is.
double iou(const Mask& a, const Mask& b);

// Maximizes the total score over injective assignments (Hungarian / Kuhn-
// Munkres on the negated scores). Returns row -> column, -1 for unmatched
// rows when columns run short. Deterministic for ties.
std::vector<int> max_total_assignment(const std::vector<std::vector<double>>& score);

// assignment of ground-truth objects to predictions by modal-mask IOU
std::vector<int> hungarian_match(const std::vector<Mask>& gt_modal, const std::vector<Mask>& pred_modal);

double mse(const std::vector<float>& x, const std::vector<float>& reconstruction);

// Modal/amodal prediction masks from placed alpha maps: amodal_j is
// alpha_j > threshold; each pixel's modal label is the nearest (smallest
// depth) object exceeding the threshold, background otherwise (-1).
struct ExtractedMasks {
    std::vector<Mask> modal;
    std::vector<Mask> amodal;
    std::vector<int> labels;  // per pixel, -1 = background
};

template <typename T>
ExtractedMasks masks_from_alphas(const std::vector<std::vector<T>>& placed_alphas,
                                 const std::vector<double>& depths, double threshold = 0.3);

// one ground-truth object pair that overlaps somewhere, for the DPA sweep
struct DepthPair {
    int overlap_pixels = 0;  // on ground-truth amodal masks
    bool correct = false;    // predicted order matches ground truth
};

struct SceneMetrics {
    std::vector<int> assignment;
    double miou = 0;
    double aiou = 0;
    double mse = 0;
    std::optional<double> dpa;  // at the default 30-pixel threshold
    std::vector<DepthPair> pairs;
};

// Unmatched ground-truth objects contribute IOU 0. Depth pairs qualify on
// ground-truth amodal overlap; order convention: smaller rank and smaller
// predicted depth both mean nearer.
SceneMetrics evaluate_scene(const std::vector<Mask>& gt_modal, const std::vector<Mask>& gt_amodal,
                            const std::vector<int>& gt_rank, const std::vector<Mask>& pred_modal,
                            const std::vector<Mask>& pred_amodal, const std::vector<double>& pred_depth,
                            const std::vector<float>& image, const std::vector<float>& reconstruction,
                            int min_overlap_pixels = 30);

struct SweepRow {
    int threshold = 0;
    std::optional<double> dpa;
    int pairs = 0;
};

struct SceneRow {
    int scene_id = 0;
    double miou = 0, aiou = 0, mse = 0;
    std::optional<double> dpa;
};

struct Report {
    int scene_count = 0;
    double miou = 0, aiou = 0, mse = 0;       // means over scenes
    std::optional<double> dpa;                // pooled over qualifying pairs at 30 px
    std::vector<SweepRow> sweep;              // thresholds 0, 10, ..., 90
    std::vector<SceneRow> rows;
};

Report aggregate(const std::vector<SceneMetrics>& scenes);

// JSON document plus a flat CSV of per-scene rows; the DPA sweep lands in
// the JSON and in <csv_path minus extension>_sweep.csv.
void write_report(const Report& report, const std::string& json_path, const std::string& csv_path);

}  // namespace layergen::evalmetrics
