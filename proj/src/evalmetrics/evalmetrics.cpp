#include "layergen/evalmetrics/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "layergen/core/shape.hpp"

namespace layergen::evalmetrics {

using nlohmann::json;

double iou(const Mask& a, const Mask& b) {
    if (a.size() != b.size())
        throw ShapeError("iou: mask sizes differ, " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool x = a[i] != 0, y = b[i] != 0;
        inter += static_cast<std::size_t>(x && y);
        uni += static_cast<std::size_t>(x || y);
    }
    if (uni == 0) return 1.0;  // both empty
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// Potential-based shortest augmenting path, O(n^3), minimizing cost.
// Rows/columns are 1-indexed internally; p[j] is the row matched to column j.
static std::vector<int> assignment_min_cost(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

std::vector<int> max_total_assignment(const std::vector<std::vector<double>>& score) {
    const int rows = static_cast<int>(score.size());
    if (rows == 0) return {};
    const int cols = static_cast<int>(score[0].size());
    const int n = std::max(rows, cols);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(score[i].size()) != cols)
            throw ShapeError("max_total_assignment: ragged score matrix");
        for (int j = 0; j < cols; ++j) cost[i][j] = -score[i][j];
    }
    auto assign = assignment_min_cost(cost);
    assign.resize(rows);
    for (int i = 0; i < rows; ++i)
        if (assign[i] >= cols) assign[i] = -1;  // matched to a padding column
    return assign;
}

std::vector<int> hungarian_match(const std::vector<Mask>& gt_modal, const std::vector<Mask>& pred_modal) {
    std::vector<std::vector<double>> score(gt_modal.size(), std::vector<double>(pred_modal.size(), 0.0));
    for (std::size_t i = 0; i < gt_modal.size(); ++i)
        for (std::size_t j = 0; j < pred_modal.size(); ++j) score[i][j] = iou(gt_modal[i], pred_modal[j]);
    return max_total_assignment(score);
}

double mse(const std::vector<float>& x, const std::vector<float>& reconstruction) {
    if (x.size() != reconstruction.size())
        throw ShapeError("mse: sizes differ, " + std::to_string(x.size()) + " vs " +
                         std::to_string(reconstruction.size()));
    double acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = static_cast<double>(x[i]) - static_cast<double>(reconstruction[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(x.size());
}

template <typename T>
ExtractedMasks masks_from_alphas(const std::vector<std::vector<T>>& placed_alphas,
                                 const std::vector<double>& depths, double threshold) {
    if (placed_alphas.size() != depths.size())
        throw ShapeError("masks_from_alphas: alpha/depth count mismatch");
    ExtractedMasks out;
    const std::size_t j_count = placed_alphas.size();
    const std::size_t hw = j_count > 0 ? placed_alphas[0].size() : 0;
    out.amodal.assign(j_count, Mask(hw, 0));
    out.modal.assign(j_count, Mask(hw, 0));
    out.labels.assign(hw, -1);
    for (std::size_t p = 0; p < hw; ++p) {
        int best = -1;
        for (std::size_t j = 0; j < j_count; ++j) {
            if (static_cast<double>(placed_alphas[j][p]) > threshold) {
                out.amodal[j][p] = 1;
                if (best < 0 || depths[j] < depths[best]) best = static_cast<int>(j);
            }
        }
        if (best >= 0) {
            out.labels[p] = best;
            out.modal[best][p] = 1;
        }
    }
    return out;
}

template ExtractedMasks masks_from_alphas<float>(const std::vector<std::vector<float>>&,
                                                 const std::vector<double>&, double);
template ExtractedMasks masks_from_alphas<double>(const std::vector<std::vector<double>>&,
                                                  const std::vector<double>&, double);

SceneMetrics evaluate_scene(const std::vector<Mask>& gt_modal, const std::vector<Mask>& gt_amodal,
                            const std::vector<int>& gt_rank, const std::vector<Mask>& pred_modal,
                            const std::vector<Mask>& pred_amodal, const std::vector<double>& pred_depth,
                            const std::vector<float>& image, const std::vector<float>& reconstruction,
                            int min_overlap_pixels) {
    const std::size_t g = gt_modal.size();
    if (gt_amodal.size() != g || gt_rank.size() != g)
        throw ShapeError("evaluate_scene: inconsistent ground truth");
    if (pred_amodal.size() != pred_modal.size() || pred_depth.size() != pred_modal.size())
        throw ShapeError("evaluate_scene: inconsistent predictions");

    SceneMetrics m;
    m.assignment = hungarian_match(gt_modal, pred_modal);
    double miou_sum = 0, aiou_sum = 0;
    for (std::size_t i = 0; i < g; ++i) {
        const int j = m.assignment[i];
        if (j >= 0) {
            miou_sum += iou(gt_modal[i], pred_modal[j]);
            aiou_sum += iou(gt_amodal[i], pred_amodal[j]);
        }
        // unmatched ground truth contributes zero
    }
    m.miou = g > 0 ? miou_sum / static_cast<double>(g) : 1.0;
    m.aiou = g > 0 ? aiou_sum / static_cast<double>(g) : 1.0;
    m.mse = mse(image, reconstruction);

    // depth pairs over matched ground-truth objects
    for (std::size_t a = 0; a < g; ++a) {
        for (std::size_t b = a + 1; b < g; ++b) {
            if (m.assignment[a] < 0 || m.assignment[b] < 0) continue;
            int overlap = 0;
            for (std::size_t p = 0; p < gt_amodal[a].size(); ++p)
                overlap += static_cast<int>(gt_amodal[a][p] != 0 && gt_amodal[b][p] != 0);
            if (overlap == 0) continue;
            const bool gt_a_nearer = gt_rank[a] < gt_rank[b];
            const bool pred_a_nearer = pred_depth[m.assignment[a]] < pred_depth[m.assignment[b]];
            m.pairs.push_back({overlap, gt_a_nearer == pred_a_nearer});
        }
    }
    int qualifying = 0, correct = 0;
    for (const auto& p : m.pairs) {
        if (p.overlap_pixels >= min_overlap_pixels) {
            ++qualifying;
            correct += static_cast<int>(p.correct);
        }
    }
    if (qualifying > 0) m.dpa = static_cast<double>(correct) / qualifying;
    return m;
}

Report aggregate(const std::vector<SceneMetrics>& scenes) {
    Report r;
    r.scene_count = static_cast<int>(scenes.size());
    std::vector<DepthPair> all_pairs;
    for (int i = 0; i < r.scene_count; ++i) {
        const auto& s = scenes[i];
        r.miou += s.miou;
        r.aiou += s.aiou;
        r.mse += s.mse;
        all_pairs.insert(all_pairs.end(), s.pairs.begin(), s.pairs.end());
        r.rows.push_back({i, s.miou, s.aiou, s.mse, s.dpa});
    }
    if (r.scene_count > 0) {
        r.miou /= r.scene_count;
        r.aiou /= r.scene_count;
        r.mse /= r.scene_count;
    }
    for (int threshold = 0; threshold <= 90; threshold += 10) {
        int qualifying = 0, correct = 0;
        for (const auto& p : all_pairs) {
            if (p.overlap_pixels >= threshold) {
                ++qualifying;
                correct += static_cast<int>(p.correct);
            }
        }
        SweepRow row;
        row.threshold = threshold;
        row.pairs = qualifying;
        if (qualifying > 0) row.dpa = static_cast<double>(correct) / qualifying;
        r.sweep.push_back(row);
        if (threshold == 30) r.dpa = row.dpa;
    }
    return r;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void write_report(const Report& report, const std::string& json_path, const std::string& csv_path) {
    json sweep = json::array();
    for (const auto& row : report.sweep) {
        json r = {{"threshold", row.threshold}, {"pairs", row.pairs}};
        if (row.dpa)
            r["dpa"] = *row.dpa;
        else
            r["dpa"] = nullptr;
        sweep.push_back(r);
    }
    json doc = {{"scene_count", report.scene_count},
                {"miou", report.miou},
                {"aiou", report.aiou},
                {"mse", report.mse},
                {"dpa", report.dpa ? json(*report.dpa) : json(nullptr)},
                {"dpa_min_overlap", 30},
                {"dpa_sweep", sweep}};
    std::ofstream jf(json_path, std::ios::trunc);
    if (!jf) throw IoError("write_report: cannot open " + json_path);
    jf << doc.dump(2) << "\n";
    jf.close();
    if (!jf) throw IoError("write_report: short write to " + json_path);

    std::ofstream cf(csv_path, std::ios::trunc);
    if (!cf) throw IoError("write_report: cannot open " + csv_path);
    cf << "scene_id,miou,aiou,dpa,mse\n";
    for (const auto& row : report.rows) {
        cf << row.scene_id << "," << fmt_double(row.miou) << "," << fmt_double(row.aiou) << ","
           << (row.dpa ? fmt_double(*row.dpa) : std::string()) << "," << fmt_double(row.mse) << "\n";
    }
    cf.close();
    if (!cf) throw IoError("write_report: short write to " + csv_path);

    std::string sweep_path = csv_path;
    const auto dot = sweep_path.rfind(".csv");
    if (dot != std::string::npos)
        sweep_path = sweep_path.substr(0, dot) + "_sweep.csv";
    else
        sweep_path += "_sweep.csv";
    std::ofstream sf(sweep_path, std::ios::trunc);
    if (!sf) throw IoError("write_report: cannot open " + sweep_path);
    sf << "threshold,dpa,pairs\n";
    for (const auto& row : report.sweep)
        sf << row.threshold << "," << (row.dpa ? fmt_double(*row.dpa) : std::string()) << "," << row.pairs
           << "\n";
    sf.close();
    if (!sf) throw IoError("write_report: short write to " + sweep_path);
}

}  // namespace layergen::evalmetrics
