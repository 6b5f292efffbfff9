#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace layergen::scenegen {

enum class ShapeKind { kPolygon, kSquare, kEllipse, kTriangle, kHeart };

const char* kind_name(ShapeKind k);
ShapeKind kind_from_name(const std::string& name);

struct ObjectSpec {
    ShapeKind kind = ShapeKind::kPolygon;
    int edges = 0;       // regular polygons only
    double radius = 0;   // circumradius / half-extent in pixels
    double cx = 0;       // center, real pixel coordinates (column)
    double cy = 0;       // row
    double rotation = 0; // radians
    std::array<double, 3> color{0, 0, 0};
};

// Objects are stored in paint order, back to front; the last object is the
// nearest. depth ranks derive from this order (rank 0 = nearest).
struct SceneSpec {
    std::uint64_t seed = 0;
    int image_side = 64;
    std::array<double, 3> background{0, 0, 0};
    std::vector<ObjectSpec> objects;
};

struct RenderedScene {
    SceneSpec spec;
    std::vector<float> image;                        // [3, N, N] in [0, 1]
    std::vector<std::vector<std::uint8_t>> amodal;   // per object (paint order), N*N, 1 = member
    std::vector<std::vector<std::uint8_t>> modal;    // visible pixels only
    std::vector<int> depth_rank;                     // per object, 0 = nearest
};

// overlapping-polygons recipe: 2 filled polygons with 3-6 edges, radius in
// [7.5, 12.5], uniform RGB, centers offset up to 5 px from the image
// center, 64 x 64 over black, random back-to-front order.
SceneSpec sample_polygon_scene(std::uint64_t seed);

// sprite arrangements (squares, ellipses, triangles, hearts) with random
// pose, color and paint order.
SceneSpec sample_sprite_scene(std::uint64_t seed, int min_objects, int max_objects,
                              int image_side = 64);

// 32 x 32 toy set: two fixed-size axis-aligned squares from a four-color
// palette, disjoint or mildly overlapping; learnable in minutes.
SceneSpec sample_two_squares_scene(std::uint64_t seed);

// Painter's-algorithm rasterization at pixel centers, no anti-aliasing.
// A pixel belongs to a shape iff its center lies inside; boundaries on the
// lesser-coordinate edges are inclusive (half-open intervals).
RenderedScene render(const SceneSpec& spec);

bool object_contains(const ObjectSpec& o, double px, double py);

// On-disk layout:
//   images/%06d.png                         8-bit RGB
//   masks/%06d_obj%02d_modal.png            8-bit gray, 255 = member
//   masks/%06d_obj%02d_amodal.png
//   meta.jsonl                              one record per scene
//   manifest.json                           seed, counts, generator version
// The first 90% of scenes are the train split, the rest eval.
std::string write_dataset(const std::vector<RenderedScene>& scenes, const std::string& dir,
                          const std::string& kind, std::uint64_t global_seed);

struct SceneRecord {
    int index = 0;
    std::string split;   // "train" | "eval"
    SceneSpec spec;
    std::vector<int> depth_rank;
};

struct DatasetInfo {
    std::string dir;
    std::string kind;
    std::uint64_t global_seed = 0;
    int image_side = 0;
    std::vector<SceneRecord> records;
};

DatasetInfo load_dataset(const std::string& dir);

std::string image_path(const std::string& dir, int index);
std::string mask_path(const std::string& dir, int index, int object, bool modal);

// PNG -> float [3, N, N] in [0, 1]
std::vector<float> load_image_chw(const std::string& path, int expected_side);
// grayscale PNG -> 0/1 mask
std::vector<std::uint8_t> load_mask(const std::string& path);

// convenience used by the CLI: sample + render `count` scenes with
// per-index seeds derived from `seed`
std::vector<RenderedScene> generate_scenes(const std::string& kind, int count, std::uint64_t seed,
                                           int min_objects = 2, int max_objects = 4);

}  // namespace layergen::scenegen
