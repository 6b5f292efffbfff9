#include "layergen/scenegen/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "layergen/core/rng.hpp"
#include "layergen/core/shape.hpp"
#include "layergen/scenegen/png_io.hpp"

namespace layergen::scenegen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

// Crossing-number test. Strict comparisons give half-open intervals, so
// lesser-coordinate boundaries are inclusive and shared edges never double
// count.
bool point_in_polygon(const std::vector<std::pair<double, double>>& v, double px, double py) {
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const auto [xi, yi] = v[i];
        const auto [xj, yj] = v[j];
        if ((yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi) inside = !inside;
    }
    return inside;
}

std::vector<std::pair<double, double>> regular_polygon(const ObjectSpec& o, int m, double r) {
    std::vector<std::pair<double, double>> v(m);
    for (int k = 0; k < m; ++k) {
        const double a = o.rotation + kTau * k / m;
        v[k] = {o.cx + r * std::cos(a), o.cy + r * std::sin(a)};
    }
    return v;
}

std::array<double, 3> random_color(Rng& rng) {
    return {rng.uniform(), rng.uniform(), rng.uniform()};
}

}  // namespace

const char* kind_name(ShapeKind k) {
    switch (k) {
        case ShapeKind::kPolygon: return "polygon";
        case ShapeKind::kSquare: return "square";
        case ShapeKind::kEllipse: return "ellipse";
        case ShapeKind::kTriangle: return "triangle";
        case ShapeKind::kHeart: return "heart";
    }
    return "polygon";
}

ShapeKind kind_from_name(const std::string& name) {
    if (name == "polygon") return ShapeKind::kPolygon;
    if (name == "square") return ShapeKind::kSquare;
    if (name == "ellipse") return ShapeKind::kEllipse;
    if (name == "triangle") return ShapeKind::kTriangle;
    if (name == "heart") return ShapeKind::kHeart;
    throw ValueError("unknown shape kind: " + name);
}

bool object_contains(const ObjectSpec& o, double px, double py) {
    switch (o.kind) {
        case ShapeKind::kPolygon:
            return point_in_polygon(regular_polygon(o, o.edges, o.radius), px, py);
        case ShapeKind::kTriangle:
            return point_in_polygon(regular_polygon(o, 3, o.radius), px, py);
        case ShapeKind::kSquare: {
            const double c = std::cos(o.rotation), s = std::sin(o.rotation);
            std::vector<std::pair<double, double>> v(4);
            const double corners[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
            for (int k = 0; k < 4; ++k) {
                const double x = corners[k][0] * o.radius, y = corners[k][1] * o.radius;
                v[k] = {o.cx + c * x - s * y, o.cy + s * x + c * y};
            }
            return point_in_polygon(v, px, py);
        }
        case ShapeKind::kEllipse: {
            const double c = std::cos(-o.rotation), s = std::sin(-o.rotation);
            const double dx = px - o.cx, dy = py - o.cy;
            const double x = c * dx - s * dy, y = s * dx + c * dy;
            const double a = o.radius, b = 0.6 * o.radius;
            return (x / a) * (x / a) + (y / b) * (y / b) <= 1.0;
        }
        case ShapeKind::kHeart: {
            const double c = std::cos(-o.rotation), s = std::sin(-o.rotation);
            const double dx = px - o.cx, dy = py - o.cy;
            // y flipped so the heart points down the image like a sprite
            const double x = (c * dx - s * dy) * 1.25 / o.radius;
            const double y = -(s * dx + c * dy) * 1.25 / o.radius;
            const double q = x * x + y * y - 1.0;
            return q * q * q - x * x * y * y * y <= 0.0;
        }
    }
    return false;
}

SceneSpec sample_polygon_scene(std::uint64_t seed) {
    Rng rng(seed);
    SceneSpec spec;
    spec.seed = seed;
    spec.image_side = 64;
    const double center = spec.image_side / 2.0;
    for (int i = 0; i < 2; ++i) {
        ObjectSpec o;
        o.kind = ShapeKind::kPolygon;
        o.edges = 3 + rng.uniform_int(4);
        o.radius = rng.uniform_in(7.5, 12.5);
        o.cx = center + rng.uniform_in(-5.0, 5.0);
        o.cy = center + rng.uniform_in(-5.0, 5.0);
        o.rotation = rng.uniform_in(0.0, kTau);
        o.color = random_color(rng);
        spec.objects.push_back(o);
    }
    if (rng.uniform() < 0.5) std::swap(spec.objects[0], spec.objects[1]);
    return spec;
}

SceneSpec sample_sprite_scene(std::uint64_t seed, int min_objects, int max_objects, int image_side) {
    if (min_objects < 1 || min_objects > max_objects)
        throw ValueError("sample_sprite_scene: invalid object bounds [" + std::to_string(min_objects) +
                         ", " + std::to_string(max_objects) + "]");
    Rng rng(seed);
    SceneSpec spec;
    spec.seed = seed;
    spec.image_side = image_side;
    const int count = min_objects + rng.uniform_int(max_objects - min_objects + 1);
    const double margin = image_side / 6.0;
    const ShapeKind kinds[4] = {ShapeKind::kSquare, ShapeKind::kEllipse, ShapeKind::kTriangle,
                                ShapeKind::kHeart};
    for (int i = 0; i < count; ++i) {
        ObjectSpec o;
        o.kind = kinds[rng.uniform_int(4)];
        o.radius = rng.uniform_in(image_side / 10.0, image_side / 6.0);
        o.cx = rng.uniform_in(margin, image_side - margin);
        o.cy = rng.uniform_in(margin, image_side - margin);
        o.rotation = rng.uniform_in(0.0, kTau);
        o.color = random_color(rng);
        spec.objects.push_back(o);
    }
    // Fisher-Yates for a random back-to-front order
    for (int i = count - 1; i > 0; --i)
        std::swap(spec.objects[i], spec.objects[rng.uniform_int(i + 1)]);
    return spec;
}

SceneSpec sample_two_squares_scene(std::uint64_t seed) {
    Rng rng(seed);
    SceneSpec spec;
    spec.seed = seed;
    spec.image_side = 32;
    const std::array<std::array<double, 3>, 4> palette = {{{0.90, 0.15, 0.10},
                                                           {0.10, 0.80, 0.20},
                                                           {0.15, 0.25, 0.90},
                                                           {0.95, 0.85, 0.10}}};
    const double half = 5.0;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        spec.objects.clear();
        for (int i = 0; i < 2; ++i) {
            ObjectSpec o;
            o.kind = ShapeKind::kSquare;
            o.radius = half;
            o.cx = 6 + rng.uniform_int(20);
            o.cy = 6 + rng.uniform_int(20);
            o.rotation = 0.0;
            o.color = palette[rng.uniform_int(4)];
            spec.objects.push_back(o);
        }
        const double ox = std::max(0.0, 2 * half - std::abs(spec.objects[0].cx - spec.objects[1].cx));
        const double oy = std::max(0.0, 2 * half - std::abs(spec.objects[0].cy - spec.objects[1].cy));
        if (ox * oy <= 30.0) break;  // disjoint or mildly overlapping
    }
    return spec;
}

RenderedScene render(const SceneSpec& spec) {
    const int n = spec.image_side;
    const std::size_t hw = static_cast<std::size_t>(n) * n;
    const std::size_t count = spec.objects.size();

    RenderedScene out;
    out.spec = spec;
    out.amodal.assign(count, std::vector<std::uint8_t>(hw, 0));
    out.modal.assign(count, std::vector<std::uint8_t>(hw, 0));
    out.depth_rank.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        out.depth_rank[i] = static_cast<int>(count - 1 - i);  // painted last = nearest = rank 0

    for (std::size_t i = 0; i < count; ++i) {
        const auto& o = spec.objects[i];
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                if (object_contains(o, x + 0.5, y + 0.5)) out.amodal[i][y * n + x] = 1;
    }
    // modal = amodal minus everything painted later (nearer)
    for (std::size_t i = 0; i < count; ++i) {
        out.modal[i] = out.amodal[i];
        for (std::size_t j = i + 1; j < count; ++j)
            for (std::size_t p = 0; p < hw; ++p)
                if (out.amodal[j][p]) out.modal[i][p] = 0;
    }

    out.image.resize(3 * hw);
    for (int c = 0; c < 3; ++c)
        for (std::size_t p = 0; p < hw; ++p) out.image[c * hw + p] = static_cast<float>(spec.background[c]);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& o = spec.objects[i];
        for (std::size_t p = 0; p < hw; ++p)
            if (out.amodal[i][p])
                for (int c = 0; c < 3; ++c) out.image[c * hw + p] = static_cast<float>(o.color[c]);
    }
    return out;
}

namespace {

json spec_to_json(const SceneSpec& spec) {
    json objs = json::array();
    for (const auto& o : spec.objects) {
        objs.push_back({{"kind", kind_name(o.kind)},
                        {"edges", o.edges},
                        {"radius", o.radius},
                        {"center", {o.cx, o.cy}},
                        {"rotation", o.rotation},
                        {"color", {o.color[0], o.color[1], o.color[2]}}});
    }
    return json{{"seed", spec.seed},
                {"image_side", spec.image_side},
                {"background", {spec.background[0], spec.background[1], spec.background[2]}},
                {"objects", objs}};
}

SceneSpec spec_from_json(const json& j) {
    SceneSpec spec;
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.image_side = j.at("image_side").get<int>();
    for (int c = 0; c < 3; ++c) spec.background[c] = j.at("background").at(c).get<double>();
    for (const auto& jo : j.at("objects")) {
        ObjectSpec o;
        o.kind = kind_from_name(jo.at("kind").get<std::string>());
        o.edges = jo.at("edges").get<int>();
        o.radius = jo.at("radius").get<double>();
        o.cx = jo.at("center").at(0).get<double>();
        o.cy = jo.at("center").at(1).get<double>();
        o.rotation = jo.at("rotation").get<double>();
        for (int c = 0; c < 3; ++c) o.color[c] = jo.at("color").at(c).get<double>();
        spec.objects.push_back(o);
    }
    return spec;
}

std::string indexed(const char* fmt, int a, int b = -1) {
    char buf[64];
    if (b < 0)
        std::snprintf(buf, sizeof(buf), fmt, a);
    else
        std::snprintf(buf, sizeof(buf), fmt, a, b);
    return buf;
}

png::Image to_png_rgb(const std::vector<float>& chw, int n) {
    png::Image img;
    img.width = img.height = n;
    img.channels = 3;
    img.pixels.resize(static_cast<std::size_t>(n) * n * 3);
    const std::size_t hw = static_cast<std::size_t>(n) * n;
    for (std::size_t p = 0; p < hw; ++p)
        for (int c = 0; c < 3; ++c) {
            const float v = std::min(1.0f, std::max(0.0f, chw[c * hw + p]));
            img.pixels[p * 3 + c] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
        }
    return img;
}

png::Image to_png_mask(const std::vector<std::uint8_t>& mask, int n) {
    png::Image img;
    img.width = img.height = n;
    img.channels = 1;
    img.pixels.resize(mask.size());
    for (std::size_t p = 0; p < mask.size(); ++p) img.pixels[p] = mask[p] ? 255 : 0;
    return img;
}

}  // namespace

std::string image_path(const std::string& dir, int index) {
    return dir + "/images/" + indexed("%06d", index) + ".png";
}

std::string mask_path(const std::string& dir, int index, int object, bool modal) {
    return dir + "/masks/" + indexed("%06d_obj%02d", index, object) + (modal ? "_modal" : "_amodal") +
           ".png";
}

std::string write_dataset(const std::vector<RenderedScene>& scenes, const std::string& dir,
                          const std::string& kind, std::uint64_t global_seed) {
    if (scenes.empty()) throw ValueError("write_dataset: no scenes");
    std::error_code ec;
    fs::create_directories(dir + "/images", ec);
    fs::create_directories(dir + "/masks", ec);
    if (ec) throw IoError("write_dataset: cannot create " + dir + ": " + ec.message());

    const int total = static_cast<int>(scenes.size());
    const int train = total - total / 10;  // 90/10 split

    std::ofstream meta(dir + "/meta.jsonl", std::ios::trunc);
    if (!meta) throw IoError("write_dataset: cannot open " + dir + "/meta.jsonl");
    for (int i = 0; i < total; ++i) {
        const auto& scene = scenes[i];
        png::write(image_path(dir, i), to_png_rgb(scene.image, scene.spec.image_side));
        for (std::size_t o = 0; o < scene.amodal.size(); ++o) {
            png::write(mask_path(dir, i, static_cast<int>(o), true),
                       to_png_mask(scene.modal[o], scene.spec.image_side));
            png::write(mask_path(dir, i, static_cast<int>(o), false),
                       to_png_mask(scene.amodal[o], scene.spec.image_side));
        }
        json rec = {{"index", i},
                    {"split", i < train ? "train" : "eval"},
                    {"spec", spec_to_json(scene.spec)},
                    {"depth_rank", scene.depth_rank}};
        meta << rec.dump() << "\n";
    }
    meta.close();
    if (!meta) throw IoError("write_dataset: short write to " + dir + "/meta.jsonl");

    json manifest = {{"version", "layergen-dataset-1"},
                     {"kind", kind},
                     {"global_seed", global_seed},
                     {"count", total},
                     {"train_count", train},
                     {"eval_count", total - train},
                     {"image_side", scenes[0].spec.image_side}};
    const std::string manifest_path = dir + "/manifest.json";
    std::ofstream mf(manifest_path, std::ios::trunc);
    if (!mf) throw IoError("write_dataset: cannot open " + manifest_path);
    mf << manifest.dump(2) << "\n";
    mf.close();
    if (!mf) throw IoError("write_dataset: short write to " + manifest_path);
    return manifest_path;
}

DatasetInfo load_dataset(const std::string& dir) {
    std::ifstream mf(dir + "/manifest.json");
    if (!mf) throw IoError("load_dataset: cannot open " + dir + "/manifest.json");
    json manifest = json::parse(mf, nullptr, true);

    DatasetInfo info;
    info.dir = dir;
    info.kind = manifest.at("kind").get<std::string>();
    info.global_seed = manifest.at("global_seed").get<std::uint64_t>();
    info.image_side = manifest.at("image_side").get<int>();

    std::ifstream meta(dir + "/meta.jsonl");
    if (!meta) throw IoError("load_dataset: cannot open " + dir + "/meta.jsonl");
    std::string line;
    while (std::getline(meta, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        SceneRecord rec;
        rec.index = j.at("index").get<int>();
        rec.split = j.at("split").get<std::string>();
        rec.spec = spec_from_json(j.at("spec"));
        rec.depth_rank = j.at("depth_rank").get<std::vector<int>>();
        info.records.push_back(std::move(rec));
    }
    if (info.records.empty()) throw IoError("load_dataset: " + dir + "/meta.jsonl has no records");
    return info;
}

std::vector<float> load_image_chw(const std::string& path, int expected_side) {
    png::Image img = png::read(path);
    if (img.channels != 3 || img.width != expected_side || img.height != expected_side)
        throw IoError("load_image_chw: " + path + " is not a " + std::to_string(expected_side) +
                      "px RGB image");
    const std::size_t hw = static_cast<std::size_t>(img.width) * img.height;
    std::vector<float> out(3 * hw);
    for (std::size_t p = 0; p < hw; ++p)
        for (int c = 0; c < 3; ++c) out[c * hw + p] = static_cast<float>(img.pixels[p * 3 + c]) / 255.0f;
    return out;
}

std::vector<std::uint8_t> load_mask(const std::string& path) {
    png::Image img = png::read(path);
    if (img.channels != 1) throw IoError("load_mask: " + path + " is not grayscale");
    std::vector<std::uint8_t> out(img.pixels.size());
    for (std::size_t p = 0; p < img.pixels.size(); ++p) out[p] = img.pixels[p] >= 128 ? 1 : 0;
    return out;
}

std::vector<RenderedScene> generate_scenes(const std::string& kind, int count, std::uint64_t seed,
                                           int min_objects, int max_objects) {
    if (count < 1) throw ValueError("generate_scenes: count must be positive");
    std::vector<RenderedScene> scenes;
    scenes.reserve(count);
    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = Rng::mix(seed, static_cast<std::uint64_t>(i));
        SceneSpec spec;
        if (kind == "polygons")
            spec = sample_polygon_scene(s);
        else if (kind == "sprites")
            spec = sample_sprite_scene(s, min_objects, max_objects);
        else if (kind == "two-squares")
            spec = sample_two_squares_scene(s);
        else
            throw ValueError("generate_scenes: unknown kind " + kind);
        scenes.push_back(render(spec));
    }
    return scenes;
}

}  // namespace layergen::scenegen
