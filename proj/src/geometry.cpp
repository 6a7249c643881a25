#include "rfkit/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"

namespace rfkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTol = 1e-9;

using ojson = nlohmann::ordered_json;

void require_positive(const char* name, double v) {
    if (!std::isfinite(v) || v <= 0.0)
        throw ValidationError(std::string(name) + ": must be positive and finite, got " +
                              std::to_string(v));
}

void push_pt(std::vector<Point>& pts, Point p) {
    if (!pts.empty() && std::abs(pts.back()[0] - p[0]) < 1e-12 &&
        std::abs(pts.back()[1] - p[1]) < 1e-12)
        return;
    pts.push_back(p);
}

// Appends an arc about (cx, cy) from angle a0 to a1 (radians, CCW when
// a1 > a0), endpoints included.
void push_arc(std::vector<Point>& pts, double cx, double cy, double r, double a0, double a1) {
    int n = std::max(8, static_cast<int>(std::ceil(std::abs(a1 - a0) * 32.0 / kPi)));
    for (int i = 0; i <= n; ++i) {
        double t = a0 + (a1 - a0) * i / n;
        push_pt(pts, {cx + r * std::cos(t), cy + r * std::sin(t)});
    }
}

Polygon rect(double x0, double y0, double x1, double y1, std::string material) {
    return {std::move(material), {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

Polygon circle(double cx, double cy, double r, std::string material) {
    std::vector<Point> pts;
    push_arc(pts, cx, cy, r, 0.0, 2.0 * kPi);
    // The 0 and 2*pi endpoints coincide; drop the duplicate.
    if (pts.size() > 1 && std::abs(pts.front()[0] - pts.back()[0]) < 1e-12 &&
        std::abs(pts.front()[1] - pts.back()[1]) < 1e-12)
        pts.pop_back();
    return {std::move(material), std::move(pts)};
}

// Slot rectangle Ws x Ls with end disks of radius Rs on the short ends:
// the union outline, traversed CCW. Length runs along x.
Polygon dumbbell_outline(double Ws, double Ls, double Rs) {
    std::vector<Point> pts;
    if (Rs <= Ws / 2.0) {
        push_pt(pts, {-Ls / 2, -Ws / 2});
        push_pt(pts, {Ls / 2, -Ws / 2});
        push_pt(pts, {Ls / 2, -Rs});
        push_arc(pts, Ls / 2, 0.0, Rs, -kPi / 2, kPi / 2);
        push_pt(pts, {Ls / 2, Ws / 2});
        push_pt(pts, {-Ls / 2, Ws / 2});
        push_pt(pts, {-Ls / 2, Rs});
        push_arc(pts, -Ls / 2, 0.0, Rs, kPi / 2, 3 * kPi / 2);
        push_pt(pts, {-Ls / 2, -Ws / 2});
    } else {
        // Disks taller than the rectangle: the outline leaves the long
        // edges where the disks cross them.
        double s = std::sqrt(Rs * Rs - Ws * Ws / 4.0);
        double a = std::atan2(Ws / 2.0, -s);
        push_pt(pts, {-Ls / 2 + s, -Ws / 2});
        push_pt(pts, {Ls / 2 - s, -Ws / 2});
        push_arc(pts, Ls / 2, 0.0, Rs, -a, a);
        push_pt(pts, {-Ls / 2 + s, Ws / 2});
        push_arc(pts, -Ls / 2, 0.0, Rs, kPi - a, kPi + a);
    }
    if (pts.size() > 1 && std::abs(pts.front()[0] - pts.back()[0]) < 1e-12 &&
        std::abs(pts.front()[1] - pts.back()[1]) < 1e-12)
        pts.pop_back();
    return {"aperture", std::move(pts)};
}

// W x L rectangle with chamfers of leg R on two opposite corners
// (top-right and bottom-left). R = 0 degenerates to the plain rectangle.
Polygon chamfered_patch(double W, double L, double R) {
    if (R == 0.0) return rect(-W / 2, -L / 2, W / 2, L / 2, "metal");
    return {"metal",
            {{-W / 2 + R, -L / 2},
             {W / 2, -L / 2},
             {W / 2, L / 2 - R},
             {W / 2 - R, L / 2},
             {-W / 2, L / 2},
             {-W / 2, -L / 2 + R}}};
}

// U outline opening toward +y: outer box c wide, b tall, trace width d,
// lower-left corner at (x0, y0).
Polygon u_outline(double x0, double y0, double c, double b, double d) {
    return {"aperture",
            {{x0, y0},
             {x0 + c, y0},
             {x0 + c, y0 + b},
             {x0 + c - d, y0 + b},
             {x0 + c - d, y0 + d},
             {x0 + d, y0 + d},
             {x0 + d, y0 + b},
             {x0, y0 + b}}};
}

void check_inside(const Polygon& aperture, const Polygon& host, const char* what) {
    for (const auto& p : aperture.points)
        if (!point_in_polygon(p, host.points))
            throw ValidationError(std::string(what) + ": aperture escapes its host conductor");
}

void check_board(const GeometrySpec& spec, double half_side) {
    for (const auto& layer : spec.layers)
        for (const auto& poly : layer.polygons)
            for (const auto& p : poly.points)
                if (std::abs(p[0]) > half_side + kTol || std::abs(p[1]) > half_side + kTol)
                    throw ValidationError("layer '" + layer.name +
                                          "' extends beyond the board outline");
}

std::string fmt_mm(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

Point rotate90(const Point& p, int quarters) {
    Point q = p;
    for (int i = 0; i < ((quarters % 4) + 4) % 4; ++i) q = {-q[1], q[0]};
    return q;
}

bool point_in_polygon(const Point& p, const std::vector<Point>& loop) {
    bool inside = false;
    for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
        const Point& a = loop[i];
        const Point& b = loop[j];
        if ((a[1] > p[1]) != (b[1] > p[1]) &&
            p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0])
            inside = !inside;
    }
    return inside;
}

void validate(const ElementParams& p) {
    const std::pair<const char*, double> positives[] = {
        {"H", p.H},     {"T", p.T},   {"P", p.P},   {"K", p.K},   {"Wf1", p.Wf1},
        {"Wf2", p.Wf2}, {"Wf3", p.Wf3}, {"lf", p.lf}, {"lf2", p.lf2}, {"lf3", p.lf3},
        {"Ws", p.Ws},   {"Ls", p.Ls}, {"Rs", p.Rs}, {"W", p.W},   {"L", p.L},
        {"a", p.a},     {"b", p.b},   {"c", p.c},   {"d", p.d},   {"e", p.e},
        {"f", p.f},     {"M", p.M},   {"S", p.S},   {"N", p.N}};
    for (const auto& [name, v] : positives) require_positive(name, v);
    if (!std::isfinite(p.R) || p.R < 0.0)
        throw ValidationError("R: corner truncation must be nonnegative");

    if (p.W >= p.P) throw ValidationError("W: patch must be narrower than the board P");
    if (p.L >= p.P) throw ValidationError("L: patch must be shorter than the board P");
    if (p.Rs >= p.Ws) throw ValidationError("Rs: end-disk radius must be below the slot width Ws");
    if (p.Ls >= p.P) throw ValidationError("Ls: slot must be shorter than the board P");
    if (p.Ls + 2 * p.Rs >= p.P)
        throw ValidationError("Ls: slot with end disks must fit on the board");
    if (p.Rs > p.Ws / 2 && std::sqrt(p.Rs * p.Rs - p.Ws * p.Ws / 4) >= p.Ls / 2)
        throw ValidationError("Rs: end disks merge across the slot");
    if (p.R > 0.0 && p.R >= std::min(p.W, p.L))
        throw ValidationError("R: corner truncation exceeds the patch sides");
    if (p.lf + p.lf2 + p.lf3 > p.P)
        throw ValidationError("lf: feed segments run past the board edge");
    if (2 * p.d >= p.c) throw ValidationError("c: U-slot arms leave no opening (c <= 2d)");
    if (p.d >= p.b) throw ValidationError("b: U-slot base leaves no arms (b <= d)");
    if (p.e + p.b >= p.L) throw ValidationError("e: U-slots run past the top of the patch");
    if (p.a + p.f / 2 + p.c >= p.W / 2 || p.a - p.f / 2 - p.c <= -p.W / 2)
        throw ValidationError("a: U-slot pair runs past the side of the patch");
    if (p.N >= p.S / 2) throw ValidationError("N: ring trace swallows the whole ring (N >= S/2)");
    if (1.5 * p.M + p.S / 2 > p.P / 2)
        throw ValidationError("M: ring lattice extends beyond the board");
}

void validate(const MimoParams& p) {
    const std::pair<const char*, double> positives[] = {
        {"H", p.H},   {"K", p.K},   {"T", p.T},   {"L1", p.L1}, {"D1", p.D1}, {"D2", p.D2},
        {"D3", p.D3}, {"D4", p.D4}, {"D5", p.D5}, {"D6", p.D6}, {"D7", p.D7}, {"D8", p.D8},
        {"C1", p.C1}, {"B1", p.B1}, {"A1", p.A1}, {"g", p.g},   {"P", p.P}};
    for (const auto& [name, v] : positives) require_positive(name, v);
    if (2 * p.P + p.K > p.L1)
        throw ValidationError("L1: board cannot hold two elements plus the gap (2P + K > L1)");
    if (p.g > p.K)
        throw ValidationError("g: decoupling slot is wider than the element gap K");
    if (2 * p.C1 >= p.L1)
        throw ValidationError("C1: decoupling slot is longer than the board");
}

GeometrySpec build_element(const ElementParams& p) {
    validate(p);
    GeometrySpec spec;

    double edge = -p.P / 2;
    GeomLayer feed{"feed", -p.T, {}};
    feed.polygons.push_back(rect(-p.Wf1 / 2, edge, p.Wf1 / 2, edge + p.lf, "metal"));
    feed.polygons.push_back(
        rect(-p.Wf2 / 2, edge + p.lf, p.Wf2 / 2, edge + p.lf + p.lf2, "metal"));
    feed.polygons.push_back(
        rect(-p.Wf3 / 2, edge + p.lf + p.lf2, p.Wf3 / 2, edge + p.lf + p.lf2 + p.lf3, "metal"));

    GeomLayer ground{"ground", 0.0, {}};
    ground.polygons.push_back(rect(-p.P / 2, -p.P / 2, p.P / 2, p.P / 2, "metal"));
    ground.polygons.push_back(dumbbell_outline(p.Ws, p.Ls, p.Rs));
    check_inside(ground.polygons[1], ground.polygons[0], "dumbbell slot");

    GeomLayer air{"air_gap", 0.0, {}};
    air.polygons.push_back(rect(-p.P / 2, -p.P / 2, p.P / 2, p.P / 2, "dielectric"));

    GeomLayer patch{"patch", p.H, {}};
    patch.polygons.push_back(chamfered_patch(p.W, p.L, p.R));
    double y0 = -p.L / 2 + p.e;
    patch.polygons.push_back(u_outline(p.a - p.f / 2 - p.c, y0, p.c, p.b, p.d));
    patch.polygons.push_back(u_outline(p.a + p.f / 2, y0, p.c, p.b, p.d));
    check_inside(patch.polygons[1], patch.polygons[0], "left U-slot");
    check_inside(patch.polygons[2], patch.polygons[0], "right U-slot");

    GeomLayer rings{"metasurface", p.H + p.T, {}};
    for (double cy : {-1.5 * p.M, -0.5 * p.M, 0.5 * p.M, 1.5 * p.M})
        for (double cx : {-1.5 * p.M, -0.5 * p.M, 0.5 * p.M, 1.5 * p.M}) {
            rings.polygons.push_back(circle(cx, cy, p.S / 2, "metal"));
            rings.polygons.push_back(circle(cx, cy, p.S / 2 - p.N, "aperture"));
        }

    spec.layers = {std::move(feed), std::move(ground), std::move(air), std::move(patch),
                   std::move(rings)};
    spec.stack = {{"substrate1", p.T}, {"air_gap", p.H}, {"substrate2", p.T}};
    spec.params = {{"H", p.H},     {"T", p.T},     {"P", p.P},   {"K", p.K},   {"Wf1", p.Wf1},
                   {"Wf2", p.Wf2}, {"Wf3", p.Wf3}, {"lf", p.lf}, {"lf2", p.lf2}, {"lf3", p.lf3},
                   {"Ws", p.Ws},   {"Ls", p.Ls},   {"Rs", p.Rs}, {"R", p.R},   {"W", p.W},
                   {"L", p.L},     {"a", p.a},     {"b", p.b},   {"c", p.c},   {"d", p.d},
                   {"e", p.e},     {"f", p.f},     {"M", p.M},   {"S", p.S},   {"N", p.N}};
    check_board(spec, p.P / 2);
    return spec;
}

GeometrySpec build_mimo(const MimoParams& mp, const ElementParams& ep) {
    validate(ep);
    validate(mp);
    const std::pair<const char*, std::pair<double, double>> shared[] = {
        {"H", {mp.H, ep.H}}, {"K", {mp.K, ep.K}}, {"T", {mp.T, ep.T}}, {"P", {mp.P, ep.P}}};
    for (const auto& [name, vals] : shared)
        if (vals.first != vals.second)
            throw ValidationError(std::string(name) +
                                  ": element and array parameter sets disagree");

    GeometrySpec elem = build_element(ep);
    Point center0 = {-(mp.P + mp.K) / 2, -(mp.P + mp.K) / 2};
    double lo[4][2], hi[4][2];
    for (int inst = 0; inst < 4; ++inst)
        for (int axis = 0; axis < 2; ++axis) {
            lo[inst][axis] = 1e300;
            hi[inst][axis] = -1e300;
        }
    auto place = [&](const Point& p, int inst) {
        Point q = rotate90({p[0] + center0[0], p[1] + center0[1]}, inst);
        for (int axis = 0; axis < 2; ++axis) {
            lo[inst][axis] = std::min(lo[inst][axis], q[axis]);
            hi[inst][axis] = std::max(hi[inst][axis], q[axis]);
        }
        return q;
    };
    auto place_poly = [&](const Polygon& poly, int inst) {
        Polygon out{poly.material, {}};
        out.points.reserve(poly.points.size());
        for (const auto& p : poly.points) out.points.push_back(place(p, inst));
        return out;
    };
    auto layer_named = [&](const std::string& name) -> const GeomLayer& {
        for (const auto& l : elem.layers)
            if (l.name == name) return l;
        throw ValidationError("element build lacks layer '" + name + "'");
    };

    GeometrySpec spec;
    GeomLayer feed{"feed", -mp.T, {}};
    for (int inst = 0; inst < 4; ++inst)
        for (const auto& poly : layer_named("feed").polygons)
            feed.polygons.push_back(place_poly(poly, inst));

    GeomLayer ground{"ground", 0.0, {}};
    ground.polygons.push_back(rect(-mp.L1 / 2, -mp.L1 / 2, mp.L1 / 2, mp.L1 / 2, "metal"));
    double gg = mp.g / 2, cc = mp.C1;
    ground.polygons.push_back({"aperture",
                               {{cc, gg},
                                {gg, gg},
                                {gg, cc},
                                {-gg, cc},
                                {-gg, gg},
                                {-cc, gg},
                                {-cc, -gg},
                                {-gg, -gg},
                                {-gg, -cc},
                                {gg, -cc},
                                {gg, -gg},
                                {cc, -gg}}});
    for (int inst = 0; inst < 4; ++inst)
        for (const auto& poly : layer_named("ground").polygons)
            if (poly.material == "aperture") ground.polygons.push_back(place_poly(poly, inst));

    GeomLayer air{"air_gap", 0.0, {}};
    air.polygons.push_back(rect(-mp.L1 / 2, -mp.L1 / 2, mp.L1 / 2, mp.L1 / 2, "dielectric"));

    GeomLayer patch{"patch", mp.H, {}};
    GeomLayer rings{"metasurface", mp.H + mp.T, {}};
    for (int inst = 0; inst < 4; ++inst) {
        for (const auto& poly : layer_named("patch").polygons)
            patch.polygons.push_back(place_poly(poly, inst));
        for (const auto& poly : layer_named("metasurface").polygons)
            rings.polygons.push_back(place_poly(poly, inst));
    }

    for (int inst = 0; inst < 4; ++inst) {
        for (int axis = 0; axis < 2; ++axis)
            if (lo[inst][axis] < -mp.L1 / 2 - kTol || hi[inst][axis] > mp.L1 / 2 + kTol)
                throw ValidationError("element instance " + std::to_string(inst) +
                                      " extends beyond the board");
        for (int other = 0; other < inst; ++other) {
            bool apart = false;
            for (int axis = 0; axis < 2; ++axis)
                if (hi[other][axis] < lo[inst][axis] - kTol ||
                    hi[inst][axis] < lo[other][axis] - kTol)
                    apart = true;
            if (!apart)
                throw ValidationError("element instances " + std::to_string(other) + " and " +
                                      std::to_string(inst) + " overlap");
        }
    }

    spec.layers = {std::move(feed), std::move(ground), std::move(air), std::move(patch),
                   std::move(rings)};
    spec.stack = {{"substrate1", mp.T}, {"air_gap", mp.H}, {"substrate2", mp.T}};
    spec.params = {{"H", mp.H},   {"K", mp.K},   {"T", mp.T},   {"L1", mp.L1}, {"D1", mp.D1},
                   {"D2", mp.D2}, {"D3", mp.D3}, {"D4", mp.D4}, {"D5", mp.D5}, {"D6", mp.D6},
                   {"D7", mp.D7}, {"D8", mp.D8}, {"C1", mp.C1}, {"B1", mp.B1}, {"A1", mp.A1},
                   {"g", mp.g},   {"P", mp.P}};
    for (const auto& [name, value] : elem.params)
        spec.params.emplace_back("element." + std::string(name), value);
    spec.annotations = {{"D1", mp.D1}, {"D2", mp.D2}, {"D3", mp.D3}, {"D4", mp.D4},
                        {"D5", mp.D5}, {"D6", mp.D6}, {"D7", mp.D7}, {"D8", mp.D8},
                        {"B1", mp.B1}, {"A1", mp.A1}};
    return spec;
}

GeometrySpec add_reflector(GeometrySpec spec, double offset_mm, double side_mm) {
    if (spec.layers.empty())
        throw ValidationError("reflector needs an existing layer stack");
    if (!std::isfinite(offset_mm) || offset_mm <= 0.0)
        throw ValidationError("reflector offset must be positive (zero coincides with the stack)");
    require_positive("reflector side", side_mm);

    double z_min = spec.layers.front().z_mm;
    double extent = 0.0;
    for (const auto& layer : spec.layers) {
        z_min = std::min(z_min, layer.z_mm);
        for (const auto& poly : layer.polygons)
            for (const auto& p : poly.points)
                extent = std::max({extent, std::abs(p[0]), std::abs(p[1])});
    }
    if (side_mm / 2 + kTol < extent)
        spec.warnings.push_back("reflector (" + fmt_mm(side_mm) +
                                " mm) is smaller than the board span (" + fmt_mm(2 * extent) +
                                " mm)");

    GeomLayer plate{"reflector", z_min - offset_mm, {}};
    plate.polygons.push_back(rect(-side_mm / 2, -side_mm / 2, side_mm / 2, side_mm / 2, "metal"));
    spec.layers.push_back(std::move(plate));
    spec.params.emplace_back("reflector_offset", offset_mm);
    spec.params.emplace_back("reflector_side", side_mm);
    return spec;
}

std::string emit_json(const GeometrySpec& spec) {
    ojson root;
    root["format"] = "geom-v1";
    root["units"] = "mm";
    ojson params = ojson::object();
    for (const auto& [k, v] : spec.params) params[k] = v;
    root["params"] = std::move(params);
    ojson annotations = ojson::object();
    for (const auto& [k, v] : spec.annotations) annotations[k] = v;
    root["annotations"] = std::move(annotations);
    ojson stack = ojson::object();
    for (const auto& [k, v] : spec.stack) stack[k] = v;
    root["stack"] = std::move(stack);
    root["warnings"] = spec.warnings;
    ojson layers = ojson::array();
    for (const auto& layer : spec.layers) {
        ojson jl;
        jl["name"] = layer.name;
        jl["z"] = layer.z_mm;
        ojson polys = ojson::array();
        for (const auto& poly : layer.polygons) {
            ojson jp;
            jp["material"] = poly.material;
            ojson pts = ojson::array();
            for (const auto& p : poly.points) pts.push_back(ojson::array({p[0], p[1]}));
            jp["points"] = std::move(pts);
            polys.push_back(std::move(jp));
        }
        jl["polygons"] = std::move(polys);
        layers.push_back(std::move(jl));
    }
    root["layers"] = std::move(layers);
    return root.dump(2) + "\n";
}

GeometrySpec parse_geometry_json(const std::string& text) {
    ojson root;
    try {
        root = ojson::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid geometry JSON: ") + e.what(), 0);
    }
    try {
        if (root.at("format").get<std::string>() != "geom-v1")
            throw ParseError("unsupported geometry format (want geom-v1)", 0);
        if (root.at("units").get<std::string>() != "mm")
            throw ParseError("unsupported geometry units (want mm)", 0);
        GeometrySpec spec;
        for (const auto& [k, v] : root.at("params").items())
            spec.params.emplace_back(k, v.get<double>());
        for (const auto& [k, v] : root.at("annotations").items())
            spec.annotations.emplace_back(k, v.get<double>());
        for (const auto& [k, v] : root.at("stack").items())
            spec.stack.emplace_back(k, v.get<double>());
        for (const auto& w : root.at("warnings")) spec.warnings.push_back(w.get<std::string>());
        for (const auto& jl : root.at("layers")) {
            GeomLayer layer;
            layer.name = jl.at("name").get<std::string>();
            layer.z_mm = jl.at("z").get<double>();
            for (const auto& jp : jl.at("polygons")) {
                Polygon poly;
                poly.material = jp.at("material").get<std::string>();
                for (const auto& pt : jp.at("points"))
                    poly.points.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
                layer.polygons.push_back(std::move(poly));
            }
            spec.layers.push_back(std::move(layer));
        }
        return spec;
    } catch (const ojson::exception& e) {
        throw ParseError(std::string("geometry JSON structure: ") + e.what(), 0);
    }
}

std::string emit_svg(const GeometrySpec& spec, const std::string& layer_name) {
    const GeomLayer* layer = nullptr;
    for (const auto& l : spec.layers)
        if (l.name == layer_name) layer = &l;
    if (!layer)
        throw ValidationError("unknown layer '" + layer_name + "'");

    double min_x = 0, min_y = 0, max_x = 1, max_y = 1;
    bool first = true;
    for (const auto& poly : layer->polygons)
        for (const auto& p : poly.points) {
            if (first) {
                min_x = max_x = p[0];
                min_y = max_y = p[1];
                first = false;
            }
            min_x = std::min(min_x, p[0]);
            max_x = std::max(max_x, p[0]);
            min_y = std::min(min_y, p[1]);
            max_y = std::max(max_y, p[1]);
        }
    double margin = 2.0;

    // +y up: emit with negated y instead of a transform
    auto path_for = [&](const char* materials[], std::size_t count) {
        std::string d;
        for (const auto& poly : layer->polygons) {
            bool wanted = false;
            for (std::size_t i = 0; i < count; ++i)
                if (poly.material == materials[i]) wanted = true;
            if (!wanted || poly.points.empty()) continue;
            for (std::size_t i = 0; i < poly.points.size(); ++i) {
                d += i == 0 ? "M" : "L";
                d += fmt_mm(poly.points[i][0]) + "," + fmt_mm(-poly.points[i][1]) + " ";
            }
            d += "Z ";
        }
        if (!d.empty()) d.pop_back();
        return d;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt_mm(min_x - margin) << " "
        << fmt_mm(-max_y - margin) << " " << fmt_mm(max_x - min_x + 2 * margin) << " "
        << fmt_mm(max_y - min_y + 2 * margin) << "\">\n";
    svg << "  <title>" << layer->name << " (z = " << fmt_mm(layer->z_mm) << " mm)</title>\n";
    const char* diel[] = {"dielectric"};
    std::string d = path_for(diel, 1);
    if (!d.empty())
        svg << "  <path fill=\"#9db899\" fill-opacity=\"0.5\" stroke=\"none\" d=\"" << d
            << "\"/>\n";
    const char* both[] = {"metal", "aperture"};
    d = path_for(both, 2);
    if (!d.empty())
        svg << "  <path fill-rule=\"evenodd\" fill=\"#c87137\" stroke=\"#42210b\" "
               "stroke-width=\"0.05\" d=\""
            << d << "\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

ParamsFile parse_params_file(const std::string& text) {
    ParamsFile out;
    std::map<std::string, double ElementParams::*> elem_keys = {
        {"H", &ElementParams::H},     {"T", &ElementParams::T},   {"P", &ElementParams::P},
        {"K", &ElementParams::K},     {"Wf1", &ElementParams::Wf1}, {"Wf2", &ElementParams::Wf2},
        {"Wf3", &ElementParams::Wf3}, {"lf", &ElementParams::lf}, {"lf2", &ElementParams::lf2},
        {"lf3", &ElementParams::lf3}, {"Ws", &ElementParams::Ws}, {"Ls", &ElementParams::Ls},
        {"Rs", &ElementParams::Rs},   {"R", &ElementParams::R},   {"W", &ElementParams::W},
        {"L", &ElementParams::L},     {"a", &ElementParams::a},   {"b", &ElementParams::b},
        {"c", &ElementParams::c},     {"d", &ElementParams::d},   {"e", &ElementParams::e},
        {"f", &ElementParams::f},     {"M", &ElementParams::M},   {"S", &ElementParams::S},
        {"N", &ElementParams::N}};
    std::map<std::string, double MimoParams::*> mimo_keys = {
        {"H", &MimoParams::H},   {"K", &MimoParams::K},   {"T", &MimoParams::T},
        {"L1", &MimoParams::L1}, {"D1", &MimoParams::D1}, {"D2", &MimoParams::D2},
        {"D3", &MimoParams::D3}, {"D4", &MimoParams::D4}, {"D5", &MimoParams::D5},
        {"D6", &MimoParams::D6}, {"D7", &MimoParams::D7}, {"D8", &MimoParams::D8},
        {"C1", &MimoParams::C1}, {"B1", &MimoParams::B1}, {"A1", &MimoParams::A1},
        {"g", &MimoParams::g},   {"P", &MimoParams::P}};

    std::istringstream stream(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        auto eq = raw.find('=');
        std::string key = raw.substr(0, eq == std::string::npos ? raw.size() : eq);
        auto trim = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(0, 1);
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            return s;
        };
        key = trim(key);
        if (key.empty()) continue;
        if (eq == std::string::npos)
            throw ParseError("expected key = value", line_no);
        std::string value = trim(raw.substr(eq + 1));

        if (key == "reflector") {
            if (value == "on" || value == "true")
                out.mimo.reflector.enabled = true;
            else if (value == "off" || value == "false")
                out.mimo.reflector.enabled = false;
            else
                throw ParseError("reflector must be on/off", line_no);
            continue;
        }

        double num = 0.0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), num);
        if (ec != std::errc() || ptr != value.data() + value.size())
            throw ParseError("malformed number '" + value + "' for key '" + key + "'", line_no);

        bool known = false;
        if (key == "reflector_offset") {
            out.mimo.reflector.offset_mm = num;
            known = true;
        } else if (key == "reflector_side") {
            out.mimo.reflector.side_mm = num;
            known = true;
        }
        if (auto it = elem_keys.find(key); it != elem_keys.end()) {
            out.element.*(it->second) = num;
            known = true;
        }
        if (auto it = mimo_keys.find(key); it != mimo_keys.end()) {
            out.mimo.*(it->second) = num;
            known = true;
        }
        if (!known)
            throw ParseError("unknown parameter '" + key + "'", line_no);
    }
    return out;
}

}  // namespace rfkit
