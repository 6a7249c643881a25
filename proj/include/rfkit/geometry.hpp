#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "rfkit/errors.hpp"

namespace rfkit {

// Radiating element dimensions in mm. Defaults describe the stock design:
// an aperture-coupled patch over an air gap with a 4x4 ring lattice above.
struct ElementParams {
    double H = 12.5;       // air gap height
    double T = 1.524;      // substrate thickness (both boards)
    double P = 80.0;       // element board side
    double K = 6.0;        // gap between elements in an array
    double Wf1 = 3.575;    // feed line: segment widths...
    double Wf2 = 1.5317;
    double Wf3 = 1.476;
    double lf = 49.591;    // ...and lengths, walking in from the board edge
    double lf2 = 18.21;
    double lf3 = 0.614;
    double Ws = 11.712;    // coupling slot: rectangle width,
    double Ls = 17.13;     //   rectangle length,
    double Rs = 4.8767;    //   end-disk radius (dumbbell shape)
    double R = 7.425;      // corner truncation (chamfer leg) of the patch
    double W = 44.1467;    // patch width (x)
    double L = 18.0627;    // patch length (y)
    double a = 6.69;       // U-slots: pair center offset in x,
    double b = 9.276;      //   outer height,
    double c = 10.755;     //   outer width,
    double d = 0.618;      //   trace width,
    double e = 2.178;      //   inset of the base above the patch's lower edge,
    double f = 2.85;       //   gap between the two U outlines
    double M = 20.0;       // ring lattice pitch
    double S = 8.621;      // ring outer diameter
    double N = 0.623;      // ring trace width
};

void validate(const ElementParams& p);

struct ReflectorParams {
    bool enabled = false;
    double offset_mm = 20.0;
    double side_mm = 178.0;
};

// 2x2 array layout in mm. D1-D8, B1 and A1 describe placements already
// implied by P and K; they are carried through to the output as annotations
// and checked nowhere (their printed meaning is not constructive here).
struct MimoParams {
    double H = 12.5;
    double K = 6.0;
    double T = 1.524;
    double L1 = 166.0;     // array board side
    double D1 = 17.926;
    double D2 = 30.97;
    double D3 = 34.144;
    double D4 = 24.68;
    double D5 = 42.98;
    double D6 = 42.98;
    double D7 = 17.37;
    double D8 = 17.37;
    double C1 = 81.67;     // decoupling slot half-length
    double B1 = 64.82;
    double A1 = 54.895;
    double g = 4.0;        // decoupling slot width
    double P = 80.0;
    ReflectorParams reflector;
};

void validate(const MimoParams& p);

using Point = std::array<double, 2>;

struct Polygon {
    std::string material;  // "metal" | "aperture" | "dielectric"
    std::vector<Point> points;  // closed loop; last->first edge implied
};

struct GeomLayer {
    std::string name;
    double z_mm;
    std::vector<Polygon> polygons;
};

// Layered 2D geometry with the inputs echoed verbatim, ready for JSON/SVG
// emission. Apertures render as holes in their host metal (even-odd rule).
struct GeometrySpec {
    std::vector<GeomLayer> layers;
    std::vector<std::pair<std::string, double>> stack;
    std::vector<std::pair<std::string, double>> params;
    std::vector<std::pair<std::string, double>> annotations;
    std::vector<std::string> warnings;
};

// Single element, centered at the origin: feed trace at z=-T, ground with
// the dumbbell coupling slot at z=0, air gap, patch with two U-slots at
// z=H, ring lattice at z=H+T.
GeometrySpec build_element(const ElementParams& params);

// Four element instances at 0/90/180/270 degrees about the board center on
// an L1 x L1 shared ground, with a cross-shaped decoupling slot (width g,
// arm half-length C1) cut into it.
GeometrySpec build_mimo(const MimoParams& params, const ElementParams& element);

// Solid square plate below the lowest existing layer.
GeometrySpec add_reflector(GeometrySpec spec, double offset_mm = 20.0, double side_mm = 178.0);

std::string emit_json(const GeometrySpec& spec);
GeometrySpec parse_geometry_json(const std::string& text);

// One layer per call; 1 mm = 1 SVG user unit, +y up.
std::string emit_svg(const GeometrySpec& spec, const std::string& layer_name);

// key = value lines mirroring the parameter symbol names; "#" comments.
// Shared symbols (H, K, T, P) set both parameter sets. Reflector keys:
// reflector = on|off, reflector_offset, reflector_side.
struct ParamsFile {
    ElementParams element;
    MimoParams mimo;
};

ParamsFile parse_params_file(const std::string& text);

// Exact quarter-turn rotation about the origin (no trigonometry involved).
Point rotate90(const Point& p, int quarters);

bool point_in_polygon(const Point& p, const std::vector<Point>& loop);

}  // namespace rfkit
