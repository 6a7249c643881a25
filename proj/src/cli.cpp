#include "rfkit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rfkit/circuit.hpp"
#include "rfkit/errors.hpp"
#include "rfkit/fit.hpp"
#include "rfkit/geometry.hpp"
#include "rfkit/mimo.hpp"
#include "rfkit/network.hpp"
#include "rfkit/pattern.hpp"
#include "rfkit/pattern_csv.hpp"
#include "rfkit/touchstone.hpp"

namespace rfkit {

namespace {

namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt_short(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.5g", v);
    return buf;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// All output files for one command, staged under temporary names and
// renamed into place together so a failure cannot leave a partial set.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) {
        for (const auto& [existing, _] : files_)
            if (existing == name) throw Error("duplicate output file name '" + name + "'");
        files_.emplace_back(name, std::move(content));
    }

    std::vector<std::string> commit() {
        fs::create_directories(dir_);
        std::vector<fs::path> staged;
        auto cleanup = [&]() {
            std::error_code ec;
            for (const auto& p : staged) fs::remove(p, ec);
        };
        for (const auto& [name, content] : files_) {
            fs::path tmp = dir_ / (".tmp-" + name);
            {
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                out << content;
                if (!out) {
                    cleanup();
                    throw Error("cannot write '" + tmp.string() + "'");
                }
            }
            staged.push_back(tmp);
        }
        std::vector<std::string> written;
        for (std::size_t i = 0; i < files_.size(); ++i) {
            std::error_code ec;
            fs::rename(staged[i], dir_ / files_[i].first, ec);
            if (ec) {
                cleanup();
                throw Error("cannot move '" + staged[i].string() + "' into place: " +
                            ec.message());
            }
            written.push_back((dir_ / files_[i].first).string());
        }
        return written;
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string join_csv_row(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    row += '\n';
    return row;
}

std::string md_table(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::string out = "|";
    for (const auto& h : header) out += " " + h + " |";
    out += "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) out += " --- |";
    out += "\n";
    for (const auto& row : rows) {
        out += "|";
        for (const auto& cell : row) out += " " + cell + " |";
        out += "\n";
    }
    return out;
}

std::vector<std::string> split_on(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    cells.push_back(cur);
    for (auto& c : cells) {
        while (!c.empty() && std::isspace(static_cast<unsigned char>(c.front()))) c.erase(0, 1);
        while (!c.empty() && std::isspace(static_cast<unsigned char>(c.back()))) c.pop_back();
    }
    return cells;
}

double parse_num(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error("malformed number '" + s + "'");
    return v;
}

struct GlobalOpts {
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::string format = "md";  // summary-table format: md or csv
};

// ---------------------------------------------------------------- metrics

std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(
    const std::vector<std::string>& specs, std::size_t order) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& spec : specs) {
        auto cells = split_on(spec, ',');
        if (cells.size() != 2)
            throw Error("pair '" + spec + "' must be two comma-separated port numbers");
        auto i = static_cast<std::size_t>(parse_num(cells[0]));
        auto j = static_cast<std::size_t>(parse_num(cells[1]));
        if (i < 1 || j < 1 || i > order || j > order || i == j)
            throw Error("pair '" + spec + "' is out of range for a " + std::to_string(order) +
                        "-port network");
        pairs.emplace_back(i - 1, j - 1);
    }
    return pairs;
}

int run_metrics(const GlobalOpts& global, const std::vector<std::string>& inputs,
                double threshold_db, const std::vector<std::string>& pair_specs, bool want_ecc,
                bool want_dg) {
    OutputSet outputs{global.out_dir};
    std::set<std::string> printed_warnings;

    for (const auto& input : inputs) {
        NetworkRecord record = read_touchstone_file(input);
        std::size_t n = record.order();
        std::string stem = fs::path(input).stem().string();
        auto pairs = pair_specs.empty() ? all_port_pairs(n) : parse_pairs(pair_specs, n);

        std::vector<EccTrace> ecc_traces;
        std::vector<DiversityTrace> dg_traces;
        std::vector<IsolationTrace> iso_traces;
        for (const auto& [i, j] : pairs) {
            if (want_ecc || want_dg) {
                ecc_traces.push_back(ecc_from_sparams(record, i, j));
                for (const auto& w : ecc_traces.back().warnings)
                    if (printed_warnings.insert(w).second)
                        std::cerr << "warning: " << input << ": " << w << "\n";
                if (want_dg) dg_traces.push_back(diversity_gain(ecc_traces.back()));
            }
            iso_traces.push_back(isolation_db(record, i, j));
        }

        auto pair_tag = [&](std::size_t p) {
            return std::to_string(pairs[p].first + 1) + "_" + std::to_string(pairs[p].second + 1);
        };

        std::string csv = "freq_hz";
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 1; j <= n; ++j)
                csv += ",s" + (n <= 9 ? std::to_string(i) + std::to_string(j)
                                      : std::to_string(i) + "_" + std::to_string(j)) +
                       "_db";
        for (std::size_t i = 1; i <= n; ++i) csv += ",vswr_" + std::to_string(i);
        if (want_ecc)
            for (std::size_t p = 0; p < pairs.size(); ++p) csv += ",ecc_" + pair_tag(p);
        if (want_dg)
            for (std::size_t p = 0; p < pairs.size(); ++p) csv += ",dg_db_" + pair_tag(p);
        for (std::size_t p = 0; p < pairs.size(); ++p) csv += ",iso_db_" + pair_tag(p);
        csv += '\n';

        for (std::size_t k = 0; k < record.points(); ++k) {
            csv += fmt_num(record.sweep()[k]);
            const ScatteringMatrix& s = record.at(k);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) csv += "," + fmt_num(db20(s(i, j)));
            for (std::size_t i = 0; i < n; ++i) {
                double mag = std::abs(s(i, i));
                csv += "," + (mag < 1.0 ? fmt_num(vswr(mag)) : std::string("inf"));
            }
            if (want_ecc)
                for (const auto& t : ecc_traces) csv += "," + fmt_num(t.values[k]);
            if (want_dg)
                for (const auto& t : dg_traces) csv += "," + fmt_num(t.db[k]);
            for (const auto& t : iso_traces) csv += "," + fmt_num(t.db[k]);
            csv += '\n';
        }
        outputs.add(stem + "_metrics.csv", csv);

        // Band rows follow port 1's matched band; when port 1 never matches,
        // the whole sweep is reported as one band so coverage still shows up.
        BandList bands = extract_bands(record, 0, threshold_db);
        if (bands.empty())
            bands = BandList({{record.sweep().front(), record.sweep().back()}});
        auto summary = mimo_band_summary(record, bands, pairs, threshold_db);

        std::vector<std::string> header = {"band_lo_ghz", "band_hi_ghz"};
        for (std::size_t i = 1; i <= n; ++i) header.push_back("coverage_p" + std::to_string(i));
        if (!pairs.empty()) {
            header.push_back("worst_isolation_db");
            header.push_back("max_ecc");
            header.push_back("min_dg_db");
        }
        std::vector<std::vector<std::string>> rows;
        for (const auto& band : summary) {
            std::vector<std::string> row = {fmt_num(band.band_hz.first / 1e9),
                                            fmt_num(band.band_hz.second / 1e9)};
            for (double c : band.coverage) row.push_back(fmt_num(c));
            if (!band.pairs.empty()) {
                double worst = -std::numeric_limits<double>::infinity();
                double max_ecc = std::nan("");
                double min_dg = std::numeric_limits<double>::infinity();
                for (const auto& p : band.pairs) {
                    worst = std::max(worst, p.worst_isolation_db);
                    if (!std::isnan(p.max_ecc) && !(max_ecc >= p.max_ecc)) max_ecc = p.max_ecc;
                    if (!std::isnan(p.min_dg_db)) min_dg = std::min(min_dg, p.min_dg_db);
                }
                row.push_back(fmt_num(worst));
                row.push_back(fmt_num(max_ecc));
                row.push_back(fmt_num(min_dg));
                std::cout << stem << ": band " << fmt_short(band.band_hz.first / 1e9) << "-"
                          << fmt_short(band.band_hz.second / 1e9)
                          << " GHz: isolation < " << fmt_short(worst) << " dB, max ECC "
                          << fmt_short(max_ecc) << ", min DG " << fmt_short(min_dg) << " dB\n";
            } else {
                std::cout << stem << ": band " << fmt_short(band.band_hz.first / 1e9) << "-"
                          << fmt_short(band.band_hz.second / 1e9) << " GHz\n";
            }
            rows.push_back(std::move(row));
        }
        if (global.format == "csv") {
            std::string text = join_csv_row(header);
            for (const auto& row : rows) text += join_csv_row(row);
            outputs.add(stem + "_summary.csv", text);
        } else {
            outputs.add(stem + "_summary.md", md_table(header, rows));
        }
    }

    for (const auto& path : outputs.commit()) std::cout << "wrote " << path << "\n";
    return 0;
}

// -------------------------------------------------------------------- fit

int run_fit(const GlobalOpts& global, const std::string& spec_path,
            const std::string& target_path, std::size_t multistarts, std::size_t max_iters,
            double xtol, double ftol, const std::string& objective) {
    FitSpec spec = parse_fit_spec(read_file(spec_path));
    NetworkRecord target = read_touchstone_file(target_path);
    FitProblem problem = make_fit_problem(
        spec.netlist, spec.free_params, target,
        objective == "dbmag" ? FitObjective::DbMagLS : FitObjective::ComplexLS);

    FitConfig config;
    config.multistarts = multistarts;
    config.max_iters = max_iters;
    config.xtol = xtol;
    config.ftol = ftol;
    config.seed = global.seed;
    FitResult result = fit(problem, config);

    std::map<std::string, double> fitted;
    for (std::size_t i = 0; i < problem.free_params.size(); ++i)
        fitted[problem.free_params[i].label] = result.values[i];
    Netlist solved = problem.netlist.with_values(fitted);

    std::string residuals = "iteration,best_objective\n";
    for (std::size_t i = 0; i < result.history.size(); ++i)
        residuals += std::to_string(i) + "," + fmt_num(result.history[i]) + "\n";

    NetworkRecord model = solve_sparams(solved, target.sweep()).record;
    std::string overlay = "freq_hz,target_db,model_db\n";
    for (std::size_t k = 0; k < target.points(); ++k)
        overlay += fmt_num(target.sweep()[k]) + "," + fmt_num(db20(target.at(k)(0, 0))) + "," +
                   fmt_num(db20(model.at(k)(0, 0))) + "\n";

    std::string stem = fs::path(spec_path).stem().string();
    OutputSet outputs{global.out_dir};
    outputs.add(stem + "_fitted.net", write_netlist(solved));
    outputs.add(stem + "_residuals.csv", residuals);
    outputs.add(stem + "_overlay.csv", overlay);

    std::cout << "fit: residual " << fmt_short(result.residual) << " after " << result.iterations
              << " iterations" << (result.converged ? "" : " (iteration budget exhausted)")
              << "\n";
    for (const auto& p : problem.free_params)
        std::cout << "  " << p.label << " = " << fmt_num(fitted[p.label]) << "\n";
    for (const auto& path : outputs.commit()) std::cout << "wrote " << path << "\n";
    return 0;
}

// ---------------------------------------------------------------- pattern

std::string polar_svg(const PlaneCut& cut) {
    double top = -1e300;
    for (double v : cut.value_db)
        if (std::isfinite(v)) top = std::max(top, v);
    top = top == -1e300 ? 0.0 : std::ceil(top / 5.0) * 5.0;
    double bottom = top - 40.0;
    auto radius = [&](double db) {
        if (std::isinf(db) && db < 0) return 0.0;
        return std::clamp((db - bottom) / 40.0 * 100.0, 0.0, 100.0);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-130 -130 260 260\">\n";
    svg << "  <title>phi = " << fmt_short(cut.phi_deg) << " deg cut</title>\n";
    for (int k = 1; k <= 4; ++k)
        svg << "  <circle cx=\"0\" cy=\"0\" r=\"" << 25 * k
            << "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
    for (int deg = 0; deg < 360; deg += 30) {
        double a = deg * kPi / 180.0;
        svg << "  <line x1=\"0\" y1=\"0\" x2=\"" << fmt_short(100 * std::sin(a)) << "\" y2=\""
            << fmt_short(-100 * std::cos(a)) << "\" stroke=\"#eeeeee\" stroke-width=\"0.5\"/>\n";
        int label = deg <= 180 ? deg : deg - 360;
        svg << "  <text x=\"" << fmt_short(112 * std::sin(a)) << "\" y=\""
            << fmt_short(-112 * std::cos(a))
            << "\" font-size=\"7\" fill=\"#555555\" text-anchor=\"middle\" "
               "dominant-baseline=\"middle\">"
            << label << "</text>\n";
    }
    for (int k = 0; k <= 4; ++k)
        svg << "  <text x=\"2\" y=\"" << fmt_short(-25.0 * k - 1.5)
            << "\" font-size=\"6\" fill=\"#999999\">" << fmt_short(bottom + 10.0 * k)
            << "</text>\n";
    svg << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < cut.angle_deg.size(); ++i) {
        double a = cut.angle_deg[i] * kPi / 180.0;
        double r = radius(cut.value_db[i]);
        if (i) svg << " ";
        svg << fmt_short(r * std::sin(a)) << "," << fmt_short(-r * std::cos(a));
    }
    svg << "\"/>\n</svg>\n";
    return svg.str();
}

std::string phi_tag(double phi) {
    std::string tag = fmt_short(phi);
    for (auto& ch : tag) {
        if (ch == '.') ch = 'p';
        if (ch == '-') ch = 'm';
    }
    return tag;
}

int run_pattern(const GlobalOpts& global, const std::string& input,
                const std::vector<double>& cuts, bool want_peak, bool want_backlobe,
                bool want_directivity, const std::string& schema_name) {
    PatternSchema schema = PatternSchema::Auto;
    if (schema_name == "gain") schema = PatternSchema::GainDbi;
    if (schema_name == "reim") schema = PatternSchema::FieldReIm;
    if (schema_name == "magph") schema = PatternSchema::FieldMagPh;
    FarFieldGrid grid = read_pattern_csv_file(input, schema);

    if (!want_peak && !want_backlobe && !want_directivity) {
        want_directivity = true;
        want_peak = !grid.has_fields();
    }

    std::vector<std::pair<std::string, double>> metrics;
    PeakGain peak{};
    if (want_peak) {
        peak = peak_gain(grid);
        metrics.emplace_back("peak_gain_dbi", peak.dbi);
        metrics.emplace_back("peak_theta_deg", peak.theta_deg);
        metrics.emplace_back("peak_phi_deg", peak.phi_deg);
    }
    Directivity dir{};
    if (want_directivity) {
        dir = directivity(grid);
        metrics.emplace_back("directivity_dbi", dir.dbi);
        metrics.emplace_back("directivity_linear", dir.linear);
    }
    if (want_peak && want_directivity) {
        // Peak gain over directivity: equals the radiation efficiency only
        // when the input really is realized gain.
        EfficiencyRatio eff = efficiency_ratio(peak.dbi, dir.dbi);
        metrics.emplace_back("peak_over_directivity", eff.value);
        if (eff.flagged)
            std::cerr << "warning: " << input
                      << ": peak exceeds directivity (ratio > 1); input is not a plain gain "
                         "pattern\n";
    }
    if (want_backlobe) {
        double back = back_lobe_level_dbi(grid);
        metrics.emplace_back("back_lobe_dbi", back);
        metrics.emplace_back("front_to_back_db", front_to_back_db(grid));
    }

    std::string stem = fs::path(input).stem().string();
    OutputSet outputs{global.out_dir};
    if (global.format == "csv") {
        std::string csv = "metric,value\n";
        for (const auto& [name, value] : metrics) csv += name + "," + fmt_num(value) + "\n";
        outputs.add(stem + "_pattern.csv", csv);
    } else {
        std::vector<std::vector<std::string>> rows;
        for (const auto& [name, value] : metrics) rows.push_back({name, fmt_num(value)});
        outputs.add(stem + "_pattern.md", md_table({"metric", "value"}, rows));
    }
    for (const auto& [name, value] : metrics)
        std::cout << name << " = " << fmt_num(value) << "\n";

    for (double phi : cuts) {
        PlaneCut cut = plane_cut(grid, phi);
        std::string csv = "angle_deg,value_db\n";
        for (std::size_t i = 0; i < cut.angle_deg.size(); ++i)
            csv += fmt_num(cut.angle_deg[i]) + "," + fmt_num(cut.value_db[i]) + "\n";
        outputs.add(stem + "_cut_phi" + phi_tag(phi) + ".csv", csv);
        outputs.add(stem + "_cut_phi" + phi_tag(phi) + ".svg", polar_svg(cut));
    }

    for (const auto& path : outputs.commit()) std::cout << "wrote " << path << "\n";
    return 0;
}

// ------------------------------------------------------------------- geom

int run_geom(const GlobalOpts& global, const std::string& params_path, bool want_element,
             bool want_mimo, bool want_reflector, const std::vector<std::string>& svg_layers) {
    ParamsFile params;
    std::string base = want_mimo ? "mimo" : "element";
    if (!params_path.empty()) {
        params = parse_params_file(read_file(params_path));
        base = fs::path(params_path).stem().string();
    }
    (void)want_element;

    GeometrySpec spec = want_mimo ? build_mimo(params.mimo, params.element)
                                  : build_element(params.element);
    if (want_reflector || params.mimo.reflector.enabled)
        spec = add_reflector(std::move(spec), params.mimo.reflector.offset_mm,
                             params.mimo.reflector.side_mm);

    OutputSet outputs{global.out_dir};
    outputs.add(base + "_geom.json", emit_json(spec));
    for (const auto& layer : svg_layers)
        outputs.add(base + "_" + layer + ".svg", emit_svg(spec, layer));

    std::size_t polygons = 0, vertices = 0;
    for (const auto& layer : spec.layers)
        for (const auto& poly : layer.polygons) {
            ++polygons;
            vertices += poly.points.size();
        }
    std::cout << "geometry ok: " << spec.layers.size() << " layers, " << polygons
              << " polygons, " << vertices << " vertices, " << spec.params.size()
              << " parameters echoed\n";
    for (const auto& layer : spec.layers)
        std::cout << "  layer " << layer.name << " at z = " << fmt_short(layer.z_mm) << " mm ("
                  << layer.polygons.size() << " polygons)\n";
    for (const auto& w : spec.warnings) std::cerr << "warning: " << w << "\n";

    for (const auto& path : outputs.commit()) std::cout << "wrote " << path << "\n";
    return 0;
}

// ----------------------------------------------------------------- report

struct DesignSummary {
    std::string label;
    std::vector<std::string> bands_ghz;   // "lo-hi" strings
    double worst_isolation_db = -std::numeric_limits<double>::infinity();
    double max_ecc = std::nan("");
    std::vector<double> peak_gains_dbi;
    std::string ports = "---";
    std::string elements = "---";
    std::string efficiency = "---";
    bool has_summary = false;
};

void scan_summary_csv(const fs::path& path, DesignSummary& design) {
    std::istringstream stream(read_file(path));
    std::string line;
    if (!std::getline(stream, line))
        throw Error(path.string() + ": empty summary file");
    auto header = split_on(line, ',');
    auto col = [&](const std::string& name) -> std::ptrdiff_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
        return -1;
    };
    auto lo_col = col("band_lo_ghz"), hi_col = col("band_hi_ghz");
    auto iso_col = col("worst_isolation_db"), ecc_col = col("max_ecc");
    if (lo_col < 0 || hi_col < 0)
        throw Error(path.string() + ": not a band summary (missing band_lo_ghz/band_hi_ghz)");
    std::size_t line_no = 1;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_on(line, ',');
        if (cells.size() != header.size())
            throw Error(path.string() + ": line " + std::to_string(line_no) +
                        ": wrong cell count");
        double lo = parse_num(cells[static_cast<std::size_t>(lo_col)]);
        double hi = parse_num(cells[static_cast<std::size_t>(hi_col)]);
        std::string band = fmt_short(lo) + "-" + fmt_short(hi);
        if (std::find(design.bands_ghz.begin(), design.bands_ghz.end(), band) ==
            design.bands_ghz.end())
            design.bands_ghz.push_back(band);
        if (iso_col >= 0) {
            double iso = parse_num(cells[static_cast<std::size_t>(iso_col)]);
            design.worst_isolation_db = std::max(design.worst_isolation_db, iso);
        }
        if (ecc_col >= 0) {
            double ecc = parse_num(cells[static_cast<std::size_t>(ecc_col)]);
            if (!std::isnan(ecc) && !(design.max_ecc >= ecc)) design.max_ecc = ecc;
        }
        design.has_summary = true;
    }
}

void scan_pattern_csv(const fs::path& path, DesignSummary& design) {
    std::istringstream stream(read_file(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty() || line == "metric,value") continue;
        auto cells = split_on(line, ',');
        if (cells.size() != 2)
            throw Error(path.string() + ": line " + std::to_string(line_no) +
                        ": expected metric,value");
        if (cells[0] == "peak_gain_dbi") design.peak_gains_dbi.push_back(parse_num(cells[1]));
    }
}

void scan_meta(const fs::path& path, DesignSummary& design) {
    std::istringstream stream(read_file(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char ch : line)
                if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
            if (blank) continue;
            throw Error(path.string() + ": line " + std::to_string(line_no) +
                        ": expected key = value");
        }
        auto cells = split_on(line, '=');
        const std::string& key = cells[0];
        std::string value = line.substr(eq + 1);
        while (!value.empty() && std::isspace(static_cast<unsigned char>(value.front())))
            value.erase(0, 1);
        while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back())))
            value.pop_back();
        if (key == "label") design.label = value;
        else if (key == "ports") design.ports = value;
        else if (key == "elements") design.elements = value;
        else if (key == "efficiency_range") design.efficiency = value;
        else
            throw Error(path.string() + ": line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
}

int run_report(const GlobalOpts& global, const std::vector<std::string>& dirs,
               const std::string& out_name) {
    std::vector<DesignSummary> designs;
    for (const auto& dir : dirs) {
        if (!fs::is_directory(dir)) throw Error("'" + dir + "' is not a directory");
        DesignSummary design;
        design.label = fs::path(dir).filename().string();
        if (design.label.empty()) design.label = dir;

        std::vector<fs::path> entries;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file()) entries.push_back(entry.path());
        std::sort(entries.begin(), entries.end());

        for (const auto& path : entries) {
            std::string name = path.filename().string();
            if (name.ends_with("_summary.csv")) scan_summary_csv(path, design);
            else if (name.ends_with("_pattern.csv")) scan_pattern_csv(path, design);
            else if (name == "design_meta.txt") scan_meta(path, design);
        }
        if (!design.has_summary)
            throw Error("'" + dir + "' holds no *_summary.csv band summaries");
        designs.push_back(std::move(design));
    }

    std::vector<std::string> header = {"Design",
                                       "-10 dB Bandwidth (GHz)",
                                       "Peak Gain (dBi)",
                                       "Isolation (dB)",
                                       "Num. Ports",
                                       "Num. Radiating Elements",
                                       "ECC",
                                       "Rad. Eff (%)"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& design : designs) {
        std::string bands;
        for (const auto& b : design.bands_ghz) {
            if (!bands.empty()) bands += ";";
            bands += b;
        }
        std::string gain = "---";
        if (!design.peak_gains_dbi.empty()) {
            auto [lo, hi] = std::minmax_element(design.peak_gains_dbi.begin(),
                                                design.peak_gains_dbi.end());
            gain = *lo == *hi ? fmt_short(*lo) : fmt_short(*lo) + " to " + fmt_short(*hi);
        }
        std::string iso = std::isinf(design.worst_isolation_db)
                              ? "-inf"
                              : "<" + fmt_short(design.worst_isolation_db);
        std::string ecc = "---";
        if (!std::isnan(design.max_ecc))
            ecc = design.max_ecc == 0.0 ? "0" : "<" + fmt_short(design.max_ecc);
        rows.push_back({design.label, bands.empty() ? "---" : bands, gain, iso, design.ports,
                        design.elements, ecc, design.efficiency});
    }

    OutputSet outputs{global.out_dir};
    if (global.format == "csv") {
        std::string text = join_csv_row({"design", "bandwidth_ghz", "peak_gain_dbi",
                                         "isolation_db", "num_ports", "num_radiating_elements",
                                         "ecc", "rad_eff_pct"});
        for (const auto& row : rows) text += join_csv_row(row);
        outputs.add(out_name + ".csv", text);
    } else {
        outputs.add(out_name + ".md", md_table(header, rows));
    }
    for (const auto& path : outputs.commit()) std::cout << "wrote " << path << "\n";
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"RF network, radiation pattern, and antenna geometry toolkit"};
    app.require_subcommand(1);

    GlobalOpts global;
    app.add_option("--out-dir", global.out_dir, "Directory for all output files")
        ->envname("RFKIT_OUT_DIR");
    app.add_option("--seed", global.seed, "Seed for randomized algorithms");
    app.add_option("--format", global.format, "Summary table format")
        ->check(CLI::IsMember({"md", "csv"}));

    std::vector<std::string> metrics_inputs;
    double band_threshold_db = -10.0;
    std::vector<std::string> pair_specs;
    bool flag_ecc = false, flag_dg = false;
    auto* metrics = app.add_subcommand(
        "metrics", "Per-frequency S-parameter metrics and band summaries");
    metrics->fallthrough();
    metrics->add_option("inputs", metrics_inputs, "Touchstone .sNp files")->required();
    metrics->add_option("--band-threshold-db", band_threshold_db,
                        "Return-loss threshold defining matched bands");
    metrics->add_option("--pairs", pair_specs,
                        "Port pairs as i,j (1-based); default: all pairs");
    metrics->add_flag("--ecc", flag_ecc, "Envelope correlation per pair");
    metrics->add_flag("--dg", flag_dg, "Diversity gain per pair");

    std::string fit_spec_path, fit_target_path, fit_objective = "complex";
    std::size_t fit_multistarts = 8, fit_max_iters = 2000;
    double fit_xtol = 1e-9, fit_ftol = 1e-12;
    auto* fitcmd = app.add_subcommand("fit", "Fit circuit element values to a reflection trace");
    fitcmd->fallthrough();
    fitcmd->add_option("spec", fit_spec_path, "Netlist with FREE parameter lines")->required();
    fitcmd->add_option("target", fit_target_path, "Target .s1p reflection trace")->required();
    fitcmd->add_option("--multistarts", fit_multistarts, "Independent optimizer starts");
    fitcmd->add_option("--max-iters", fit_max_iters, "Iteration budget per start");
    fitcmd->add_option("--xtol", fit_xtol, "Simplex diameter tolerance (log space)");
    fitcmd->add_option("--ftol", fit_ftol, "Objective spread tolerance");
    fitcmd->add_option("--objective", fit_objective, "Mismatch measure")
        ->check(CLI::IsMember({"complex", "dbmag"}));

    std::string pattern_input, pattern_schema = "auto";
    std::vector<double> pattern_cuts;
    bool flag_peak = false, flag_backlobe = false, flag_directivity = false;
    auto* pattern = app.add_subcommand("pattern", "Far-field pattern analytics and plane cuts");
    pattern->fallthrough();
    pattern->add_option("input", pattern_input, "Pattern CSV")->required();
    pattern->add_option("--cut", pattern_cuts, "Phi plane(s) to cut, degrees");
    pattern->add_flag("--peak", flag_peak, "Peak gain and its direction");
    pattern->add_flag("--backlobe", flag_backlobe, "Rear-hemisphere level and front-to-back");
    pattern->add_flag("--directivity", flag_directivity, "Directivity from quadrature");
    pattern->add_option("--schema", pattern_schema, "Column layout")
        ->check(CLI::IsMember({"auto", "gain", "reim", "magph"}));

    std::string geom_params_path;
    bool flag_element = false, flag_mimo = false, flag_reflector = false;
    std::vector<std::string> geom_svg_layers;
    auto* geom = app.add_subcommand("geom", "Build antenna geometry as layered JSON and SVG");
    geom->fallthrough();
    geom->add_option("params", geom_params_path, "key = value parameter file");
    geom->add_flag("--element", flag_element, "Single radiating element (default)");
    geom->add_flag("--mimo", flag_mimo, "Four-element array");
    geom->add_flag("--reflector", flag_reflector, "Add the reflector plate");
    geom->add_option("--svg", geom_svg_layers, "Layer(s) to render as SVG");

    std::vector<std::string> report_dirs;
    std::string report_out = "comparison";
    auto* report = app.add_subcommand("report", "Comparison table across design result dirs");
    report->fallthrough();
    report->add_option("dirs", report_dirs, "Directories holding summary/pattern files")
        ->required();
    report->add_option("--out", report_out, "Output file name (without extension)");

    int rc = 0;
    auto guarded = [&rc](auto&& body) {
        try {
            rc = body();
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            rc = 1;
        }
    };
    metrics->callback([&] {
        guarded([&] {
            // With neither selector the per-frequency CSV carries both.
            bool want_ecc = flag_ecc || !flag_dg;
            bool want_dg = flag_dg || !flag_ecc;
            return run_metrics(global, metrics_inputs, band_threshold_db, pair_specs, want_ecc,
                               want_dg);
        });
    });
    fitcmd->callback([&] {
        guarded([&] {
            return run_fit(global, fit_spec_path, fit_target_path, fit_multistarts,
                           fit_max_iters, fit_xtol, fit_ftol, fit_objective);
        });
    });
    pattern->callback([&] {
        guarded([&] {
            return run_pattern(global, pattern_input, pattern_cuts, flag_peak, flag_backlobe,
                               flag_directivity, pattern_schema);
        });
    });
    geom->callback([&] {
        guarded([&] {
            if (flag_element && flag_mimo)
                throw Error("--element and --mimo are mutually exclusive");
            return run_geom(global, geom_params_path, flag_element, flag_mimo, flag_reflector,
                            geom_svg_layers);
        });
    });
    report->callback([&] {
        guarded([&] { return run_report(global, report_dirs, report_out); });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    return rc;
}

}  // namespace rfkit
