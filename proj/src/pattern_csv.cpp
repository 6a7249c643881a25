#include "rfkit/pattern_csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rfkit {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    for (std::string& s : out) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(0, 1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    }
    return out;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_field(const std::string& tok, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError("not a number: '" + tok + "'", line_no);
    return v;
}

PatternSchema schema_for_header(const std::vector<std::string>& cols, std::size_t line_no) {
    std::vector<std::string> tail;
    for (std::size_t i = 2; i < cols.size(); ++i) tail.push_back(lower(cols[i]));
    if (tail == std::vector<std::string>{"gain_dbi"}) return PatternSchema::GainDbi;
    if (tail == std::vector<std::string>{"re_theta", "im_theta", "re_phi", "im_phi"})
        return PatternSchema::FieldReIm;
    if (tail == std::vector<std::string>{"mag_theta", "ph_theta_deg", "mag_phi", "ph_phi_deg"})
        return PatternSchema::FieldMagPh;
    throw ParseError("unrecognized pattern column layout", line_no);
}

std::string node_name(double theta, double phi) {
    std::ostringstream os;
    os << "(theta=" << theta << ", phi=" << phi << ")";
    return os.str();
}

}  // namespace

FarFieldGrid parse_pattern_csv(const std::string& text, PatternSchema schema) {
    std::istringstream stream(text);
    std::string raw;
    std::size_t line_no = 0;

    // Header
    PatternSchema actual = PatternSchema::Auto;
    std::size_t value_cols = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.find_first_not_of(" \t") == std::string::npos) continue;
        auto cols = split_csv(raw);
        if (cols.size() < 3 || lower(cols[0]) != "theta_deg" || lower(cols[1]) != "phi_deg")
            throw ParseError("header must start with theta_deg,phi_deg", line_no);
        actual = schema_for_header(cols, line_no);
        if (schema != PatternSchema::Auto && schema != actual)
            throw ParseError("pattern file does not match the requested column layout", line_no);
        value_cols = actual == PatternSchema::GainDbi ? 1 : 4;
        break;
    }
    if (actual == PatternSchema::Auto)
        throw ParseError("empty pattern file", line_no);

    struct Row {
        std::array<double, 4> v;
        std::size_t line;
    };
    std::map<std::pair<double, double>, Row> nodes;
    std::vector<double> thetas, phis;

    while (std::getline(stream, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.find_first_not_of(" \t") == std::string::npos) continue;
        auto cols = split_csv(raw);
        if (cols.size() != 2 + value_cols)
            throw ParseError("expected " + std::to_string(2 + value_cols) + " columns, got " +
                                 std::to_string(cols.size()),
                             line_no);
        double theta = parse_field(cols[0], line_no);
        double phi = parse_field(cols[1], line_no);
        Row row{{0, 0, 0, 0}, line_no};
        for (std::size_t k = 0; k < value_cols; ++k) row.v[k] = parse_field(cols[2 + k], line_no);
        auto [it, inserted] = nodes.emplace(std::make_pair(theta, phi), row);
        if (!inserted)
            throw ParseError("duplicate grid node " + node_name(theta, phi), line_no);
        thetas.push_back(theta);
        phis.push_back(phi);
    }
    if (nodes.empty())
        throw ParseError("pattern file has a header but no data rows", line_no);

    auto uniq = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(thetas);
    uniq(phis);

    if (thetas.size() * phis.size() != nodes.size()) {
        for (double t : thetas)
            for (double p : phis)
                if (!nodes.count({t, p}))
                    throw ParseError("missing grid node " + node_name(t, p), 0);
    }

    auto rows = static_cast<Eigen::Index>(thetas.size());
    auto cols = static_cast<Eigen::Index>(phis.size());
    if (actual == PatternSchema::GainDbi) {
        Eigen::MatrixXd gain(rows, cols);
        for (std::size_t i = 0; i < thetas.size(); ++i)
            for (std::size_t j = 0; j < phis.size(); ++j) {
                const Row& r = nodes.at({thetas[i], phis[j]});
                gain(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::pow(10.0, r.v[0] / 10.0);
            }
        return FarFieldGrid::from_gain(std::move(thetas), std::move(phis), std::move(gain));
    }

    Eigen::MatrixXcd e_theta(rows, cols), e_phi(rows, cols);
    for (std::size_t i = 0; i < thetas.size(); ++i)
        for (std::size_t j = 0; j < phis.size(); ++j) {
            const Row& r = nodes.at({thetas[i], phis[j]});
            Complex et, ep;
            if (actual == PatternSchema::FieldReIm) {
                et = {r.v[0], r.v[1]};
                ep = {r.v[2], r.v[3]};
            } else {
                if (r.v[0] < 0.0 || r.v[2] < 0.0)
                    throw ParseError("field magnitudes must be nonnegative", r.line);
                et = std::polar(r.v[0], r.v[1] * kDegToRad);
                ep = std::polar(r.v[2], r.v[3] * kDegToRad);
            }
            e_theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = et;
            e_phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ep;
        }
    return FarFieldGrid::from_fields(std::move(thetas), std::move(phis), std::move(e_theta),
                                     std::move(e_phi));
}

FarFieldGrid read_pattern_csv_file(const std::string& path, PatternSchema schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_pattern_csv(buf.str(), schema);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), 0);
    }
}

}  // namespace rfkit
