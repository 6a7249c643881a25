#include "rfkit/touchstone.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rfkit {

double freq_unit_scale(FreqUnit unit) {
    switch (unit) {
        case FreqUnit::Hz: return 1.0;
        case FreqUnit::kHz: return 1e3;
        case FreqUnit::MHz: return 1e6;
        case FreqUnit::GHz: return 1e9;
    }
    throw ValidationError("unknown frequency unit");
}

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

double parse_double(const std::string& tok, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError("not a number: '" + tok + "'", line_no);
    return v;
}

struct OptionLine {
    FreqUnit unit = FreqUnit::GHz;
    TsFormat format = TsFormat::MA;
    double z_ref = 50.0;
};

OptionLine parse_option_line(const std::string& body, std::size_t line_no) {
    OptionLine opt;
    std::istringstream is(body);
    std::string tok;
    while (is >> tok) {
        std::string u = upper(tok);
        if (u == "HZ") opt.unit = FreqUnit::Hz;
        else if (u == "KHZ") opt.unit = FreqUnit::kHz;
        else if (u == "MHZ") opt.unit = FreqUnit::MHz;
        else if (u == "GHZ") opt.unit = FreqUnit::GHz;
        else if (u == "S") continue;
        else if (u == "Y" || u == "Z" || u == "H" || u == "G")
            throw ParseError("only S-parameter files are supported, got parameter type " + u,
                             line_no);
        else if (u == "RI") opt.format = TsFormat::RI;
        else if (u == "MA") opt.format = TsFormat::MA;
        else if (u == "DB") opt.format = TsFormat::DB;
        else if (u == "R") {
            std::string val;
            if (!(is >> val))
                throw ParseError("option line: R without an impedance value", line_no);
            opt.z_ref = parse_double(val, line_no);
            if (!(opt.z_ref > 0.0) || !std::isfinite(opt.z_ref))
                throw ParseError("option line: reference impedance must be positive", line_no);
        } else {
            throw ParseError("malformed option line: unexpected token '" + tok + "'", line_no);
        }
    }
    return opt;
}

Complex decode_pair(double a, double b, TsFormat format) {
    switch (format) {
        case TsFormat::RI: return {a, b};
        case TsFormat::MA: return std::polar(a, b * kPi / 180.0);
        case TsFormat::DB: return std::polar(std::pow(10.0, a / 20.0), b * kPi / 180.0);
    }
    throw ValidationError("unknown touchstone format");
}

// Entry index for the k-th complex value of a frequency block. Touchstone's
// 2-port order is S11 S21 S12 S22; everything else is row-major.
std::pair<std::size_t, std::size_t> entry_position(std::size_t k, std::size_t n) {
    if (n == 2) {
        static constexpr std::pair<std::size_t, std::size_t> order[4] = {
            {0, 0}, {1, 0}, {0, 1}, {1, 1}};
        return order[k];
    }
    return {k / n, k % n};
}

}  // namespace

NetworkRecord parse_touchstone(const std::string& text, std::size_t declared_ports) {
    bool saw_option = false;
    bool saw_data = false;
    OptionLine opt;
    std::vector<std::string> comments;

    // Flat token stream with the source line of each token, plus the token
    // count of each data line (the layout drives port-count inference).
    std::vector<double> values;
    std::vector<std::size_t> value_line;
    std::vector<std::pair<std::size_t, std::size_t>> line_counts;  // (line_no, tokens)

    std::istringstream stream(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string line = raw;
        if (auto bang = line.find('!'); bang != std::string::npos) {
            std::string comment = line.substr(bang + 1);
            if (!comment.empty() && comment.front() == ' ') comment.erase(0, 1);
            comments.push_back(std::move(comment));
            line.erase(bang);
        }
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '[')
            throw ParseError("Touchstone v2 keyword found; only v1 files are supported", line_no);
        if (line[first] == '#') {
            if (saw_option)
                throw ParseError("duplicate option line", line_no);
            if (saw_data)
                throw ParseError("option line must precede all data", line_no);
            opt = parse_option_line(line.substr(first + 1), line_no);
            saw_option = true;
            continue;
        }
        std::istringstream toks(line);
        std::string tok;
        std::size_t count = 0;
        while (toks >> tok) {
            values.push_back(parse_double(tok, line_no));
            value_line.push_back(line_no);
            ++count;
        }
        line_counts.emplace_back(line_no, count);
        saw_data = true;
    }

    if (values.empty())
        throw ParseError("no S-parameter data found", line_no);

    std::size_t n = declared_ports;
    if (n == 0) {
        // A frequency block is one odd-count line (frequency + pairs)
        // followed by its even-count continuation lines. Its total token
        // count is 1 + 2n^2.
        if (line_counts[0].second % 2 == 0)
            throw ParseError("matrix data begins mid-row; cannot infer port count",
                             line_counts[0].first);
        std::size_t total = line_counts[0].second;
        for (std::size_t i = 1; i < line_counts.size() && line_counts[i].second % 2 == 0; ++i)
            total += line_counts[i].second;
        double guess = std::sqrt((static_cast<double>(total) - 1.0) / 2.0);
        n = static_cast<std::size_t>(std::lround(guess));
        if (total != 1 + 2 * n * n || n == 0)
            throw ParseError("cannot infer port count from data layout", line_counts[0].first);
    }

    std::size_t block = 1 + 2 * n * n;
    if (values.size() % block != 0)
        throw ParseError("truncated matrix data (expected a multiple of " + std::to_string(block) +
                             " values for " + std::to_string(n) + " ports)",
                         value_line.back());

    std::vector<double> freqs;
    std::vector<ScatteringMatrix> mats;
    double scale = freq_unit_scale(opt.unit);
    for (std::size_t off = 0; off < values.size(); off += block) {
        double f_hz = values[off] * scale;
        if (!freqs.empty() && f_hz <= freqs.back())
            throw ParseError("non-monotonic frequency", value_line[off]);
        freqs.push_back(f_hz);
        CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n * n; ++k) {
            auto [r, c] = entry_position(k, n);
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                decode_pair(values[off + 1 + 2 * k], values[off + 2 + 2 * k], opt.format);
        }
        mats.emplace_back(std::move(m));
    }

    std::map<std::string, std::string> metadata;
    if (!comments.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < comments.size(); ++i) {
            if (i) joined += '\n';
            joined += comments[i];
        }
        metadata["comments"] = std::move(joined);
    }
    return NetworkRecord(FrequencySweep(std::move(freqs)), std::move(mats),
                         std::vector<double>(n, opt.z_ref), std::move(metadata));
}

NetworkRecord read_touchstone_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();

    std::size_t hint = 0;
    std::string lower;
    for (char c : path) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (auto dot = lower.rfind('.'); dot != std::string::npos) {
        const std::string& ext = lower.substr(dot + 1);
        if (ext.size() >= 3 && ext.front() == 's' && ext.back() == 'p') {
            std::size_t num = 0;
            auto [ptr, ec] = std::from_chars(ext.data() + 1, ext.data() + ext.size() - 1, num);
            if (ec == std::errc() && ptr == ext.data() + ext.size() - 1 && num > 0) hint = num;
        }
    }
    try {
        return parse_touchstone(buf.str(), hint);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), 0);
    }
}

namespace {

void encode_pair(std::string& out, Complex v, TsFormat format) {
    double a, b;
    switch (format) {
        case TsFormat::RI:
            a = v.real();
            b = v.imag();
            break;
        case TsFormat::MA:
            a = std::abs(v);
            b = a == 0.0 ? 0.0 : std::arg(v) * 180.0 / kPi;
            break;
        case TsFormat::DB: {
            double mag = std::abs(v);
            // 1e-20 in linear magnitude; keeps the emitted text plain numerics
            a = mag == 0.0 ? -400.0 : 20.0 * std::log10(mag);
            b = mag == 0.0 ? 0.0 : std::arg(v) * 180.0 / kPi;
            break;
        }
        default:
            throw ValidationError("unknown touchstone format");
    }
    out += ' ';
    out += fmt_g(a);
    out += ' ';
    out += fmt_g(b);
}

}  // namespace

std::string write_touchstone(const NetworkRecord& record, const TouchstoneOptions& options) {
    double z0 = record.z_ref()[0];
    for (double z : record.z_ref())
        if (z != z0)
            throw ValidationError(
                "Touchstone v1 stores a single reference impedance; record has per-port values");

    std::string out;
    if (auto it = record.metadata().find("comments"); it != record.metadata().end()) {
        std::istringstream cs(it->second);
        std::string cl;
        while (std::getline(cs, cl)) out += "! " + cl + "\n";
    }
    const char* unit_name[] = {"Hz", "kHz", "MHz", "GHz"};
    const char* fmt_name[] = {"RI", "MA", "DB"};
    out += "# ";
    out += unit_name[static_cast<int>(options.freq_unit)];
    out += " S ";
    out += fmt_name[static_cast<int>(options.format)];
    out += " R ";
    out += fmt_g(z0);
    out += '\n';

    std::size_t n = record.order();
    double scale = freq_unit_scale(options.freq_unit);
    for (std::size_t i = 0; i < record.points(); ++i) {
        std::string fs = fmt_g(record.sweep()[i] / scale);
        if (n <= 2) {
            out += fs;
            for (std::size_t k = 0; k < n * n; ++k) {
                auto [r, c] = entry_position(k, n);
                encode_pair(out, record.at(i)(r, c), options.format);
            }
            out += '\n';
        } else {
            // One matrix row per line, wrapped at four values per line
            std::string indent(fs.size(), ' ');
            for (std::size_t r = 0; r < n; ++r) {
                out += r == 0 ? fs : indent;
                for (std::size_t c = 0; c < n; ++c) {
                    if (c > 0 && c % 4 == 0) {
                        out += '\n';
                        out += indent;
                    }
                    encode_pair(out, record.at(i)(r, c), options.format);
                }
                out += '\n';
            }
        }
    }
    return out;
}

void write_touchstone_file(const std::string& path, const NetworkRecord& record,
                           const TouchstoneOptions& options) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path + " for writing");
    out << write_touchstone(record, options);
    if (!out)
        throw Error("write failed for " + path);
}

}  // namespace rfkit
