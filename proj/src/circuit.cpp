#include "rfkit/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace rfkit {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

std::string freq_str(double f_hz) {
    std::ostringstream os;
    os.precision(12);
    os << f_hz * 1e-9 << " GHz";
    return os.str();
}

char kind_letter(ElementKind kind) {
    switch (kind) {
        case ElementKind::R: return 'R';
        case ElementKind::L: return 'L';
        case ElementKind::C: return 'C';
    }
    return '?';
}

}  // namespace

Netlist::Netlist(std::vector<CircuitElement> elements, std::vector<CircuitPort> ports,
                 std::string ground)
    : elements_(std::move(elements)), ports_(std::move(ports)), ground_(std::move(ground)) {
    if (ports_.empty())
        throw ValidationError("netlist needs at least one port");
    if (ground_.empty())
        throw ValidationError("ground node name is empty");

    std::set<std::string> labels;
    for (const auto& e : elements_) {
        if (e.label.empty())
            throw ValidationError("element label is empty");
        if (!labels.insert(e.label).second)
            throw ValidationError("duplicate element label '" + e.label + "'");
        if (!std::isfinite(e.value) || e.value <= 0.0)
            throw ValidationError("element '" + e.label + "' needs a positive finite value");
        if (e.node_a.empty() || e.node_b.empty())
            throw ValidationError("element '" + e.label + "' has an unnamed node");
        if (e.node_a == e.node_b)
            throw ValidationError("element '" + e.label + "' connects a node to itself");
    }
    for (const auto& p : ports_) {
        if (!std::isfinite(p.z0) || p.z0 <= 0.0)
            throw ValidationError("port reference impedance must be positive");
        if (p.node_plus.empty() || p.node_minus.empty())
            throw ValidationError("port has an unnamed node");
        if (p.node_plus == p.node_minus)
            throw ValidationError("port terminals must be distinct nodes");
    }

    auto note = [&](const std::string& n) {
        if (n != ground_ && std::find(nodes_.begin(), nodes_.end(), n) == nodes_.end())
            nodes_.push_back(n);
    };
    for (const auto& e : elements_) {
        note(e.node_a);
        note(e.node_b);
    }
    for (const auto& p : ports_) {
        note(p.node_plus);
        note(p.node_minus);
    }

    // Every node must reach ground through elements or port terminations.
    std::set<std::string> reached{ground_};
    std::deque<std::string> queue{ground_};
    auto visit = [&](const std::string& a, const std::string& b, const std::string& at) {
        if (a == at && !reached.count(b)) {
            reached.insert(b);
            queue.push_back(b);
        }
    };
    while (!queue.empty()) {
        std::string at = queue.front();
        queue.pop_front();
        for (const auto& e : elements_) {
            visit(e.node_a, e.node_b, at);
            visit(e.node_b, e.node_a, at);
        }
        for (const auto& p : ports_) {
            visit(p.node_plus, p.node_minus, at);
            visit(p.node_minus, p.node_plus, at);
        }
    }
    for (const auto& n : nodes_)
        if (!reached.count(n))
            throw ValidationError("node '" + n + "' has no path to ground");
}

const CircuitElement* Netlist::find(const std::string& label) const {
    for (const auto& e : elements_)
        if (e.label == label) return &e;
    return nullptr;
}

Netlist Netlist::with_values(const std::map<std::string, double>& overrides) const {
    std::vector<CircuitElement> elems = elements_;
    for (const auto& [label, value] : overrides) {
        bool found = false;
        for (auto& e : elems)
            if (e.label == label) {
                e.value = value;
                found = true;
                break;
            }
        if (!found)
            throw ValidationError("no element labeled '" + label + "'");
    }
    return Netlist(std::move(elems), ports_, ground_);
}

MnaSystem stamp_mna(const Netlist& netlist, double freq_hz) {
    if (!std::isfinite(freq_hz) || freq_hz <= 0.0)
        throw ValidationError("stamping needs a positive frequency (DC is not supported)");

    const auto& nodes = netlist.nodes();
    auto index_of = [&](const std::string& n) -> Eigen::Index {
        if (n == netlist.ground()) return -1;
        return static_cast<Eigen::Index>(
            std::find(nodes.begin(), nodes.end(), n) - nodes.begin());
    };

    auto dim = static_cast<Eigen::Index>(nodes.size());
    MnaSystem sys;
    sys.admittance = CMatrix::Zero(dim, dim);
    sys.port_injections = CMatrix::Zero(dim, static_cast<Eigen::Index>(netlist.ports().size()));
    sys.node_order = nodes;

    double w = kTwoPi * freq_hz;
    auto stamp = [&](Eigen::Index a, Eigen::Index b, Complex y) {
        if (a >= 0) sys.admittance(a, a) += y;
        if (b >= 0) sys.admittance(b, b) += y;
        if (a >= 0 && b >= 0) {
            sys.admittance(a, b) -= y;
            sys.admittance(b, a) -= y;
        }
    };
    for (const auto& e : netlist.elements()) {
        Complex y;
        switch (e.kind) {
            case ElementKind::R: y = Complex(1.0 / e.value, 0.0); break;
            case ElementKind::C: y = Complex(0.0, w * e.value); break;
            case ElementKind::L: y = Complex(0.0, -1.0 / (w * e.value)); break;
        }
        stamp(index_of(e.node_a), index_of(e.node_b), y);
    }

    for (std::size_t k = 0; k < netlist.ports().size(); ++k) {
        const auto& p = netlist.ports()[k];
        Complex j(1.0 / p.z0, 0.0);
        Eigen::Index plus = index_of(p.node_plus), minus = index_of(p.node_minus);
        if (plus >= 0) sys.port_injections(plus, static_cast<Eigen::Index>(k)) += j;
        if (minus >= 0) sys.port_injections(minus, static_cast<Eigen::Index>(k)) -= j;
    }
    return sys;
}

SweepSolveResult solve_sparams(const Netlist& netlist, const FrequencySweep& sweep) {
    const auto& ports = netlist.ports();
    auto np = static_cast<Eigen::Index>(ports.size());

    std::vector<ScatteringMatrix> mats;
    std::vector<double> condition;
    std::vector<std::string> warnings;
    mats.reserve(sweep.size());

    for (double f : sweep.points()) {
        MnaSystem sys = stamp_mna(netlist, f);
        auto index_of = [&](const std::string& n) -> Eigen::Index {
            if (n == netlist.ground()) return -1;
            return static_cast<Eigen::Index>(
                std::find(sys.node_order.begin(), sys.node_order.end(), n) -
                sys.node_order.begin());
        };
        CMatrix m = sys.admittance;
        for (const auto& p : ports) {
            Complex y(1.0 / p.z0, 0.0);
            Eigen::Index plus = index_of(p.node_plus), minus = index_of(p.node_minus);
            if (plus >= 0) m(plus, plus) += y;
            if (minus >= 0) m(minus, minus) += y;
            if (plus >= 0 && minus >= 0) {
                m(plus, minus) -= y;
                m(minus, plus) -= y;
            }
        }

        Eigen::PartialPivLU<CMatrix> lu(m);
        double rcond = lu.rcond();
        if (!(rcond > 1e-15)) {
            double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
            throw NumericalError("circuit system is singular at " + freq_str(f), cond);
        }
        double cond = 1.0 / rcond;
        condition.push_back(cond);
        if (cond > 1e12)
            warnings.push_back("ill-conditioned circuit system at " + freq_str(f) +
                               " (condition estimate " + std::to_string(cond) + ")");

        CMatrix v = lu.solve(sys.port_injections);
        CMatrix s(np, np);
        for (Eigen::Index k = 0; k < np; ++k) {
            for (Eigen::Index mm = 0; mm < np; ++mm) {
                const auto& pm = ports[static_cast<std::size_t>(mm)];
                Eigen::Index plus = index_of(pm.node_plus), minus = index_of(pm.node_minus);
                Complex vm = (plus >= 0 ? v(plus, k) : Complex(0)) -
                             (minus >= 0 ? v(minus, k) : Complex(0));
                Complex b = 2.0 * vm - (mm == k ? 1.0 : 0.0);
                s(mm, k) = b * std::sqrt(ports[static_cast<std::size_t>(k)].z0 / pm.z0);
            }
        }
        mats.emplace_back(std::move(s));
    }

    std::vector<double> z_ref;
    for (const auto& p : ports) z_ref.push_back(p.z0);
    return {NetworkRecord(sweep, std::move(mats), std::move(z_ref)), std::move(condition),
            std::move(warnings)};
}

Netlist build_resonator_ladder(const std::vector<ResonatorStage>& stages, double port_z0) {
    if (stages.empty() || stages.size() > 12)
        throw ValidationError("resonator ladder needs between 1 and 12 stages");

    std::vector<CircuitElement> elems;
    std::string cur = "p1";
    for (std::size_t k = 0; k < stages.size(); ++k) {
        const auto& st = stages[k];
        std::string idx = std::to_string(k + 1);
        if (st.topology == StageTopology::SeriesRlcShunt) {
            std::string a = "s" + idx + "a", b = "s" + idx + "b";
            elems.push_back({ElementKind::R, "R" + idx, cur, a, st.r_ohm});
            elems.push_back({ElementKind::L, "L" + idx, a, b, st.l_henry});
            elems.push_back({ElementKind::C, "C" + idx, b, "0", st.c_farad});
        } else {
            std::string next = "n" + idx;
            elems.push_back({ElementKind::R, "R" + idx, cur, next, st.r_ohm});
            elems.push_back({ElementKind::L, "L" + idx, cur, next, st.l_henry});
            elems.push_back({ElementKind::C, "C" + idx, cur, next, st.c_farad});
            cur = next;
        }
    }
    return Netlist(std::move(elems), {{"p1", "0", port_z0}}, "0");
}

double parse_valued_unit(const std::string& token, ElementKind kind, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr == token.data())
        throw ParseError("malformed value '" + token + "'", line_no);
    std::string unit(ptr, token.data() + token.size());

    struct UnitScale {
        const char* name;
        double scale;
    };
    static const UnitScale r_units[] = {{"ohm", 1.0}, {"kohm", 1e3}, {"Mohm", 1e6}};
    static const UnitScale l_units[] = {
        {"H", 1.0}, {"mH", 1e-3}, {"uH", 1e-6}, {"nH", 1e-9}, {"pH", 1e-12}};
    static const UnitScale c_units[] = {{"F", 1.0},   {"mF", 1e-3}, {"uF", 1e-6},
                                        {"nF", 1e-9}, {"pF", 1e-12}, {"fF", 1e-15}};

    auto match = [&](const UnitScale* table, std::size_t count) -> double {
        for (std::size_t i = 0; i < count; ++i)
            if (unit == table[i].name) return v * table[i].scale;
        throw ParseError("unknown " + std::string(1, kind_letter(kind)) + " unit '" + unit +
                             "' in '" + token + "'",
                         line_no);
    };
    switch (kind) {
        case ElementKind::R: return match(r_units, std::size(r_units));
        case ElementKind::L: return match(l_units, std::size(l_units));
        case ElementKind::C: return match(c_units, std::size(c_units));
    }
    throw ValidationError("unknown element kind");
}

Netlist parse_netlist(const std::string& text) {
    std::istringstream stream(text);
    std::string raw;
    std::size_t line_no = 0;

    std::vector<CircuitElement> elems;
    std::map<std::size_t, CircuitPort> ports_by_number;
    std::string ground;

    while (std::getline(stream, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream toks(raw);
        std::vector<std::string> t;
        std::string tok;
        while (toks >> tok) t.push_back(tok);
        if (t.empty()) continue;

        const std::string& head = t[0];
        if (head == "R" || head == "L" || head == "C") {
            if (t.size() != 5)
                throw ParseError("element line needs: kind label node_a node_b value", line_no);
            ElementKind kind = head == "R"   ? ElementKind::R
                               : head == "L" ? ElementKind::L
                                             : ElementKind::C;
            elems.push_back({kind, t[1], t[2], t[3], parse_valued_unit(t[4], kind, line_no)});
        } else if (head == "PORT") {
            if (t.size() != 5)
                throw ParseError("port line needs: PORT n node_plus node_minus z0", line_no);
            std::size_t num = 0;
            auto [p, ec] = std::from_chars(t[1].data(), t[1].data() + t[1].size(), num);
            if (ec != std::errc() || p != t[1].data() + t[1].size() || num == 0)
                throw ParseError("port number must be a positive integer", line_no);
            double z0 = 0.0;
            auto [p2, ec2] = std::from_chars(t[4].data(), t[4].data() + t[4].size(), z0);
            if (ec2 != std::errc() || p2 != t[4].data() + t[4].size())
                throw ParseError("malformed port impedance '" + t[4] + "'", line_no);
            if (!ports_by_number.emplace(num, CircuitPort{t[2], t[3], z0}).second)
                throw ParseError("duplicate port number " + t[1], line_no);
        } else if (head == "GND") {
            if (t.size() != 2)
                throw ParseError("ground line needs: GND node", line_no);
            if (!ground.empty())
                throw ParseError("duplicate GND line", line_no);
            ground = t[1];
        } else if (head == "FREE") {
            throw ParseError("FREE lines belong in a fit specification, not a plain netlist",
                             line_no);
        } else {
            throw ParseError("unknown directive '" + head + "'", line_no);
        }
    }

    if (ports_by_number.empty())
        throw ParseError("netlist has no PORT line", line_no);
    std::vector<CircuitPort> ports;
    for (const auto& [num, port] : ports_by_number) {
        if (num != ports.size() + 1)
            throw ParseError("port numbers must run 1.." + std::to_string(ports_by_number.size()),
                             0);
        ports.push_back(port);
    }
    if (ground.empty()) ground = "0";
    return Netlist(std::move(elems), std::move(ports), std::move(ground));
}

std::string write_netlist(const Netlist& netlist) {
    auto format_value = [](ElementKind kind, double value) {
        struct Pick {
            const char* name;
            double scale;
        };
        static const Pick r_units[] = {{"Mohm", 1e6}, {"kohm", 1e3}, {"ohm", 1.0}};
        static const Pick l_units[] = {
            {"H", 1.0}, {"mH", 1e-3}, {"uH", 1e-6}, {"nH", 1e-9}, {"pH", 1e-12}};
        static const Pick c_units[] = {{"F", 1.0},   {"mF", 1e-3}, {"uF", 1e-6},
                                       {"nF", 1e-9}, {"pF", 1e-12}, {"fF", 1e-15}};
        const Pick* table;
        std::size_t count;
        switch (kind) {
            case ElementKind::R: table = r_units; count = std::size(r_units); break;
            case ElementKind::L: table = l_units; count = std::size(l_units); break;
            default: table = c_units; count = std::size(c_units); break;
        }
        const Pick* pick = &table[count - 1];
        for (std::size_t i = 0; i < count; ++i)
            if (value >= table[i].scale) {
                pick = &table[i];
                break;
            }
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.15g%s", value / pick->scale, pick->name);
        return std::string(buf);
    };

    std::string out = "GND " + netlist.ground() + "\n";
    for (const auto& e : netlist.elements())
        out += std::string(1, kind_letter(e.kind)) + " " + e.label + " " + e.node_a + " " +
               e.node_b + " " + format_value(e.kind, e.value) + "\n";
    char buf[64];
    for (std::size_t k = 0; k < netlist.ports().size(); ++k) {
        const auto& p = netlist.ports()[k];
        std::snprintf(buf, sizeof buf, "PORT %zu %s %s %.15g\n", k + 1, p.node_plus.c_str(),
                      p.node_minus.c_str(), p.z0);
        out += buf;
    }
    return out;
}

}  // namespace rfkit
