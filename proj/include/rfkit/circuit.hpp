#pragma once

#include <map>
#include <string>
#include <vector>

#include "rfkit/network.hpp"

namespace rfkit {

enum class ElementKind { R, L, C };

struct CircuitElement {
    ElementKind kind;
    std::string label;
    std::string node_a;
    std::string node_b;
    double value;  // SI: ohm, henry, farad
};

struct CircuitPort {
    std::string node_plus;
    std::string node_minus;
    double z0;
};

// Lumped RLC network with named nodes, a designated ground, and wave ports.
// Every node must have a path to ground through elements or port
// terminations (a port's reference impedance connects its two nodes).
class Netlist {
public:
    Netlist(std::vector<CircuitElement> elements, std::vector<CircuitPort> ports,
            std::string ground = "0");

    const std::vector<CircuitElement>& elements() const { return elements_; }
    const std::vector<CircuitPort>& ports() const { return ports_; }
    const std::string& ground() const { return ground_; }
    // Non-ground nodes in a stable order (row/column order of the MNA system)
    const std::vector<std::string>& nodes() const { return nodes_; }

    const CircuitElement* find(const std::string& label) const;
    Netlist with_values(const std::map<std::string, double>& overrides) const;

private:
    std::vector<CircuitElement> elements_;
    std::vector<CircuitPort> ports_;
    std::string ground_;
    std::vector<std::string> nodes_;
};

// Reduced nodal system at one frequency: element admittance stamps only
// (R -> 1/R, C -> jwC, L -> 1/(jwL)), ground row/column eliminated.
// port_injections column k is the Norton current vector for driving port k
// with a unit-voltage source behind z0_k; solve_sparams adds the z0
// termination stamps on top of this matrix.
struct MnaSystem {
    CMatrix admittance;
    CMatrix port_injections;
    std::vector<std::string> node_order;
};

MnaSystem stamp_mna(const Netlist& netlist, double freq_hz);

struct SweepSolveResult {
    NetworkRecord record;
    std::vector<double> condition;  // per-frequency condition estimate
    std::vector<std::string> warnings;
};

// S-parameters of the netlist over the sweep: drive each port behind its
// z0 with the others terminated, solve the nodal system, and read the
// S-column off the port voltages. A singular system raises an error naming
// the frequency; condition estimates above 1e12 produce warnings.
SweepSolveResult solve_sparams(const Netlist& netlist, const FrequencySweep& sweep);

enum class StageTopology { SeriesRlcShunt, ParallelRlcSeries };

struct ResonatorStage {
    StageTopology topology;
    double r_ohm;
    double l_henry;
    double c_farad;
};

// One-port ladder: stages are applied in order walking from the port node.
// SeriesRlcShunt hangs a series R-L-C leg from the current node to ground;
// ParallelRlcSeries inserts R || L || C between the current node and a new
// one. Stage k contributes labels R<k>, L<k>, C<k> (1-based).
Netlist build_resonator_ladder(const std::vector<ResonatorStage>& stages, double port_z0 = 50.0);

// Text formats:
//   netlist:  "R|L|C <label> <node_a> <node_b> <value><unit>"
//             "PORT <n> <node_plus> <node_minus> <z0>", "GND <node>", "#" comments
//   fit spec: netlist plus "FREE <label> <lo><unit> <hi><unit>" lines
// Units: ohm/kohm/Mohm, H/mH/uH/nH/pH, F/mF/uF/nF/pF/fF.
Netlist parse_netlist(const std::string& text);
std::string write_netlist(const Netlist& netlist);

double parse_valued_unit(const std::string& token, ElementKind kind, std::size_t line_no);

}  // namespace rfkit
