#pragma once

#include <string>

#include "rfkit/network.hpp"

namespace rfkit {

enum class TsFormat { RI, MA, DB };
enum class FreqUnit { Hz, kHz, MHz, GHz };

double freq_unit_scale(FreqUnit unit);

// Writer-side knobs. z_ref is the parse-time default when the option line
// omits "R"; the writer always emits the record's own reference impedance.
struct TouchstoneOptions {
    FreqUnit freq_unit = FreqUnit::GHz;
    TsFormat format = TsFormat::MA;
    double z_ref = 50.0;
};

// Touchstone v1 text -> NetworkRecord. declared_ports = 0 lets the parser
// infer the port count from the data layout (line wrapping of the first
// frequency block). Comment lines are collected into metadata["comments"].
// Touchstone v2 keyword lines ([Version] etc.) are rejected.
NetworkRecord parse_touchstone(const std::string& text, std::size_t declared_ports = 0);

// Reads a file, taking the port-count hint from a .sNp extension when present.
NetworkRecord read_touchstone_file(const std::string& path);

// NetworkRecord -> Touchstone v1 text with >= 12 significant digits, so a
// parse of the output reproduces the record to better than 1e-9.
// Requires a uniform reference impedance (v1 stores a single R).
std::string write_touchstone(const NetworkRecord& record, const TouchstoneOptions& options = {});

void write_touchstone_file(const std::string& path, const NetworkRecord& record,
                           const TouchstoneOptions& options = {});

}  // namespace rfkit
