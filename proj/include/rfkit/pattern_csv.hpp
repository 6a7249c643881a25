#pragma once

#include <string>

#include "rfkit/pattern.hpp"

namespace rfkit {

// Column layouts accepted after the leading "theta_deg,phi_deg":
//   GainDbi      gain_dbi                                  -> gain payload
//   FieldReIm    re_theta,im_theta,re_phi,im_phi           -> field payload
//   FieldMagPh   mag_theta,ph_theta_deg,mag_phi,ph_phi_deg -> field payload
// Auto picks whichever layout the header names.
enum class PatternSchema { Auto, GainDbi, FieldReIm, FieldMagPh };

// CSV -> FarFieldGrid. Rows may come in any order but must fill a complete
// rectangular (theta, phi) grid exactly once; gain is converted from dBi to
// linear on ingestion.
FarFieldGrid parse_pattern_csv(const std::string& text, PatternSchema schema = PatternSchema::Auto);

FarFieldGrid read_pattern_csv_file(const std::string& path,
                                   PatternSchema schema = PatternSchema::Auto);

}  // namespace rfkit
