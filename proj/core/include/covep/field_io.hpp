#pragma once

// CSV serialization of fields: one row per (node multi-index, component).
//
//   one-forms:        idx0,...,idx{n-1},alpha,i,value
//   algebra fields:   idx0,...,idx{n-1},alpha,value
//   coalgebra fields: idx0,...,idx{n-1},beta,value
//   group fields:     idx0,...,idx{n-1},comp,value   (representation payload)
//   curvature:        idx0,...,idx{n-1},gamma,i,j,value   (i < j)
//
// Values are written in shortest round-trip form, so write/read is exact.

#include "covep/sections.hpp"

#include <iosfwd>
#include <string>

namespace covep {

void write_one_form_csv(std::ostream& os, const AlgebraOneForm& sigma);
void write_algebra_field_csv(std::ostream& os, const AlgebraField& eta);
void write_coalgebra_field_csv(std::ostream& os, const CoalgebraField& nu);
void write_group_field_csv(std::ostream& os, const GroupField& s);
void write_curvature_csv(std::ostream& os, const CurvatureField& f);

/// Throw InputError on malformed headers, out-of-range indices, missing or
/// duplicated entries, or (for group fields) payloads violating the group
/// invariants.
AlgebraOneForm read_one_form_csv(std::istream& is, const BundlePtr& bundle);
GroupField read_group_field_csv(std::istream& is, const BundlePtr& bundle);

/// Shortest decimal representation that reads back to the same double.
std::string format_double(double x);

}  // namespace covep
