#include "covep/field_io.hpp"

#include "covep/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace covep {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw NumericalError("format_double: conversion failed");
  return std::string(buf, ptr);
}

namespace {

void write_header(std::ostream& os, int dims, std::initializer_list<const char*> tail) {
  for (int a = 0; a < dims; ++a) os << "idx" << a << ",";
  for (const char* t : tail) os << t << ",";
  os << "value\n";
}

void write_index(std::ostream& os, const MetricGrid& grid, NodeIndex v) {
  const auto idx = grid.multi_index(v);
  for (int a = 0; a < grid.dims(); ++a) os << idx[static_cast<std::size_t>(a)] << ",";
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t k = 0;
  while (k < s.size() && (s[k] == ' ' || s[k] == '\t')) ++k;
  return s.substr(k);
}

long parse_int(const std::string& cell, std::size_t line_no) {
  long x = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty())
    throw InputError("csv line " + std::to_string(line_no) + ": bad integer '" + cell + "'");
  return x;
}

double parse_double(const std::string& cell, std::size_t line_no) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(x))
    throw InputError("csv line " + std::to_string(line_no) + ": bad value '" + cell + "'");
  return x;
}

// Reads a node/component table into a dense node-major array. `comp_names`
// are the component index columns and `comp_sizes` their ranges.
std::vector<double> read_table(std::istream& is, const MetricGrid& grid, const std::vector<std::string>& comp_names,
                               const std::vector<int>& comp_sizes) {
  const int n = grid.dims();
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw InputError("csv: empty input");
  const auto header = split(trim(line));
  std::vector<std::string> expected;
  for (int a = 0; a < n; ++a) expected.push_back("idx" + std::to_string(a));
  for (const auto& c : comp_names) expected.push_back(c);
  expected.push_back("value");
  std::vector<std::string> got;
  for (const auto& h : header) got.push_back(trim(h));
  if (got != expected) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    throw InputError("csv: header must be '" + want + "'");
  }

  int block = 1;
  for (int s : comp_sizes) block *= s;
  std::vector<double> data(grid.node_count() * static_cast<std::size_t>(block), 0.0);
  std::vector<unsigned char> seen(data.size(), 0);
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != expected.size())
      throw InputError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(expected.size()) +
                       " columns");
    MultiIndex idx{0, 0, 0};
    for (int a = 0; a < n; ++a) {
      const long i = parse_int(trim(cells[static_cast<std::size_t>(a)]), line_no);
      if (i < 0 || i >= grid.shape(a))
        throw InputError("csv line " + std::to_string(line_no) + ": idx" + std::to_string(a) + " out of range");
      idx[static_cast<std::size_t>(a)] = static_cast<int>(i);
    }
    int comp = 0;
    for (std::size_t c = 0; c < comp_sizes.size(); ++c) {
      const long k = parse_int(trim(cells[static_cast<std::size_t>(n) + c]), line_no);
      if (k < 0 || k >= comp_sizes[c])
        throw InputError("csv line " + std::to_string(line_no) + ": " + comp_names[c] + " out of range");
      comp = comp * comp_sizes[c] + static_cast<int>(k);
    }
    const double value = parse_double(trim(cells.back()), line_no);
    const std::size_t slot = grid.linear_index(idx) * static_cast<std::size_t>(block) + static_cast<std::size_t>(comp);
    if (seen[slot]) throw InputError("csv line " + std::to_string(line_no) + ": duplicate entry");
    seen[slot] = 1;
    data[slot] = value;
  }
  for (std::size_t k = 0; k < seen.size(); ++k)
    if (!seen[k]) {
      const auto v = k / static_cast<std::size_t>(block);
      std::ostringstream os;
      os << "csv: missing entry for node";
      const auto idx = grid.multi_index(v);
      for (int a = 0; a < n; ++a) os << (a ? "," : " ") << idx[static_cast<std::size_t>(a)];
      os << " component " << k % static_cast<std::size_t>(block);
      throw InputError(os.str());
    }
  return data;
}

}  // namespace

void write_one_form_csv(std::ostream& os, const AlgebraOneForm& sigma) {
  const auto& grid = sigma.grid();
  write_header(os, grid.dims(), {"alpha", "i"});
  for (NodeIndex v = 0; v < sigma.node_count(); ++v)
    for (int a = 0; a < sigma.algebra_dim(); ++a)
      for (int i = 0; i < sigma.base_dim(); ++i) {
        write_index(os, grid, v);
        os << a << "," << i << "," << format_double(sigma(v, a, i)) << "\n";
      }
}

void write_algebra_field_csv(std::ostream& os, const AlgebraField& eta) {
  const auto& grid = eta.grid();
  write_header(os, grid.dims(), {"alpha"});
  for (NodeIndex v = 0; v < eta.node_count(); ++v)
    for (int a = 0; a < eta.algebra_dim(); ++a) {
      write_index(os, grid, v);
      os << a << "," << format_double(eta(v, a)) << "\n";
    }
}

void write_coalgebra_field_csv(std::ostream& os, const CoalgebraField& nu) {
  const auto& grid = nu.grid();
  write_header(os, grid.dims(), {"beta"});
  for (NodeIndex v = 0; v < nu.node_count(); ++v)
    for (int b = 0; b < nu.algebra_dim(); ++b) {
      write_index(os, grid, v);
      os << b << "," << format_double(nu(v, b)) << "\n";
    }
}

void write_group_field_csv(std::ostream& os, const GroupField& s) {
  const auto& grid = s.grid();
  write_header(os, grid.dims(), {"comp"});
  for (NodeIndex v = 0; v < s.node_count(); ++v) {
    const auto payload = s[v].payload();
    for (std::size_t c = 0; c < payload.size(); ++c) {
      write_index(os, grid, v);
      os << c << "," << format_double(payload[c]) << "\n";
    }
  }
}

void write_curvature_csv(std::ostream& os, const CurvatureField& f) {
  const auto& grid = f.grid();
  write_header(os, grid.dims(), {"gamma", "i", "j"});
  for (NodeIndex v = 0; v < f.node_count(); ++v)
    for (int c = 0; c < f.algebra_dim(); ++c)
      for (int i = 0; i < f.base_dim(); ++i)
        for (int j = i + 1; j < f.base_dim(); ++j) {
          write_index(os, grid, v);
          os << c << "," << i << "," << j << "," << format_double(f(v, c, i, j)) << "\n";
        }
}

AlgebraOneForm read_one_form_csv(std::istream& is, const BundlePtr& bundle) {
  const int m = bundle->algebra_dim();
  const int n = bundle->base_dim();
  const auto data = read_table(is, bundle->base(), {"alpha", "i"}, {m, n});
  AlgebraOneForm sigma(bundle);
  auto values = sigma.values().values();
  std::copy(data.begin(), data.end(), values.begin());
  return sigma;
}

GroupField read_group_field_csv(std::istream& is, const BundlePtr& bundle) {
  const auto& g = bundle->group();
  const int k = g.payload_size();
  const auto data = read_table(is, bundle->base(), {"comp"}, {k});
  GroupField s(bundle);
  for (NodeIndex v = 0; v < s.node_count(); ++v) {
    std::span<const double> payload(data.data() + v * static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    try {
      s[v] = g.from_payload(payload);
    } catch (const InputError& e) {
      const auto idx = bundle->base().multi_index(v);
      std::ostringstream os;
      os << "csv: node";
      for (int a = 0; a < bundle->base_dim(); ++a) os << (a ? "," : " ") << idx[static_cast<std::size_t>(a)];
      os << ": " << e.what();
      throw InputError(os.str());
    }
  }
  return s;
}

}  // namespace covep
