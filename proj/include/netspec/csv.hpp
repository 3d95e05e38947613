#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "netspec/consensus.hpp"
#include "netspec/perturb.hpp"
#include "netspec/spectrum.hpp"

namespace netspec {

/// Numeric CSV with a header line. Values are written with 17 significant
/// digits so a write/read cycle is exact.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

std::string format_double(double x);

/// node_id, t, y_value; one row per (node, round), rounds 0..N.
CsvTable stage1_trace_table(const std::vector<std::vector<double>>& trace);
std::vector<std::vector<double>> stage1_trace_from_table(const CsvTable& t);

/// t, node_id, coeff_index, estimate, V
CsvTable flow_trace_table(const FlowTrace& trace);
FlowTrace flow_trace_from_table(const CsvTable& t);

/// t, node_id, root_index, re, im
CsvTable spectrum_table(const SpectrumTrace& trace);
std::vector<SpectrumEstimate> spectrum_from_table(const CsvTable& t);

/// a, trial, rank, condition, spectrum_error
CsvTable sweep_table(const SweepReport& report);
std::vector<SweepTrial> sweep_from_table(const CsvTable& t);

}  // namespace netspec
