#pragma once

// CSV emission. Doubles are written in shortest round-trip form, so reading a
// file back reproduces the in-memory values bit for bit.

#include <string>
#include <vector>

#include "ssfp/extension.hpp"
#include "ssfp/prefractal.hpp"

namespace ssfp {

std::string formatDouble(double x);

/// ln_phi,ln_T,ln_R_over_T,J,F,branch_index,round_trip_error,class_flag
std::string scanCsv(const std::vector<ChainPoint>& points);

/// generation,ln_phi,ln_T,ln_R_over_T,J,oracle_deviation
std::string prefractalCsv(const std::vector<ProbeRow>& rows);

/// Throws IoError naming the path.
void writeFile(const std::string& path, const std::string& contents);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parseCsv(const std::string& text);
CsvTable readCsv(const std::string& path);

}  // namespace ssfp
