#include "ssfp/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ssfp/errors.hpp"

namespace ssfp {

std::string formatDouble(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string scanCsv(const std::vector<ChainPoint>& points) {
  std::string out = "ln_phi,ln_T,ln_R_over_T,J,F,branch_index,round_trip_error,class_flag\n";
  for (const auto& p : points) {
    out += formatDouble(p.lnPhi);
    out += ',';
    out += formatDouble(p.params.lnT);
    out += ',';
    out += formatDouble(p.lnRT);
    out += ',';
    out += formatDouble(p.params.J);
    out += ',';
    out += formatDouble(p.params.F);
    out += ',';
    out += std::to_string(p.branch);
    out += ',';
    out += formatDouble(p.roundTripError);
    out += ',';
    out += toString(p.cls);
    out += '\n';
  }
  return out;
}

std::string prefractalCsv(const std::vector<ProbeRow>& rows) {
  std::string out = "generation,ln_phi,ln_T,ln_R_over_T,J,oracle_deviation\n";
  for (const auto& r : rows) {
    out += std::to_string(r.generation) + ',' + formatDouble(r.lnPhi) + ',' + formatDouble(r.lnT) + ',' +
           formatDouble(r.lnRT) + ',' + formatDouble(r.J) + ',' + formatDouble(r.oracleDeviation) + '\n';
  }
  return out;
}

void writeFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw IoError(path + ": write failed");
}

CsvTable parseCsv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

CsvTable readCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  return parseCsv(ss.str());
}

}  // namespace ssfp
