// SPDX-License-Identifier: Apache-2.0
#include "blr/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace blr {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool missing(const std::string& c) { return c.empty() || c == "NA" || c == "na" || c == "NaN" || c == "nan"; }

}  // namespace

IngestResult ingest_csv(std::istream& in, const std::string& response, Family family) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw IngestError("empty input: a header row is required");
  ++line_no;
  const std::vector<std::string> header = split(line);
  const auto rit = std::find(header.begin(), header.end(), response);
  if (rit == header.end()) throw IngestError("response column '" + response + "' not found in header");
  if (std::count(header.begin(), header.end(), response) > 1)
    throw IngestError("response column '" + response + "' appears more than once");
  const std::size_t rcol = static_cast<std::size_t>(rit - header.begin());

  std::vector<std::vector<std::uint8_t>> bits(header.size());
  std::vector<double> y;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size())
      throw IngestError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                        " cells, found " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string where = "line " + std::to_string(line_no) + ", column '" + header[c] + "'";
      if (missing(cells[c])) throw IngestError("missing value at " + where);
      if (c == rcol) {
        double v;
        try {
          std::size_t used = 0;
          v = std::stod(cells[c], &used);
          if (used != cells[c].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
          throw IngestError("non-numeric response '" + cells[c] + "' at " + where);
        }
        if (!std::isfinite(v)) throw IngestError("non-finite response at " + where);
        if (family == Family::Binomial && v != 0.0 && v != 1.0)
          throw IngestError("binomial response must be 0 or 1 at " + where);
        y.push_back(v);
      } else {
        if (cells[c] != "0" && cells[c] != "1")
          throw IngestError("covariate value '" + cells[c] + "' is not 0 or 1 at " + where);
        bits[c].push_back(cells[c] == "1" ? 1 : 0);
      }
    }
  }

  IngestResult res;
  Dataset& d = res.data;
  d.n = y.size();
  d.y = std::move(y);
  d.family = family;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == rcol) continue;
    BitColumn col = BitColumn::from_bits(bits[c]);
    const auto dup = std::find(d.x.begin(), d.x.end(), col);
    if (dup != d.x.end()) {
      res.warnings.push_back("column '" + header[c] + "' duplicates '" +
                             d.names[static_cast<std::size_t>(dup - d.x.begin())] + "' and was dropped");
      continue;
    }
    d.x.push_back(std::move(col));
    d.names.push_back(header[c]);
  }
  d.m = d.x.size();
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw IngestError(e.what());
  }
  return res;
}

IngestResult ingest_file(const std::string& path, const std::string& response, Family family) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path + "'");
  return ingest_csv(in, response, family);
}

}  // namespace blr
