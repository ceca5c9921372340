#include "schatten/report.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "schatten/errors.hpp"

namespace schatten {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, end);
}

std::string csv_line(const ReportRow& r) {
  std::string out = r.experiment;
  for (double v : {r.p, r.lhs, r.rhs, r.constant, r.ratio, r.factorization_residual, r.deift_residual}) {
    out += ',';
    out += format_double(v);
  }
  out += ',' + std::to_string(r.n) + ',' + format_double(r.side) + ',' + format_double(r.seconds);
  return out;
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << csv_line(r) << '\n';
}

namespace {

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw InvalidArgument("malformed number in CSV: " + s);
  return v;
}

}  // namespace

std::vector<ReportRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw InvalidArgument("CSV header mismatch");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw InvalidArgument("CSV row has " + std::to_string(f.size()) + " fields");
    ReportRow r;
    r.experiment = f[0];
    r.p = parse_double(f[1]);
    r.lhs = parse_double(f[2]);
    r.rhs = parse_double(f[3]);
    r.constant = parse_double(f[4]);
    r.ratio = parse_double(f[5]);
    r.factorization_residual = parse_double(f[6]);
    r.deift_residual = parse_double(f[7]);
    r.n = static_cast<int>(parse_double(f[8]));
    r.side = parse_double(f[9]);
    r.seconds = parse_double(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace schatten
