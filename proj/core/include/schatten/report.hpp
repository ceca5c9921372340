#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "schatten/experiment.hpp"

namespace schatten {

inline constexpr std::string_view kCsvHeader =
    "experiment,p,lhs,rhs,constant,ratio,factorization_residual,deift_residual,n,L,seconds";

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

std::string csv_line(const ReportRow& row);
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);

/// Parses a file produced by write_csv; throws InvalidArgument on malformed input.
std::vector<ReportRow> read_csv(std::istream& in);

}  // namespace schatten
