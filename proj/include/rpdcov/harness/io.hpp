#pragma once

// CSV matrices and JSON serialization of results and reports.
//
// CSV: comma separated, one observation per row, optional single header
// row (recognized by a non-numeric first line). Written with 17
// significant digits so doubles round-trip exactly.

#include "rpdcov/harness/benchmark.hpp"
#include "rpdcov/harness/simulation.hpp"
#include "rpdcov/test_result.hpp"
#include "rpdcov/types.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace rpdcov::harness {

// Input problems (missing file, ragged rows, bad numbers) throw IoError.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

MatrixXd read_csv(std::istream& in, const std::string& source = "<stream>");
MatrixXd read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const MatrixXd& m, const std::vector<std::string>& header = {});
void write_csv_file(const std::string& path, const MatrixXd& m, const std::vector<std::string>& header = {});

nlohmann::json to_json(const DcovEstimate& e);
nlohmann::json to_json(const TestResult& r);
nlohmann::json to_json(const ExampleSpec& s);
nlohmann::json to_json(const SimulationReport& r);
nlohmann::json to_json(const std::vector<BenchmarkRow>& rows, const std::vector<BreakEven>& break_even = {});

void write_csv(std::ostream& out, const DcovEstimate& e);
void write_csv(std::ostream& out, const TestResult& r);
void write_csv(std::ostream& out, const SimulationReport& r);
void write_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);

}  // namespace rpdcov::harness
