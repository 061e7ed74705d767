#include "rpdcov/harness/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rpdcov::harness {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool is_blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

}  // namespace

MatrixXd read_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t j = 0; j < fields.size() && numeric; ++j) numeric = parse_double(fields[j], row[j]);
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw IoError(source + ":" + std::to_string(lineno) + ": non-numeric field");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                    " fields, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(source + ": no data rows");
  MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

MatrixXd read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_csv(in, path);
}

void write_csv(std::ostream& out, const MatrixXd& m, const std::vector<std::string>& header) {
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  if (!header.empty()) out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << fmt(m(i, j));
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const MatrixXd& m, const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_csv(out, m, header);
  if (!out) throw IoError("write failed for '" + path + "'");
}

nlohmann::json to_json(const DcovEstimate& e) {
  nlohmann::json j{{"value", e.value}, {"method", to_string(e.method)}, {"n", e.n}};
  if (e.k_projections) j["k_projections"] = *e.k_projections;
  if (e.seed) j["seed"] = *e.seed;
  return j;
}

nlohmann::json to_json(const TestResult& r) {
  nlohmann::json j{{"method", to_string(r.method)}, {"statistic", r.statistic}, {"reject", r.reject},
                   {"degenerate", r.degenerate}};
  j["p_value"] = r.p_value ? nlohmann::json(*r.p_value) : nlohmann::json(nullptr);
  j["threshold"] = r.threshold ? nlohmann::json(*r.threshold) : nlohmann::json(nullptr);
  if (r.gamma) j["gamma"] = {{"shape", r.gamma->shape}, {"rate", r.gamma->rate}};
  if (!r.note.empty()) j["note"] = r.note;
  nlohmann::json c{{"n", r.config.n}, {"p", r.config.p}, {"q", r.config.q}, {"significance", r.config.significance}};
  if (r.config.k_projections) c["k_projections"] = *r.config.k_projections;
  if (r.config.permutations) c["permutations"] = *r.config.permutations;
  if (r.config.seed) c["seed"] = *r.config.seed;
  j["config"] = c;
  return j;
}

nlohmann::json to_json(const ExampleSpec& s) {
  nlohmann::json j{{"example", s.id}, {"n", s.n}, {"p", s.p}, {"q", s.q}, {"seed", s.seed}};
  if (s.id == 5) j["rho"] = s.rho;
  if (s.id == 6) j["sigma"] = s.sigma;
  if (s.id == 7) j["t_frac"] = s.t_frac;
  return j;
}

nlohmann::json to_json(const SimulationReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    nlohmann::json j{{"method", to_string(c.cell.method)},
                     {"example", to_json(c.cell.example)},
                     {"replicates", c.replicates},
                     {"rejections", c.rejections},
                     {"rejection_rate", c.rejection_rate},
                     {"degenerate", c.degenerate},
                     {"failures", c.failures},
                     {"seconds", c.seconds}};
    if (!c.error.empty()) j["error"] = c.error;
    if (c.cell.method == SimMethod::ddc) j["null_calibration"] = "gamma moments from unprojected U-statistics";
    cells.push_back(std::move(j));
  }
  return {{"schema_version", r.schema_version}, {"seed", r.seed},
          {"significance", r.significance},     {"k_projections", r.k_projections},
          {"permutations", r.permutations},     {"replicates", r.replicates},
          {"cells", std::move(cells)}};
}

nlohmann::json to_json(const std::vector<BenchmarkRow>& rows, const std::vector<BreakEven>& break_even) {
  nlohmann::json out{{"schema_version", SimulationReport::kSchemaVersion}};
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"n", r.n}, {"p", r.p}, {"q", r.q}, {"method", r.method}, {"repeats", r.repeats}};
    if (r.skipped) {
      j["skipped"] = true;
      j["note"] = r.note;
    } else {
      j["mean_seconds"] = r.mean_seconds;
      j["sd_seconds"] = r.sd_seconds;
      j["median_seconds"] = r.median_seconds;
    }
    arr.push_back(std::move(j));
  }
  out["rows"] = std::move(arr);
  if (!break_even.empty()) {
    nlohmann::json be = nlohmann::json::array();
    for (const auto& b : break_even) {
      nlohmann::json j{{"p", b.p}, {"q", b.q}};
      j["n0"] = b.n0 ? nlohmann::json(*b.n0) : nlohmann::json(nullptr);
      if (!b.note.empty()) j["note"] = b.note;
      be.push_back(std::move(j));
    }
    out["break_even"] = std::move(be);
  }
  return out;
}

void write_csv(std::ostream& out, const DcovEstimate& e) {
  out << "value,method,n,k_projections,seed\n"
      << fmt(e.value) << ',' << to_string(e.method) << ',' << e.n << ','
      << (e.k_projections ? std::to_string(*e.k_projections) : "") << ','
      << (e.seed ? std::to_string(*e.seed) : "") << '\n';
}

void write_csv(std::ostream& out, const TestResult& r) {
  out << "method,statistic,p_value,threshold,reject,degenerate,n,p,q,significance\n"
      << to_string(r.method) << ',' << fmt(r.statistic) << ',' << (r.p_value ? fmt(*r.p_value) : "") << ','
      << (r.threshold ? fmt(*r.threshold) : "") << ',' << (r.reject ? 1 : 0) << ',' << (r.degenerate ? 1 : 0) << ','
      << r.config.n << ',' << r.config.p << ',' << r.config.q << ',' << fmt(r.config.significance) << '\n';
}

void write_csv(std::ostream& out, const SimulationReport& r) {
  out << "method,example,n,p,q,rho,sigma,t_frac,replicates,rejections,rejection_rate,degenerate,failures,seconds\n";
  for (const auto& c : r.cells) {
    const auto& e = c.cell.example;
    out << to_string(c.cell.method) << ',' << e.id << ',' << e.n << ',' << e.p << ',' << e.q << ',' << fmt(e.rho)
        << ',' << fmt(e.sigma) << ',' << fmt(e.t_frac) << ',' << c.replicates << ',' << c.rejections << ','
        << fmt(c.rejection_rate) << ',' << c.degenerate << ',' << c.failures << ',' << fmt(c.seconds) << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << "n,p,q,method,repeats,mean_seconds,sd_seconds,median_seconds,skipped\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.p << ',' << r.q << ',' << r.method << ',' << r.repeats << ',' << fmt(r.mean_seconds)
        << ',' << fmt(r.sd_seconds) << ',' << fmt(r.median_seconds) << ',' << (r.skipped ? 1 : 0) << '\n';
  }
}

}  // namespace rpdcov::harness
