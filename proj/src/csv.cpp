#include "qtrack/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "qtrack/errors.hpp"

namespace qtrack {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open for writing: " + path.string());
  return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open for reading: " + path.string());
  return f;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits on commas, honoring double-quoted fields (labels like "H[0,1]"
// contain a comma and are written quoted).
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (const char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(trim(field));
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error("bad numeric field: '" + s + "'");
  }
  return v;
}

std::string weight_label(const SparsityPattern& pattern, int l) {
  const auto [i, j] = pattern.free_entries[l];
  return "H[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_weights_csv(const std::filesystem::path& path, const Vec& w,
                       const SparsityPattern& pattern) {
  if (w.size() != pattern.weight_count()) {
    throw DimensionMismatch("weights do not match pattern");
  }
  auto f = open_out(path);
  for (int l = 0; l < pattern.weight_count(); ++l) {
    f << (l ? "," : "") << '"' << weight_label(pattern, l) << '"';
  }
  f << "\n";
  for (int l = 0; l < w.size(); ++l) {
    f << (l ? "," : "") << format_double(w(l));
  }
  f << "\n";
}

Vec read_weights_csv(const std::filesystem::path& path,
                     const SparsityPattern& pattern) {
  auto f = open_in(path);
  std::string header, data;
  if (!std::getline(f, header) || !std::getline(f, data)) {
    throw Error("weights CSV must have a header and a data row");
  }
  const auto labels = split_csv(header);
  if (static_cast<int>(labels.size()) != pattern.weight_count()) {
    throw StructureViolation("weights CSV header does not match the pattern size");
  }
  for (int l = 0; l < pattern.weight_count(); ++l) {
    if (labels[l] != weight_label(pattern, l)) {
      throw StructureViolation("weights CSV header entry '" + labels[l] +
                               "' does not match expected '" +
                               weight_label(pattern, l) + "'");
    }
  }
  const auto fields = split_csv(data);
  if (fields.size() != labels.size()) throw Error("weights CSV row length mismatch");
  Vec w(pattern.weight_count());
  for (int l = 0; l < w.size(); ++l) w(l) = parse_double(fields[l]);
  return w;
}

void write_dense_csv(const std::filesystem::path& path, const Mat& M) {
  auto f = open_out(path);
  for (int j = 0; j < M.cols(); ++j) f << (j ? "," : "") << "c" << j;
  f << "\n";
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) {
      f << (j ? "," : "") << format_double(M(i, j));
    }
    f << "\n";
  }
}

void write_steps_csv(const std::filesystem::path& path,
                     const std::vector<StepRecord>& steps, std::uint64_t seed) {
  auto f = open_out(path);
  f << "# seed=" << seed << "\n";
  if (steps.empty()) return;
  const int n = static_cast<int>(steps.front().x.size());
  const int m = static_cast<int>(steps.front().u.size());
  f << "k";
  for (int i = 1; i <= n; ++i) f << ",x" << i;
  for (int i = 1; i <= m; ++i) f << ",u" << i;
  for (int i = 1; i <= n; ++i) f << ",r" << i;
  f << ",c\n";
  for (const StepRecord& s : steps) {
    f << s.k;
    for (int i = 0; i < n; ++i) f << "," << format_double(s.x(i));
    for (int i = 0; i < m; ++i) f << "," << format_double(s.u(i));
    for (int i = 0; i < n; ++i) f << "," << format_double(s.r(i));
    f << "," << format_double(s.c) << "\n";
  }
}

void write_iterations_csv(const std::filesystem::path& path,
                          const std::vector<IterationRecord>& iterations,
                          std::uint64_t seed) {
  auto f = open_out(path);
  f << "# seed=" << seed << "\n";
  f << "i,dw,e_I,e_II\n";
  for (const IterationRecord& r : iterations) {
    f << r.i << "," << format_double(r.dw) << ",";
    if (r.has_errors) {
      f << format_double(r.e_I) << "," << format_double(r.e_II);
    } else {
      f << ",";
    }
    f << "\n";
  }
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRow>& rows) {
  auto f = open_out(path);
  f << "system,method,reference,rms,rms_ref,e_I,e_II\n";
  for (const MetricsRow& r : rows) {
    f << r.system << "," << r.method << "," << r.reference << ","
      << format_double(r.rms) << "," << format_double(r.rms_ref) << ","
      << format_double(r.e_I) << "," << format_double(r.e_II) << "\n";
  }
}

void write_tidy_csv(const std::filesystem::path& path,
                    const std::vector<TidyRow>& rows) {
  auto f = open_out(path);
  f << "series,k,value\n";
  for (const TidyRow& r : rows) {
    f << r.series << "," << r.k << "," << format_double(r.value) << "\n";
  }
}

std::vector<Vec> read_tabulated_csv(const std::filesystem::path& path, int n) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw Error("tabulated CSV is empty");
  const auto header = split_csv(line);
  if (static_cast<int>(header.size()) != n) {
    throw DimensionMismatch("tabulated CSV must have n columns");
  }
  for (int i = 0; i < n; ++i) {
    if (header[i] != "r" + std::to_string(i + 1)) {
      throw Error("tabulated CSV header must be r1..rn");
    }
  }
  std::vector<Vec> table;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) != n) {
      throw DimensionMismatch("tabulated CSV row length mismatch");
    }
    Vec r(n);
    for (int i = 0; i < n; ++i) r(i) = parse_double(fields[i]);
    table.push_back(std::move(r));
  }
  return table;
}

}  // namespace qtrack
