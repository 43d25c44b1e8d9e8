#include "osmix/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace osmix {

std::vector<Sequence> Dataset::sequences() const {
  std::vector<Sequence> out;
  out.reserve(rows.size());
  for (const DataRow& r : rows) out.push_back(r.seq);
  return out;
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const DataRow& r : rows) out.push_back(r.id);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() && cur.back() == '\r') cur.pop_back();
  fields.push_back(cur);
  return fields;
}

namespace {

double parse_entry(const std::string& field, const std::string& id, int line) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    std::ostringstream msg;
    msg << "row '" << id << "' (line " << line << "): malformed number '" << field << "'";
    throw std::runtime_error(msg.str());
  }
  return v;
}

}  // namespace

IngestResult ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ingest_csv: empty file " + path);
  const auto header = split_csv_line(line);
  const int n = static_cast<int>(header.size()) - 1;
  if (n < 1) throw std::runtime_error("ingest_csv: header must be id plus n value columns");

  IngestResult result;
  result.dataset.n = n;
  std::unordered_set<std::string> seen_ids;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    const std::string id = fields.empty() ? "" : fields[0];
    if (static_cast<int>(fields.size()) != n + 1) {
      std::ostringstream msg;
      msg << "row '" << id << "' (line " << line_no << "): expected " << n
          << " values, found " << fields.size() - 1;
      throw std::runtime_error(msg.str());
    }
    if (!seen_ids.insert(id).second) {
      std::ostringstream msg;
      msg << "row '" << id << "' (line " << line_no << "): duplicate id";
      throw std::runtime_error(msg.str());
    }

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
      const double v = parse_entry(fields[j], id, line_no);
      if (v < 0.0) {
        std::ostringstream msg;
        msg << "row '" << id << "' (line " << line_no << "): negative entry " << fields[j];
        throw std::runtime_error(msg.str());
      }
      values.push_back(v);
    }
    std::sort(values.begin(), values.end(), std::greater<double>());
    int l = 0;
    while (l < n && values[static_cast<std::size_t>(l)] > 0.0) ++l;
    if (l == 0) {
      result.warnings.push_back({line_no, id, "all entries censored; row skipped"});
      continue;
    }
    bool tied = false;
    for (int j = 1; j < l; ++j)
      if (values[j - 1] == values[j]) {
        tied = true;
        break;
      }
    if (tied) {
      result.warnings.push_back({line_no, id, "tied observed entries; row skipped"});
      continue;
    }

    DataRow row;
    row.id = id;
    row.seq.n = n;
    row.seq.values = Eigen::Map<const Eigen::VectorXd>(values.data(), l);
    validate(row.seq, "row '" + id + "' (line " + std::to_string(line_no) + ")");
    result.dataset.rows.push_back(std::move(row));
  }
  if (result.dataset.rows.empty())
    throw std::runtime_error("ingest_csv: no usable rows in " + path);
  return result;
}

void write_dataset_csv(const std::string& path, const Dataset& dataset) {
  std::ostringstream out;
  out << "id";
  for (int j = 1; j <= dataset.n; ++j) out << ",x" << j;
  out << "\n";
  for (const DataRow& r : dataset.rows) {
    out << r.id;
    for (int j = 0; j < r.seq.l(); ++j) out << ',' << format_double(r.seq.values[j]);
    for (int j = r.seq.l(); j < dataset.n; ++j) out << ",0";
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed for " + path);
}

}  // namespace osmix
