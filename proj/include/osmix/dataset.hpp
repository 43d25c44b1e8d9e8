#pragma once

#include <string>
#include <vector>

#include "osmix/sequence.hpp"

namespace osmix {

struct DataRow {
  std::string id;
  Sequence seq;
};

struct Dataset {
  int n = 0;
  std::vector<DataRow> rows;

  std::vector<Sequence> sequences() const;
  std::vector<std::string> ids() const;
};

// A row dropped during ingestion (tie between observed entries, or every
// entry censored) with its source line for the diagnostic.
struct IngestWarning {
  int line = 0;
  std::string id;
  std::string message;
};

struct IngestResult {
  Dataset dataset;
  std::vector<IngestWarning> warnings;
};

// Reads a width-n CSV (header `id,x1,...,xn`; censored entries written as
// 0). Entries are sorted descending per row; l = number of nonzeros.
// Ties among observed entries and all-zero rows are skipped with a
// warning; malformed numbers, negative entries, inconsistent width, and
// duplicate ids throw with the row id and line number.
IngestResult ingest_csv(const std::string& path);

void write_dataset_csv(const std::string& path, const Dataset& dataset);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Writes content to path via a temp file and rename, so readers never see
// a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

// Splits one CSV record on commas (no quoting; the formats here never
// need it). A trailing carriage return is stripped.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace osmix
