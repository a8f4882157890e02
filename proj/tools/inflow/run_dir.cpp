#include "run_dir.hpp"

#include <cstdio>
#include <system_error>

#include "inflow/errors.hpp"

namespace inflow::cli {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

void Summary::add(std::string key, double value) { entries_.emplace_back(std::move(key), format_number(value)); }
void Summary::add(std::string key, int value) { entries_.emplace_back(std::move(key), std::to_string(value)); }
void Summary::add(std::string key, std::size_t value) { entries_.emplace_back(std::move(key), std::to_string(value)); }
void Summary::add(std::string key, bool value) { entries_.emplace_back(std::move(key), value ? "true" : "false"); }
void Summary::add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

void Summary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& [key, value] : entries_) out << key << '=' << value << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
    : path_(path), out_(path), columns_(columns.size()) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::cell(const std::string& text) {
  if (filled_ == columns_) throw InvariantError("too many cells in a row of " + path_.string());
  out_ << (filled_ ? "," : "") << text;
  ++filled_;
}

CsvWriter& CsvWriter::operator<<(double v) {
  cell(format_number(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  cell(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view v) {
  cell(std::string(v));
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw InvariantError("short row in " + path_.string());
  out_ << '\n';
  filled_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw IoError("write failed for " + path_.string());
}

RunDirectory::RunDirectory(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    throw IoError("cannot create run directory " + root_.string());
  }
}

void RunDirectory::echo_config(const ExperimentConfig& config) const {
  const auto path = file("config.echo");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_config(config, out);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace inflow::cli
