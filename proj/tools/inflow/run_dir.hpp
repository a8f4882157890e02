#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "inflow/config.hpp"

namespace inflow::cli {

std::string format_number(double v);

/// Ordered key=value pairs written to summary.txt.
class Summary {
 public:
  void add(std::string key, double value);
  void add(std::string key, int value);
  void add(std::string key, std::size_t value);
  void add(std::string key, bool value);
  void add(std::string key, std::string value);
  void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Comma-separated table with a fixed header.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(bool v) { return *this << static_cast<long long>(v ? 1 : 0); }
  CsvWriter& operator<<(std::string_view v);
  /// Finishes the current row; throws InvariantError on a column count mismatch.
  void end_row();
  void close();

 private:
  void cell(const std::string& text);
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t filled_ = 0;
};

/// Output directory of one subcommand run: config.echo, summary.txt,
/// iterations.csv, mesh.txt and exported fields.
class RunDirectory {
 public:
  explicit RunDirectory(std::filesystem::path root);
  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path file(std::string_view name) const { return root_ / name; }
  void echo_config(const ExperimentConfig& config) const;

 private:
  std::filesystem::path root_;
};

}  // namespace inflow::cli
