#pragma once

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace superosc::harness {

/// Comma-separated file with a fixed header; numbers as %.16e.
class CsvWriter {
 public:
  using Cell = std::variant<double, long, std::string>;

  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<Cell>& cells);
  std::size_t rows() const { return rows_; }

 private:
  std::FILE* file_ = nullptr;
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::filesystem::path path_;
};

std::string format_number(double v);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace superosc::harness
