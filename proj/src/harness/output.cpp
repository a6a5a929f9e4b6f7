#include "superosc/harness/output.hpp"

#include <fstream>
#include <stdexcept>

namespace superosc::harness {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : columns_(header.size()), path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  file_ = std::fopen(path.string().c_str(), "w");
  if (!file_) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    std::fprintf(file_, "%s%s", i ? "," : "", header[i].c_str());
  std::fputc('\n', file_);
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(file_);
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_)
    throw std::logic_error("CsvWriter: row width differs from header in " + path_.string());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) std::fputc(',', file_);
    if (const auto* d = std::get_if<double>(&cells[i])) {
      std::fputs(format_number(*d).c_str(), file_);
    } else if (const auto* l = std::get_if<long>(&cells[i])) {
      std::fprintf(file_, "%ld", *l);
    } else {
      std::fputs(std::get<std::string>(cells[i]).c_str(), file_);
    }
  }
  std::fputc('\n', file_);
  ++rows_;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace superosc::harness
