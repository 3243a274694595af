#include "multiop/result_table.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

#include "multiop/errors.hpp"

namespace multiop {

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc())
    throw NumericalFailure("format_double: conversion failed");
  return std::string(buf, end);
}

namespace {

std::string format_cell(const CellValue& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&value)) return format_double(*d);
  return std::get<std::string>(value);
}

} // namespace

ResultTable::ResultTable(std::vector<std::string> columns, Provenance provenance)
    : columns_(std::move(columns)), provenance_(std::move(provenance)) {
  if (columns_.empty())
    throw std::invalid_argument("ResultTable: need at least one column");
}

void ResultTable::add_row(std::vector<CellValue> row) {
  if (row.size() != columns_.size())
    throw DimensionMismatch("ResultTable::add_row: wrong cell count");
  rows_.push_back(std::move(row));
}

void ResultTable::emit_csv(std::ostream& out) const {
  out << "# experiment=" << provenance_.experiment << "\n";
  out << "# version=" << kCodeVersion << "\n";
  out << "# config_hash=" << provenance_.config_hash << "\n";
  out << "# seed=" << provenance_.seed << "\n";
  for (std::size_t c = 0; c < columns_.size(); ++c)
    out << (c ? "," : "") << columns_[c];
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << format_cell(row[c]);
    out << "\n";
  }
}

void ResultTable::emit_json(std::ostream& out) const {
  nlohmann::ordered_json doc;
  doc["config"]["experiment"] = provenance_.experiment;
  doc["config"]["version"] = kCodeVersion;
  doc["config"]["config_hash"] = provenance_.config_hash;
  doc["config"]["seed"] = provenance_.seed;
  if (!provenance_.config_canonical.empty())
    doc["config"]["effective"] = nlohmann::ordered_json::parse(provenance_.config_canonical);
  doc["cells"] = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json cell;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const CellValue& value = row[c];
      if (const auto* i = std::get_if<std::int64_t>(&value))
        cell[columns_[c]] = *i;
      else if (const auto* d = std::get_if<double>(&value))
        cell[columns_[c]] = *d;
      else
        cell[columns_[c]] = std::get<std::string>(value);
    }
    doc["cells"].push_back(std::move(cell));
  }
  out << doc.dump(2) << "\n";
}

void ResultTable::emit(const std::string& path) const {
  Format format = path.size() >= 5 && path.substr(path.size() - 5) == ".json"
                      ? Format::json
                      : Format::csv;
  emit(path, format);
}

void ResultTable::emit(const std::string& path, Format format) const {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("ResultTable::emit: cannot open " + path);
  if (format == Format::csv)
    emit_csv(file);
  else
    emit_json(file);
  if (!file) throw std::runtime_error("ResultTable::emit: write failed for " + path);
}

} // namespace multiop
