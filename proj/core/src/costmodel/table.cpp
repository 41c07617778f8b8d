#include "eaia/costmodel/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "eaia/error.hpp"

namespace eaia::cost {

namespace {

std::string render(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>());
  return v.dump();
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (v == 0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<nlohmann::json> cells) {
  if (cells.size() != columns_.size()) {
    fail(ErrorKind::InvalidArgument, "row width does not match table columns");
  }
  rows_.push_back(std::move(cells));
}

const nlohmann::json& Table::cell(std::size_t row, const std::string& column) const {
  const auto it = std::find(columns_.begin(), columns_.end(), column);
  if (it == columns_.end() || row >= rows_.size()) {
    fail(ErrorKind::InvalidArgument, "no cell " + column);
  }
  return rows_[row][static_cast<std::size_t>(it - columns_.begin())];
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += csv_quote(columns_[i]);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_quote(render(row[i]));
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json Table::to_json() const {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      obj[columns_[i]] = nlohmann::ordered_json::parse(row[i].dump());
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

std::string Table::to_text() const {
  std::vector<std::size_t> width(columns_.size());
  for (std::size_t i = 0; i < columns_.size(); ++i) width[i] = columns_[i].size();
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], render(row[i]).size());
  }
  auto line = [&](auto get) {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      std::string s = get(i);
      if (i + 1 < columns_.size()) s.resize(width[i] + 2, ' ');
      out += s;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + '\n';
  };
  std::string out = line([&](std::size_t i) { return columns_[i]; });
  for (const auto& row : rows_) out += line([&](std::size_t i) { return render(row[i]); });
  return out;
}

}  // namespace eaia::cost
