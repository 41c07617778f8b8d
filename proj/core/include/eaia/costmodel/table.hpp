#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace eaia::cost {

// Column-ordered result table. Cells are JSON scalars (string, number, bool
// or null).
class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  void add_row(std::vector<nlohmann::json> cells);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<nlohmann::json>>& rows() const { return rows_; }
  const nlohmann::json& cell(std::size_t row, const std::string& column) const;

  // RFC 4180, header row first, LF line endings.
  std::string to_csv() const;
  // Array of objects; keys keep column order.
  nlohmann::ordered_json to_json() const;
  // Aligned plain-text rendering for terminals.
  std::string to_text() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<nlohmann::json>> rows_;
};

// Shortest round-trip decimal form of a double.
std::string format_number(double v);

// Round half away from zero to the given number of decimals.
double round_to(double v, int decimals);

}  // namespace eaia::cost
