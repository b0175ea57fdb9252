// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace chemotx {

inline constexpr const char* kVersion = "0.3.0";

using Cell = std::variant<double, std::int64_t, std::string>;

/// Named rectangular result table, written out as one CSV file.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
      throw std::logic_error("table " + name + ": row width does not match header");
    }
    rows.push_back(std::move(row));
  }
};

/// Outcome of one in-run assertion.
struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline bool all_passed(const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

/// Fixed significant-digit formatting ("%.Ng"), so output is diff-stable.
inline std::string format_number(double v, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, v);
  return buf;
}

/// printf-style helper for short diagnostic strings.
template <class... Args>
std::string strfmt(const char* fmt, Args... args) {
  const int n = std::snprintf(nullptr, 0, fmt, args...);
  std::string s(static_cast<std::size_t>(n), '\0');
  std::snprintf(s.data(), s.size() + 1, fmt, args...);
  return s;
}

/// Run metadata written as leading '#' comment lines.
struct Provenance {
  std::string kind;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

inline std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(std::ostream& os, const Table& t, const Provenance& prov,
                      int significant_digits) {
  os << "# chemotx " << kVersion << "\n";
  os << "# table: " << t.name << "\n";
  os << "# kind: " << prov.kind << "\n";
  os << "# config_hash: " << hex64(prov.config_hash) << "\n";
  os << "# seed: " << prov.seed << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    os << (i ? "," : "") << t.columns[i];
  }
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
              os << format_number(v, significant_digits);
            } else if constexpr (std::is_same_v<V, std::string>) {
              os << csv_escape(v);
            } else {
              os << v;
            }
          },
          row[i]);
    }
    os << "\n";
  }
}

inline Table checks_table(const std::vector<Check>& checks) {
  Table t{"checks", {"check", "passed", "detail"}, {}};
  for (const auto& c : checks) {
    t.add_row({c.name, std::int64_t{c.passed ? 1 : 0}, c.detail});
  }
  return t;
}

}  // namespace chemotx
