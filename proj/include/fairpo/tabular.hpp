#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fairpo/csv.hpp"

namespace fairpo {

enum class ColumnKind { numeric, categorical, binary };
enum class ColumnRole { pre_treatment, group, post_treatment, outcome, id, weight };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  ColumnRole role = ColumnRole::pre_treatment;
};

// One column of a rectangular table. Numeric/binary cells live in `num`
// (NaN = missing); categorical cells are codes into the lexicographically
// sorted `levels` (-1 = missing).
struct Column {
  ColumnSpec spec;
  std::vector<double> num;
  std::vector<int> cat;
  std::vector<std::string> levels;

  bool is_categorical() const { return spec.kind == ColumnKind::categorical; }
  bool missing(std::size_t row) const {
    return is_categorical() ? cat[row] < 0 : std::isnan(num[row]);
  }
};

struct DataTable {
  std::vector<Column> columns;
  std::size_t n = 0;

  int col_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].spec.name == name) return static_cast<int>(i);
    return -1;
  }
  const Column& col(const std::string& name) const {
    int i = col_index(name);
    if (i < 0) throw std::invalid_argument("unknown column: " + name);
    return columns[static_cast<std::size_t>(i)];
  }
  Column& col(const std::string& name) {
    return const_cast<Column&>(static_cast<const DataTable*>(this)->col(name));
  }

  const Column* group_column() const {
    const Column* g = nullptr;
    for (const auto& c : columns)
      if (c.spec.role == ColumnRole::group) {
        if (g) throw std::invalid_argument("more than one group column");
        g = &c;
      }
    return g;
  }

  DataTable select_rows(const std::vector<std::size_t>& rows) const {
    DataTable out;
    out.n = rows.size();
    out.columns.reserve(columns.size());
    for (const auto& c : columns) {
      Column nc;
      nc.spec = c.spec;
      nc.levels = c.levels;
      if (c.is_categorical()) {
        nc.cat.reserve(rows.size());
        for (auto r : rows) nc.cat.push_back(c.cat[r]);
      } else {
        nc.num.reserve(rows.size());
        for (auto r : rows) nc.num.push_back(c.num[r]);
      }
      out.columns.push_back(std::move(nc));
    }
    return out;
  }
};

namespace detail {

inline std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* b = s.data();
  const char* e = b + s.size();
  double v = 0;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) return std::nullopt;
  return v;
}

inline std::string format_number(double v) {
  std::array<char, 32> buf;
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

}  // namespace detail

// Loads a CSV whose header matches the schema names (order-insensitive;
// exact set equality required). Unparseable numeric cells and empty fields
// become explicit-missing.
inline DataTable load_csv(const std::string& path, const std::vector<ColumnSpec>& schema) {
  auto rows = csv::parse_file(path);
  if (rows.empty()) throw std::runtime_error(path + ": empty file (no header)");
  const auto& header = rows.front();

  std::set<std::string> have(header.begin(), header.end());
  std::set<std::string> want;
  for (const auto& s : schema) want.insert(s.name);
  if (have != want) {
    std::string msg = path + ": header/schema mismatch; expected {";
    for (const auto& w : want) msg += w + ",";
    msg += "} got {";
    for (const auto& h : header) msg += h + ",";
    msg += "}";
    throw std::runtime_error(msg);
  }
  int group_count = 0;
  for (const auto& s : schema)
    if (s.role == ColumnRole::group) ++group_count;
  if (group_count != 1)
    throw std::invalid_argument("schema must declare exactly one group column");

  DataTable table;
  table.n = rows.size() - 1;
  // column position in file per schema entry
  std::vector<std::size_t> pos(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    auto it = std::find(header.begin(), header.end(), schema[i].name);
    pos[i] = static_cast<std::size_t>(it - header.begin());
  }

  for (std::size_t ci = 0; ci < schema.size(); ++ci) {
    Column col;
    col.spec = schema[ci];
    if (col.is_categorical()) {
      std::vector<std::string> raw(table.n);
      std::set<std::string> lvset;
      for (std::size_t r = 0; r < table.n; ++r) {
        const auto& row = rows[r + 1];
        raw[r] = pos[ci] < row.size() ? row[pos[ci]] : std::string();
        if (!raw[r].empty()) lvset.insert(raw[r]);
      }
      col.levels.assign(lvset.begin(), lvset.end());  // lexicographic
      col.cat.resize(table.n);
      for (std::size_t r = 0; r < table.n; ++r) {
        if (raw[r].empty()) {
          col.cat[r] = -1;
        } else {
          auto it = std::lower_bound(col.levels.begin(), col.levels.end(), raw[r]);
          col.cat[r] = static_cast<int>(it - col.levels.begin());
        }
      }
    } else {
      col.num.resize(table.n);
      std::set<double> observed;
      for (std::size_t r = 0; r < table.n; ++r) {
        const auto& row = rows[r + 1];
        auto v = pos[ci] < row.size() ? detail::parse_number(row[pos[ci]])
                                      : std::nullopt;
        col.num[r] = v ? *v : std::numeric_limits<double>::quiet_NaN();
        if (v) observed.insert(*v);
      }
      if (col.spec.kind == ColumnKind::binary || col.spec.role == ColumnRole::group) {
        for (double v : observed)
          if (v != 0.0 && v != 1.0)
            throw std::runtime_error(path + ": binary column '" + col.spec.name +
                                     "' has non-{0,1} value " + detail::format_number(v));
        if (observed.size() > 2)
          throw std::runtime_error(path + ": binary column '" + col.spec.name +
                                   "' has more than two levels");
      }
    }
    table.columns.push_back(std::move(col));
  }
  return table;
}

inline void write_csv(const DataTable& table, std::ostream& out) {
  std::vector<std::string> header;
  for (const auto& c : table.columns) header.push_back(c.spec.name);
  csv::write_row(out, header);
  std::vector<std::string> row(table.columns.size());
  for (std::size_t r = 0; r < table.n; ++r) {
    for (std::size_t ci = 0; ci < table.columns.size(); ++ci) {
      const auto& c = table.columns[ci];
      if (c.missing(r)) {
        row[ci].clear();
      } else if (c.is_categorical()) {
        row[ci] = c.levels[static_cast<std::size_t>(c.cat[r])];
      } else {
        row[ci] = detail::format_number(c.num[r]);
      }
    }
    csv::write_row(out, row);
  }
}

inline void write_csv(const DataTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_csv(table, out);
}

// Design matrix: one-hot blocks for categorical columns (lexicographic level
// order), numeric/binary passthrough.
struct EncodedMatrix {
  Eigen::MatrixXd design;
  std::vector<std::string> feature_names;
  std::map<std::string, std::pair<int, int>> source_mapping;  // column -> [begin, end)
};

inline EncodedMatrix one_hot_encode(const DataTable& table,
                                    const std::vector<std::string>& columns) {
  std::size_t p = 0;
  for (const auto& name : columns) {
    const auto& c = table.col(name);
    p += c.is_categorical() ? c.levels.size() : 1;
  }
  EncodedMatrix enc;
  enc.design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(table.n),
                                     static_cast<Eigen::Index>(p));
  int at = 0;
  for (const auto& name : columns) {
    const auto& c = table.col(name);
    if (c.is_categorical()) {
      for (std::size_t r = 0; r < table.n; ++r) {
        if (c.cat[r] < 0)
          throw std::invalid_argument("one_hot_encode: missing value in column '" +
                                      name + "' at row " + std::to_string(r));
        enc.design(static_cast<Eigen::Index>(r), at + c.cat[r]) = 1.0;
      }
      for (const auto& lv : c.levels) enc.feature_names.push_back(name + "=" + lv);
      enc.source_mapping[name] = {at, at + static_cast<int>(c.levels.size())};
      at += static_cast<int>(c.levels.size());
    } else {
      for (std::size_t r = 0; r < table.n; ++r) {
        if (c.missing(r))
          throw std::invalid_argument("one_hot_encode: missing value in column '" +
                                      name + "' at row " + std::to_string(r));
        enc.design(static_cast<Eigen::Index>(r), at) = c.num[r];
      }
      enc.feature_names.push_back(name);
      enc.source_mapping[name] = {at, at + 1};
      ++at;
    }
  }
  return enc;
}

// Positivity audit entry: one joint level-combination of the categorical
// columns that contained rows of only one group.
struct PositivityCell {
  std::map<std::string, std::string> levels;
  std::array<std::size_t, 2> group_counts{0, 0};
  std::size_t removed = 0;
};

struct PositivityResult {
  DataTable table;
  std::size_t removed_count = 0;
  std::vector<PositivityCell> audit;
};

// Keeps only rows whose joint categorical cell contains at least one row of
// each group. Idempotent; removed_count + output.n == input.n.
inline PositivityResult positivity_filter(const DataTable& table,
                                          const std::string& group_col,
                                          const std::vector<std::string>& categorical_cols) {
  const auto& g = table.col(group_col);
  if (g.is_categorical())
    throw std::invalid_argument("group column must be binary, not categorical");
  for (std::size_t r = 0; r < table.n; ++r) {
    if (g.missing(r)) continue;
    if (g.num[r] != 0.0 && g.num[r] != 1.0)
      throw std::invalid_argument("group column '" + group_col + "' is not binary");
  }
  std::vector<const Column*> cats;
  for (const auto& name : categorical_cols) {
    const auto& c = table.col(name);
    for (std::size_t r = 0; r < table.n; ++r)
      if (c.missing(r))
        throw std::invalid_argument("positivity_filter: missing value in column '" +
                                    name + "'");
    cats.push_back(&c);
  }

  // cell key -> [count group 0, count group 1]
  std::map<std::vector<int>, std::array<std::size_t, 2>> cells;
  std::vector<std::vector<int>> keys(table.n);
  for (std::size_t r = 0; r < table.n; ++r) {
    std::vector<int> key;
    key.reserve(cats.size());
    for (const auto* c : cats)
      key.push_back(c->is_categorical() ? c->cat[r] : static_cast<int>(c->num[r]));
    const int grp = static_cast<int>(g.num[r]);
    cells[key][static_cast<std::size_t>(grp)]++;
    keys[r] = std::move(key);
  }

  PositivityResult result;
  std::vector<std::size_t> keep;
  keep.reserve(table.n);
  for (std::size_t r = 0; r < table.n; ++r) {
    const auto& counts = cells[keys[r]];
    if (counts[0] > 0 && counts[1] > 0) keep.push_back(r);
  }
  for (const auto& [key, counts] : cells) {
    if (counts[0] > 0 && counts[1] > 0) continue;
    PositivityCell cell;
    for (std::size_t i = 0; i < cats.size(); ++i) {
      const auto* c = cats[i];
      cell.levels[c->spec.name] =
          c->is_categorical() ? c->levels[static_cast<std::size_t>(key[i])]
                              : detail::format_number(key[i]);
    }
    cell.group_counts = counts;
    cell.removed = counts[0] + counts[1];
    result.audit.push_back(std::move(cell));
  }
  result.removed_count = table.n - keep.size();
  result.table = table.select_rows(keep);
  return result;
}

inline nlohmann::json positivity_audit_json(const PositivityResult& result) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& cell : result.audit) {
    nlohmann::json entry;
    entry["levels"] = cell.levels;
    entry["group_counts"] = {cell.group_counts[0], cell.group_counts[1]};
    entry["removed"] = cell.removed;
    arr.push_back(std::move(entry));
  }
  return arr;
}

}  // namespace fairpo
