#include "d2rl/record.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "d2rl/errors.hpp"
#include "d2rl/text.hpp"

namespace d2rl {

namespace {

void open_for_write(std::ofstream& out, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out.open(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::size_t RunRecord::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("record has no column '" + std::string(name) + "'");
}

bool RunRecord::has_column(std::string_view name) const noexcept {
  for (const auto& c : columns)
    if (c == name) return true;
  return false;
}

std::vector<double> RunRecord::column_values(std::string_view name) const {
  const std::size_t index = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[index]);
  return out;
}

const std::string& RunRecord::meta(std::string_view key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  throw std::out_of_range("record has no metadata '" + std::string(key) + "'");
}

void RunRecord::validate() const {
  if (columns.empty() || columns.front() != "step") throw std::invalid_argument("record must start with a step column");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != columns.size())
      throw std::invalid_argument("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                                  " fields, expected " + std::to_string(columns.size()));
    for (double v : rows[r])
      if (!std::isfinite(v)) throw std::invalid_argument("row " + std::to_string(r) + " has a non-finite value");
    if (r > 0 && !(rows[r][0] > rows[r - 1][0]))
      throw std::invalid_argument("steps do not increase at row " + std::to_string(r));
  }
}

std::string RunRecord::to_csv() const {
  std::string out;
  for (const auto& [k, v] : metadata) out += "# " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += text::format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

void RunRecord::write(const std::filesystem::path& path) const {
  std::ofstream out;
  open_for_write(out, path);
  out << to_csv();
}

RunRecord RunRecord::from_csv(std::string_view text_in) {
  RunRecord record;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text_in.size()) {
    const auto end = text_in.find('\n', pos);
    auto line = text_in.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text_in.size() : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (have_header) throw ParseError(line_no, "metadata after the header row");
      const auto body = text::trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "metadata line without '='");
      record.metadata.emplace_back(std::string(text::trim(body.substr(0, eq))),
                                   std::string(text::trim(body.substr(eq + 1))));
      continue;
    }
    const auto fields = text::split(line, ',');
    if (!have_header) {
      for (auto f : fields) record.columns.emplace_back(f);
      have_header = true;
      continue;
    }
    if (fields.size() != record.columns.size())
      throw ParseError(line_no, "expected " + std::to_string(record.columns.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) {
      try {
        row.push_back(text::parse_double(f));
      } catch (const std::invalid_argument&) {
        throw ParseError(line_no, "not a number: '" + std::string(f) + "'");
      }
    }
    record.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError(line_no, "missing header row");
  return record;
}

RunRecord RunRecord::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_csv(buf.str());
}

void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               std::span<const std::vector<std::string>> rows) {
  std::ofstream out;
  open_for_write(out, path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

}  // namespace d2rl
