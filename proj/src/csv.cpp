#include "qrse/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qrse/errors.hpp"

namespace qrse {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Lines come back without the newline; tolerate CRLF input.
std::ifstream open_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputNotFound("cannot open '" + path + "'");
  return in;
}

bool next_line(std::ifstream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void expect_header(std::ifstream& in, const std::string& want, const std::string& path) {
  std::string line;
  if (!next_line(in, line) || line != want) {
    throw ParseError("'" + path + "': expected header '" + want + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.empty() || errno == ERANGE) {
    throw ParseError(where + ": bad number '" + text + "'");
  }
  return v;
}

std::vector<PriceRecord> read_price_csv(const std::string& path) {
  std::ifstream in = open_lines(path);
  expect_header(in, "date,area,price", path);
  std::vector<PriceRecord> records;
  std::string line;
  for (int lineno = 2; next_line(in, line); ++lineno) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (f.size() != 3) throw ParseError(where + ": expected 3 fields");
    PriceRecord r{Date::parse(f[0]), f[1], parse_double(f[2], where)};
    if (r.area.empty()) throw ParseError(where + ": empty area");
    if (!(r.price > 0.0)) throw ParseError(where + ": price must be positive");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ReturnRecord> read_returns_csv(const std::string& path) {
  std::ifstream in = open_lines(path);
  expect_header(in, "date,area,return", path);
  std::vector<ReturnRecord> records;
  std::string line;
  for (int lineno = 2; next_line(in, line); ++lineno) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (f.size() != 3) throw ParseError(where + ": expected 3 fields");
    records.push_back(ReturnRecord{Date::parse(f[0]), f[1], parse_double(f[2], where)});
  }
  return records;
}

void write_returns_csv(const std::string& path, const std::vector<ReturnRecord>& returns) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "date,area,return\n";
  for (const ReturnRecord& r : returns) {
    out << r.date.iso() << ',' << r.area << ',' << format_double(r.value) << '\n';
  }
}

std::vector<double> read_samples_csv(const std::string& path) {
  std::ifstream in = open_lines(path);
  expect_header(in, "x", path);
  std::vector<double> samples;
  std::string line;
  for (int lineno = 2; next_line(in, line); ++lineno) {
    if (line.empty()) continue;
    samples.push_back(parse_double(line, path + ":" + std::to_string(lineno)));
  }
  return samples;
}

void write_samples_csv(const std::string& path, const std::vector<double>& samples) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "x\n";
  for (double s : samples) out << format_double(s) << '\n';
}

}  // namespace qrse
