#include "d2rl/text.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace d2rl::text {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

namespace {

template <class T>
T parse_number(std::string_view text, const char* kind) {
  const auto trimmed = trim(text);
  T value{};
  const char* first = trimmed.data();
  const char* last = first + trimmed.size();
  if (!trimmed.empty() && trimmed.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (trimmed.empty() || ec != std::errc() || ptr != last)
    throw std::invalid_argument(std::string("expected ") + kind + ", got '" + std::string(text) + "'");
  return value;
}

}  // namespace

double parse_double(std::string_view text) { return parse_number<double>(text, "a real number"); }

std::int64_t parse_int(std::string_view text) { return parse_number<std::int64_t>(text, "an integer"); }

std::uint64_t parse_uint(std::string_view text) {
  return parse_number<std::uint64_t>(text, "a non-negative integer");
}

bool parse_bool(std::string_view text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw std::invalid_argument("expected a boolean, got '" + std::string(text) + "'");
}

std::string_view trim(std::string_view text) noexcept {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(text.substr(start)));
      break;
    }
    out.push_back(trim(text.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\r') ++j;
    out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace d2rl::text
