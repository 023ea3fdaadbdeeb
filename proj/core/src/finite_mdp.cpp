#include "d2rl/finite_mdp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "d2rl/errors.hpp"
#include "d2rl/text.hpp"

namespace d2rl {

FiniteMdp::FiniteMdp(std::size_t n_states, std::size_t n_actions, std::vector<double> reward_support)
    : n_states_(n_states), n_actions_(n_actions), support_(std::move(reward_support)) {
  if (n_states_ == 0 || n_actions_ == 0)
    throw std::invalid_argument("FiniteMdp: state and action counts must be positive");
  if (support_.empty()) throw std::invalid_argument("FiniteMdp: reward support is empty");
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (!std::isfinite(support_[i])) throw std::invalid_argument("FiniteMdp: non-finite reward");
    if (i > 0 && !(support_[i - 1] < support_[i]))
      throw std::invalid_argument("FiniteMdp: reward support must be strictly increasing");
  }
  prob_.assign(n_states_ * n_actions_ * n_states_ * support_.size(), 0.0);
}

std::size_t FiniteMdp::index(std::size_t s, std::size_t a, std::size_t next, std::size_t r_index) const {
  if (s >= n_states_ || a >= n_actions_ || next >= n_states_ || r_index >= support_.size())
    throw std::out_of_range("FiniteMdp: index out of range");
  return ((s * n_actions_ + a) * n_states_ + next) * support_.size() + r_index;
}

void FiniteMdp::set_probability(std::size_t s, std::size_t a, std::size_t next, std::size_t r_index,
                                double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("FiniteMdp: probability outside [0, 1]");
  prob_[index(s, a, next, r_index)] = p;
}

std::span<const double> FiniteMdp::row(std::size_t s, std::size_t a) const {
  const std::size_t width = n_states_ * support_.size();
  return std::span<const double>(prob_).subspan(index(s, a, 0, 0), width);
}

double FiniteMdp::transition(std::size_t s, std::size_t a, std::size_t next) const {
  double total = 0.0;
  for (std::size_t r = 0; r < support_.size(); ++r) total += probability(s, a, next, r);
  return total;
}

double FiniteMdp::expected_reward(std::size_t s, std::size_t a) const {
  double total = 0.0;
  for (std::size_t next = 0; next < n_states_; ++next)
    for (std::size_t r = 0; r < support_.size(); ++r) total += probability(s, a, next, r) * support_[r];
  return total;
}

void FiniteMdp::validate() const {
  for (std::size_t s = 0; s < n_states_; ++s) {
    for (std::size_t a = 0; a < n_actions_; ++a) {
      double total = 0.0;
      for (double p : row(s, a)) {
        if (!(p >= 0.0) || !std::isfinite(p))
          throw std::invalid_argument("FiniteMdp: negative or non-finite probability at state " +
                                      std::to_string(s) + ", action " + std::to_string(a));
        total += p;
      }
      if (std::abs(total - 1.0) > kRowTolerance)
        throw std::invalid_argument("FiniteMdp: probabilities for state " + std::to_string(s) + ", action " +
                                    std::to_string(a) + " sum to " + text::format_double(total));
    }
  }
}

std::string FiniteMdp::to_text() const {
  std::ostringstream out;
  out << n_states_ << ' ' << n_actions_ << ' ' << support_.size() << '\n';
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (i > 0) out << ' ';
    out << text::format_double(support_[i]);
  }
  out << '\n';
  for (std::size_t s = 0; s < n_states_; ++s)
    for (std::size_t a = 0; a < n_actions_; ++a)
      for (std::size_t next = 0; next < n_states_; ++next)
        for (std::size_t r = 0; r < support_.size(); ++r) {
          const double p = probability(s, a, next, r);
          if (p != 0.0)
            out << s << ' ' << a << ' ' << next << ' ' << r << ' ' << text::format_double(p) << '\n';
        }
  return out.str();
}

FiniteMdp FiniteMdp::from_text(std::string_view input) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= input.size()) {
    auto end = input.find('\n', start);
    if (end == std::string_view::npos) end = input.size();
    ++line_no;
    const auto line = text::trim(input.substr(start, end - start));
    if (!line.empty() && line.front() != '#') lines.emplace_back(line_no, line);
    start = end + 1;
  }
  if (lines.size() < 2) throw ParseError(line_no, "MDP text needs a header and a reward support line");

  auto fields = [](const auto& entry, std::size_t expected) {
    auto parts = text::split_whitespace(entry.second);
    if (expected != 0 && parts.size() != expected)
      throw ParseError(entry.first, "expected " + std::to_string(expected) + " fields, found " +
                                        std::to_string(parts.size()));
    return parts;
  };
  auto wrap = [](std::size_t line, auto&& fn) {
    try {
      return fn();
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line, e.what());
    }
  };

  const auto header = fields(lines[0], 3);
  const std::size_t n_states = wrap(lines[0].first, [&] { return text::parse_uint(header[0]); });
  const std::size_t n_actions = wrap(lines[0].first, [&] { return text::parse_uint(header[1]); });
  const std::size_t n_rewards = wrap(lines[0].first, [&] { return text::parse_uint(header[2]); });

  const auto support_fields = fields(lines[1], n_rewards);
  std::vector<double> support;
  for (auto f : support_fields) support.push_back(wrap(lines[1].first, [&] { return text::parse_double(f); }));

  FiniteMdp mdp = wrap(lines[0].first, [&] { return FiniteMdp(n_states, n_actions, support); });
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto f = fields(lines[i], 5);
    wrap(lines[i].first, [&] {
      const auto s = text::parse_uint(f[0]);
      const auto a = text::parse_uint(f[1]);
      const auto next = text::parse_uint(f[2]);
      const auto r = text::parse_uint(f[3]);
      const double p = text::parse_double(f[4]);
      if (mdp.probability(s, a, next, r) != 0.0) throw std::invalid_argument("duplicate entry");
      mdp.set_probability(s, a, next, r, p);
      return 0;
    });
  }
  mdp.validate();
  return mdp;
}

void FiniteMdp::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_text();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

FiniteMdp FiniteMdp::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

}  // namespace d2rl
