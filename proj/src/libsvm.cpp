#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "smoothsketch/errors.hpp"
#include "smoothsketch/problem.hpp"

namespace smoothsketch {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view tok, std::size_t line, const char* what) {
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

struct RawRow {
  double label = 0.0;
  std::vector<std::pair<int, double>> features;
};

}  // namespace

Dataset parse_libsvm(std::string_view text, int min_dim) {
  std::vector<RawRow> raw;
  int max_index = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    RawRow row;
    std::size_t pos = 0;
    bool first = true;
    int last_index = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      const std::string_view tok = line.substr(pos, end - pos);
      pos = end;
      if (first) {
        row.label = parse_double(tok, line_no, "label");
        first = false;
        continue;
      }
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "feature '" + std::string(tok) + "' lacks ':'");
      }
      const std::string_view idx_tok = tok.substr(0, colon);
      int idx = 0;
      const auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
      if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx < 1) {
        throw ParseError(line_no, "invalid feature index '" + std::string(idx_tok) + "'");
      }
      if (idx <= last_index) throw ParseError(line_no, "feature indices must increase");
      last_index = idx;
      row.features.emplace_back(idx, parse_double(tok.substr(colon + 1), line_no, "value"));
      max_index = std::max(max_index, idx);
    }
    raw.push_back(std::move(row));
  }
  if (raw.empty()) throw EmptyFile("no datapoints found");

  std::set<double> distinct;
  for (const RawRow& r : raw) distinct.insert(r.label);
  if (distinct.size() > 2) throw ParseError(0, "more than two distinct labels");
  const double low = *distinct.begin();
  const bool plus_minus =
      std::all_of(distinct.begin(), distinct.end(), [](double v) { return v == 1.0 || v == -1.0; });

  Dataset data;
  const int dim = std::max(max_index, min_dim);
  data.rows = Mat::Zero(static_cast<Eigen::Index>(raw.size()), dim);
  data.labels.resize(static_cast<Eigen::Index>(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (const auto& [idx, v] : raw[i].features) data.rows(row, idx - 1) = v;
    if (plus_minus) {
      data.labels(row) = raw[i].label;
    } else if (distinct.size() == 1) {
      data.labels(row) = 1.0;
    } else {
      data.labels(row) = raw[i].label == low ? -1.0 : 1.0;
    }
  }
  return data;
}

Dataset read_libsvm_file(const std::string& path, int min_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_libsvm(buf.str(), min_dim);
}

}  // namespace smoothsketch
