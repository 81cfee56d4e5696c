#include "kltest/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kltest {

namespace {

[[noreturn]] void file_error(const std::filesystem::path& path, std::size_t line,
                             const std::string& message) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + message);
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path.string());
  }
  return in;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) fields.push_back(trim(field));
  return fields;
}

double parse_double(const std::string& token, const std::filesystem::path& path,
                    std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) file_error(path, line, "trailing characters in '" + token + "'");
    return v;
  } catch (const std::invalid_argument&) {
    file_error(path, line, "not a number: '" + token + "'");
  } catch (const std::out_of_range&) {
    file_error(path, line, "number out of range: '" + token + "'");
  }
}

std::int64_t parse_int(const std::string& token, const std::filesystem::path& path,
                       std::size_t line) {
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(token, &used);
    if (used != token.size()) file_error(path, line, "trailing characters in '" + token + "'");
    return v;
  } catch (const std::invalid_argument&) {
    file_error(path, line, "not an integer: '" + token + "'");
  } catch (const std::out_of_range&) {
    file_error(path, line, "integer out of range: '" + token + "'");
  }
}

}  // namespace

Distribution read_distribution_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<double> weights;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string cleaned = line;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::stringstream ss(cleaned);
    std::string token;
    while (ss >> token) {
      weights.push_back(parse_double(token, path, line_no));
    }
  }
  if (weights.empty()) {
    throw std::runtime_error(path.string() + ": no probabilities found");
  }
  try {
    return make_distribution(weights);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<int> read_samples_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<int> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::stringstream ss(line);
    std::string token;
    while (ss >> token) {
      const std::int64_t v = parse_int(token, path, line_no);
      if (v < 0 || v > std::numeric_limits<int>::max()) {
        file_error(path, line_no, "symbol out of range: '" + token + "'");
      }
      samples.push_back(static_cast<int>(v));
    }
  }
  if (samples.empty()) {
    throw std::runtime_error(path.string() + ": no samples found");
  }
  return samples;
}

ExperimentSpec read_experiment_config(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  const std::filesystem::path base = path.parent_path();

  std::optional<Distribution> p, q;
  ExperimentSpec spec{.null_law = make_distribution({1.0})};
  bool have_test = false, have_n_grid = false, have_trials = false, have_eps = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    std::string key, value;
    if (eq != std::string::npos) {
      key = trim(stripped.substr(0, eq));
      value = trim(stripped.substr(eq + 1));
    } else {
      const std::size_t sp = stripped.find_first_of(" \t");
      if (sp == std::string::npos) file_error(path, line_no, "expected 'key = value'");
      key = trim(stripped.substr(0, sp));
      value = trim(stripped.substr(sp + 1));
    }
    if (value.empty()) file_error(path, line_no, "missing value for key '" + key + "'");

    auto resolve = [&](const std::string& v) {
      std::filesystem::path fp(v);
      return fp.is_absolute() ? fp : base / fp;
    };
    if (key == "test") {
      if (value == "one") spec.test = TestKind::one_sample;
      else if (value == "two") spec.test = TestKind::two_sample;
      else file_error(path, line_no, "test must be 'one' or 'two'");
      have_test = true;
    } else if (key == "p") {
      p = read_distribution_file(resolve(value));
    } else if (key == "q") {
      q = read_distribution_file(resolve(value));
    } else if (key == "n_grid") {
      spec.n_grid.clear();
      for (const std::string& tok : split_fields(value, ',')) {
        if (!tok.empty()) spec.n_grid.push_back(parse_int(tok, path, line_no));
      }
      have_n_grid = true;
    } else if (key == "trials") {
      spec.trials = parse_int(value, path, line_no);
      have_trials = true;
    } else if (key == "eps") {
      spec.eps = parse_double(value, path, line_no);
      have_eps = true;
    } else if (key == "variant") {
      if (value == "forward") spec.variant = TestVariant::forward;
      else if (value == "reverse") spec.variant = TestVariant::reverse;
      else if (value == "min") spec.variant = TestVariant::min_of_both;
      else file_error(path, line_no, "variant must be forward, reverse, or min");
    } else if (key == "seed") {
      spec.master_seed = static_cast<std::uint64_t>(parse_int(value, path, line_no));
    } else if (key == "mode") {
      if (value == "monte-carlo" || value == "mc") spec.mode = RunMode::monte_carlo;
      else if (value == "exact" || value == "exact-when-feasible")
        spec.mode = RunMode::exact_when_feasible;
      else file_error(path, line_no, "mode must be 'monte-carlo' or 'exact-when-feasible'");
    } else if (key == "workers") {
      spec.workers = static_cast<int>(parse_int(value, path, line_no));
    } else {
      file_error(path, line_no, "unknown key '" + key + "'");
    }
  }

  if (!p) throw std::runtime_error(path.string() + ": missing 'p' law");
  if (!have_test) throw std::runtime_error(path.string() + ": missing 'test' (one|two)");
  if (!have_n_grid) throw std::runtime_error(path.string() + ": missing 'n_grid'");
  if (!have_trials) throw std::runtime_error(path.string() + ": missing 'trials'");
  if (!have_eps) throw std::runtime_error(path.string() + ": missing 'eps'");
  spec.null_law = *p;
  spec.alt_law = q;
  spec.validate();
  return spec;
}

std::string format_float(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::vector<std::pair<std::int64_t, double>> read_beta_csv(
    const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path.string() + ": empty CSV");
  }
  const std::vector<std::string> header = split_fields(line, ',');
  auto find_column = [&](std::initializer_list<const char*> names) -> int {
    for (const char* name : names) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it != header.end()) return static_cast<int>(it - header.begin());
    }
    return -1;
  };
  const int n_col = find_column({"n"});
  const int beta_col = find_column({"beta_hat", "beta", "type_2"});
  if (n_col < 0 || beta_col < 0) {
    throw std::runtime_error(path.string() +
                             ": header must contain 'n' and one of beta_hat/beta/type_2");
  }
  std::vector<std::pair<std::int64_t, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line, ',');
    if (static_cast<int>(fields.size()) <= std::max(n_col, beta_col)) {
      file_error(path, line_no, "too few columns");
    }
    rows.emplace_back(parse_int(fields[static_cast<std::size_t>(n_col)], path, line_no),
                      parse_double(fields[static_cast<std::size_t>(beta_col)], path, line_no));
  }
  if (rows.empty()) {
    throw std::runtime_error(path.string() + ": no data rows");
  }
  return rows;
}

}  // namespace kltest
