#include "gfbsde/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace gfbsde {

namespace {

struct RawEntry {
  std::string value;
  bool quoted = false;
  int line = 0;
  bool consumed = false;
};

using Section = std::map<std::string, RawEntry>;

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// edit distance for the misspelled-key suggestion
std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

class IniFile {
 public:
  IniFile(const std::string& text, std::string origin) : origin_(std::move(origin)) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string s = trim(line);
      if (s.empty() || s[0] == '#' || s[0] == ';') continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(lineno, "malformed section header");
        section = trim(s.substr(1, s.size() - 2));
        sections_[section];  // create
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail(lineno, "expected key = value");
      const std::string key = trim(s.substr(0, eq));
      std::string value = trim(s.substr(eq + 1));
      if (section.empty()) fail(lineno, "key outside any section");
      bool quoted = false;
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        value = value.substr(1, value.size() - 2);
        quoted = true;
      } else {
        // strip a trailing comment on unquoted values
        const auto hash = value.find_first_of("#;");
        if (hash != std::string::npos) value = trim(value.substr(0, hash));
      }
      if (key.empty()) fail(lineno, "empty key");
      if (sections_[section].count(key)) fail(lineno, "duplicate key \"" + key + "\"");
      sections_[section][key] = RawEntry{value, quoted, lineno, false};
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + msg);
  }

  bool has_section(const std::string& name) const { return sections_.count(name) != 0; }

  const RawEntry* find(const std::string& section, const std::string& key) {
    auto sit = sections_.find(section);
    if (sit == sections_.end()) return nullptr;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return nullptr;
    kit->second.consumed = true;
    return &kit->second;
  }

  void reject_unknown(const std::map<std::string, std::vector<std::string>>& schema) const {
    for (const auto& [section, entries] : sections_) {
      auto sit = schema.find(section);
      if (sit == schema.end()) {
        throw ConfigError(origin_ + ": unknown section [" + section + "]");
      }
      for (const auto& [key, entry] : entries) {
        if (entry.consumed) continue;
        std::string best;
        std::size_t best_d = 4;
        for (const std::string& known : sit->second) {
          const std::size_t d = levenshtein(key, known);
          if (d < best_d) {
            best_d = d;
            best = known;
          }
        }
        std::string msg = origin_ + ":" + std::to_string(entry.line) + ": unknown key \"" + key +
                          "\" in section [" + section + "]";
        if (!best.empty()) msg += " (did you mean \"" + best + "\"?)";
        throw ConfigError(msg);
      }
    }
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, Section> sections_;
};

double parse_double(IniFile& ini, const std::string& section, const std::string& key,
                    double fallback) {
  const RawEntry* e = ini.find(section, key);
  if (!e) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(e->value, &pos);
    if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    ini.fail(e->line, "key \"" + key + "\": expected a number, got \"" + e->value + "\"");
  }
}

std::int64_t parse_int(IniFile& ini, const std::string& section, const std::string& key,
                       std::int64_t fallback) {
  const RawEntry* e = ini.find(section, key);
  if (!e) return fallback;
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(e->value, &pos);
    if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    ini.fail(e->line, "key \"" + key + "\": expected an integer, got \"" + e->value + "\"");
  }
}

std::string parse_expr_source(IniFile& ini, const std::string& section, const std::string& key,
                              const std::string& fallback) {
  const RawEntry* e = ini.find(section, key);
  if (!e) return fallback;
  return e->value;
}

}  // namespace

RunConfig RunConfig::load_text(const std::string& text, const std::string& origin) {
  IniFile ini(text, origin);

  for (const char* sec : {"g", "coefficients", "grid", "run"}) {
    if (!ini.has_section(sec)) {
      throw ConfigError(origin + ": missing required section [" + std::string(sec) + "]");
    }
  }

  RunConfig cfg;
  cfg.g.sigma_lo = parse_double(ini, "g", "sigma_lo", 0.8);
  cfg.g.sigma_hi = parse_double(ini, "g", "sigma_hi", 1.2);

  const std::string b_src = parse_expr_source(ini, "coefficients", "b", "0");
  const std::string h_src = parse_expr_source(ini, "coefficients", "h", "0");
  const std::string sigma_src = parse_expr_source(ini, "coefficients", "sigma", "1");
  const std::string f_src = parse_expr_source(ini, "coefficients", "f", "0");
  const std::string g_src = parse_expr_source(ini, "coefficients", "g", "0");
  const std::string phi_src = parse_expr_source(ini, "coefficients", "phi", "tanh(x)");
  const double L = parse_double(ini, "coefficients", "L", 1.0);
  const double M = parse_double(ini, "coefficients", "M", 1.5);
  const double lambda = parse_double(ini, "coefficients", "lambda", 0.5);
  const double beta = parse_double(ini, "coefficients", "beta", 4.0);
  const double T = parse_double(ini, "coefficients", "T", 1.0);

  cfg.grid.x_min = parse_double(ini, "grid", "x_min", -6.0);
  cfg.grid.x_max = parse_double(ini, "grid", "x_max", 6.0);
  cfg.grid.nx = static_cast<int>(parse_int(ini, "grid", "nx", 241));
  cfg.grid.T = T;
  cfg.grid.nt = static_cast<int>(parse_int(ini, "grid", "nt", 0));

  cfg.seed = static_cast<std::uint64_t>(parse_int(ini, "run", "seed", 42));
  cfg.n_paths = static_cast<int>(parse_int(ini, "run", "n_paths", 2000));
  cfg.n_steps = static_cast<int>(parse_int(ini, "run", "n_steps", 200));
  cfg.x0 = parse_double(ini, "run", "x0", 0.0);

  static const std::map<std::string, std::vector<std::string>> kSchema = {
      {"g", {"sigma_lo", "sigma_hi"}},
      {"coefficients", {"b", "h", "sigma", "f", "g", "phi", "L", "M", "lambda", "beta", "T"}},
      {"grid", {"x_min", "x_max", "nx", "nt"}},
      {"run", {"seed", "n_paths", "n_steps", "x0"}},
  };
  ini.reject_unknown(kSchema);

  cfg.g.validate();
  cfg.coefficients =
      CoefficientBundle::from_sources(b_src, h_src, sigma_src, f_src, g_src, phi_src, L, M,
                                      lambda, beta, T);
  cfg.grid.validate();
  if (cfg.n_paths < 1 || cfg.n_steps < 1) {
    throw ConfigError(origin + ": [run] n_paths and n_steps must be >= 1");
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_text(buf.str(), path);
}

}  // namespace gfbsde
