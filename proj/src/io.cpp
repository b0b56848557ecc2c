#include "astbayes/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "astbayes/errors.hpp"

namespace astbayes::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct Line {
  std::string_view text;
  std::size_t number;
};

std::vector<Line> lines_of(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    const auto len = pos == std::string_view::npos ? text.size() - start : pos - start;
    ++number;
    out.push_back({text.substr(start, len), number});
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Sample parse_sample(std::string_view text, bool log_transform) {
  Sample s;
  s.log_transformed = log_transform;
  std::size_t first_data_line = 0;
  std::size_t header_line = 0;
  for (const Line& line : lines_of(text)) {
    const auto body = trim(line.text);
    if (body.empty()) continue;
    double v = 0.0;
    if (!parse_double(body, v)) {
      if (line.number == 1) {
        header_line = 1;
        continue;
      }
      throw ParseError("not a number: '" + std::string(body) + "'", line.number);
    }
    if (!std::isfinite(v)) throw ParseError("value is not finite", line.number);
    if (log_transform) {
      if (!(v > 0.0)) throw DomainError("non-positive value under log transform (line " + std::to_string(line.number) + ")");
      v = std::log(v);
    }
    if (first_data_line == 0) first_data_line = line.number;
    s.values.push_back(v);
  }
  if (s.values.empty()) {
    if (header_line != 0) throw ParseError("not a number and no data follows", header_line);
    throw ParseError("no data values", 1);
  }
  return s;
}

Sample ingest(const fs::path& path, bool log_transform) { return parse_sample(read_file(path), log_transform); }

std::string format_sample(const Sample& s) {
  std::string out;
  for (double v : s.values) out += fmt::format("{:.17g}\n", v);
  return out;
}

std::string format_summary(const PosteriorSummary& s) {
  std::string out = "parameter,mean,median,ci_low,ci_high\n";
  for (Parameter p : kAllParameters) {
    const ParameterSummary& r = s[p];
    out += fmt::format("{},{:.10g},{:.10g},{:.10g},{:.10g}\n", parameter_name(p), r.mean, r.median, r.ci_low,
                       r.ci_high);
  }
  return out;
}

std::string format_trace(const Trace& t) {
  std::string out = "iter,alpha,mu,sigma,nu\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{}\n", i, t.alpha[i], t.mu[i], t.sigma[i], t.nu[i]);
  }
  return out;
}

Trace parse_trace(std::string_view text) {
  Trace t;
  bool header_seen = false;
  for (const Line& line : lines_of(text)) {
    const auto body = trim(line.text);
    if (body.empty()) continue;
    if (!header_seen) {
      if (body != "iter,alpha,mu,sigma,nu") throw ParseError("expected trace header iter,alpha,mu,sigma,nu", line.number);
      header_seen = true;
      continue;
    }
    const auto cols = split(body, ',');
    double a = 0.0;
    double m = 0.0;
    double s = 0.0;
    int nu = 0;
    std::size_t iter = 0;
    if (cols.size() != 5 || !parse_int(cols[0], iter) || !parse_double(cols[1], a) || !parse_double(cols[2], m) ||
        !parse_double(cols[3], s) || !parse_int(cols[4], nu)) {
      throw ParseError("malformed trace row", line.number);
    }
    if (!ASTParams{a, nu, m, s}.valid()) throw ParseError("trace row holds invalid parameters", line.number);
    t.alpha.push_back(a);
    t.mu.push_back(m);
    t.sigma.push_back(s);
    t.nu.push_back(nu);
  }
  if (!header_seen) throw ParseError("empty trace file", 1);
  return t;
}

std::string format_predictive(const PredictiveDensity& d) {
  std::string out = "grid,density\n";
  for (std::size_t i = 0; i < d.grid.size(); ++i) out += fmt::format("{:.10g},{:.10g}\n", d.grid[i], d.density[i]);
  return out;
}

std::string format_prior_table(const NuPriorTable& t) {
  std::string out = "nu,kl_neighbor,unnormalized_mass,mass\n";
  for (int nu = kNuMin; nu <= kNuMax; ++nu) {
    const double d = t.kl_neighbor(nu);
    out += fmt::format("{},{:.15e},{:.15e},{:.15e}\n", nu, d, std::expm1(d), t.mass(nu));
  }
  return out;
}

std::string format_sim_results(std::span<const SimCellResult> results) {
  std::string out = "nu_true,alpha,n,rel_rmse,coverage,ci_low_med,ci_high_med\n";
  for (const auto& r : results) {
    out += fmt::format("{},{:.10g},{},{:.10g},{:.10g},{},{}\n", r.true_params.nu, r.true_params.alpha, r.n, r.rel_rmse,
                       r.coverage, r.median_ci.first, r.median_ci.second);
  }
  return out;
}

std::vector<SimCellSpec> parse_grid_config(std::string_view text) {
  std::map<std::string, std::vector<std::string_view>, std::less<>> kv;
  for (const Line& line : lines_of(text)) {
    auto body = line.text;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line.number);
    const std::string key(trim(body.substr(0, eq)));
    std::vector<std::string_view> vals;
    for (auto v : split(body.substr(eq + 1), ',')) {
      if (!v.empty()) vals.push_back(v);
    }
    kv[key] = std::move(vals);
  }

  const auto list = [&](const char* key) -> const std::vector<std::string_view>& {
    static const std::vector<std::string_view> none;
    const auto it = kv.find(key);
    return it == kv.end() ? none : it->second;
  };
  const auto scalar_double = [&](const char* key, double fallback) {
    const auto& v = list(key);
    if (v.empty()) return fallback;
    double d = 0.0;
    if (v.size() != 1 || !parse_double(v[0], d)) throw ConfigError(std::string("grid config: bad value for ") + key);
    return d;
  };
  const auto scalar_count = [&](const char* key, std::size_t fallback) {
    const auto& v = list(key);
    if (v.empty()) return fallback;
    std::size_t c = 0;
    if (v.size() != 1 || !parse_int(v[0], c)) throw ConfigError(std::string("grid config: bad value for ") + key);
    return c;
  };

  for (const auto& [key, _] : kv) {
    static const std::vector<std::string> known{"nu", "alpha", "n", "mu", "sigma", "replications", "iterations",
                                                "burn_in", "thin"};
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("grid config: unknown key " + key);
  }

  std::vector<int> nus;
  for (auto v : list("nu")) {
    int x = 0;
    if (!parse_int(v, x)) throw ConfigError("grid config: bad nu value " + std::string(v));
    nus.push_back(x);
  }
  std::vector<double> alphas;
  for (auto v : list("alpha")) {
    double x = 0.0;
    if (!parse_double(v, x)) throw ConfigError("grid config: bad alpha value " + std::string(v));
    alphas.push_back(x);
  }
  std::vector<std::size_t> ns;
  for (auto v : list("n")) {
    std::size_t x = 0;
    if (!parse_int(v, x)) throw ConfigError("grid config: bad n value " + std::string(v));
    ns.push_back(x);
  }
  if (nus.empty() || alphas.empty() || ns.empty()) throw ConfigError("grid config: nu, alpha and n must be non-empty");

  SamplerConfig cfg;
  cfg.iterations = scalar_count("iterations", 20000);
  cfg.burn_in = scalar_count("burn_in", 2000);
  cfg.thin = scalar_count("thin", 1);
  const double mu = scalar_double("mu", 0.0);
  const double sigma = scalar_double("sigma", 1.0);
  const std::size_t reps = scalar_count("replications", 100);

  std::vector<SimCellSpec> grid;
  for (int nu : nus) {
    for (double a : alphas) {
      for (std::size_t n : ns) {
        SimCellSpec spec{{a, nu, mu, sigma}, n, reps, cfg};
        try {
          spec.validate();
        } catch (const DomainError& e) {
          throw ConfigError(std::string("grid config: ") + e.what());
        }
        grid.push_back(spec);
      }
    }
  }
  return grid;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace astbayes::io
