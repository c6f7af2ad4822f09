#include "esdf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace esdf {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const ConfigEntry& e, const std::string& msg) {
  std::ostringstream os;
  if (e.line > 0) os << "line " << e.line << ": ";
  os << "key '" << e.key << "': " << msg;
  throw ConfigError(os.str());
}

double to_double(const ConfigEntry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) fail(e, "trailing characters in '" + e.value + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(e, "expected a number, got '" + e.value + "'");
  }
}

long to_long(const ConfigEntry& e) {
  long v = 0;
  const auto* b = e.value.data();
  const auto [p, ec] = std::from_chars(b, b + e.value.size(), v);
  if (ec != std::errc() || p != b + e.value.size()) fail(e, "expected an integer, got '" + e.value + "'");
  return v;
}

bool to_bool(const ConfigEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "on" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "off" || e.value == "no") return false;
  fail(e, "expected a boolean, got '" + e.value + "'");
}

int side_of(std::string_view key) {
  if (key == "bc_xlo") return kXLo;
  if (key == "bc_xhi") return kXHi;
  if (key == "bc_ylo") return kYLo;
  return kYHi;
}

void apply_one(RunRequest& req, const ConfigEntry& e) {
  auto& s = req.setup;
  auto& run = s.run;
  const auto& k = e.key;
  try {
    if (k == "case") {
      s = make_case(e.value);
    } else if (k == "scheme") {
      run.flux.scheme = parse_scheme(e.value);
    } else if (k == "dissipation") {
      if (e.value == "none") run.flux.dissipation.mode = DissipationMode::none;
      else if (e.value == "hybrid") run.flux.dissipation.mode = DissipationMode::hybrid;
      else if (e.value == "full-lf") run.flux.dissipation.mode = DissipationMode::full_lf;
      else fail(e, "expected none|hybrid|full-lf");
    } else if (k == "face_pressure") {
      if (e.value == "p-theta") run.flux.face_pressure = FacePressure::p_theta;
      else if (e.value == "rho-beta") run.flux.face_pressure = FacePressure::rho_beta;
      else fail(e, "expected p-theta|rho-beta");
    } else if (k == "double_flux") {
      run.double_flux = to_bool(e);
    } else if (k == "resync_rewrite_energy") {
      run.resync_rewrite_energy = to_bool(e);
    } else if (k == "cfl") {
      run.cfl = to_double(e);
      if (!(run.cfl > 0.0 && run.cfl <= 1.0)) fail(e, "CFL must be in (0, 1]");
    } else if (k == "dt") {
      run.dt_fixed = to_double(e);
      if (!(run.dt_fixed > 0.0)) fail(e, "dt must be positive");
    } else if (k == "t_end") {
      run.t_end = to_double(e);
      if (!(run.t_end > 0.0)) fail(e, "t_end must be positive");
    } else if (k == "max_steps") {
      run.max_steps = to_long(e);
    } else if (k == "cells" || k == "nx") {
      const long n = to_long(e);
      if (n < 2) fail(e, "need at least 2 cells");
      if (s.mesh.dim == 2 && k == "cells")
        s.mesh.ny = std::max(1, static_cast<int>(std::lround(double(s.mesh.ny) * double(n) / s.mesh.nx)));
      s.mesh.nx = static_cast<int>(n);
    } else if (k == "ny") {
      s.mesh.ny = static_cast<int>(to_long(e));
      if (s.mesh.ny < 1) fail(e, "ny must be positive");
    } else if (k == "amr_levels") {
      const long lv = to_long(e);
      if (lv < 0 || lv > 4) fail(e, "amr_levels must be in [0, 4]");
      run.amr.max_levels = static_cast<int>(lv);
      s.mesh.max_level = static_cast<int>(lv);
    } else if (k == "e_ref") {
      run.amr.e_ref = to_double(e);
    } else if (k == "regrid_interval") {
      run.amr.regrid_interval = static_cast<int>(to_long(e));
    } else if (k == "bc_xlo" || k == "bc_xhi" || k == "bc_ylo" || k == "bc_yhi") {
      const int side = side_of(k);
      const BcKind b = parse_bc(e.value);
      run.bc[static_cast<std::size_t>(side)] = b;
      const bool x = side < 2;
      const auto other = static_cast<std::size_t>(side ^ 1);
      if (b == BcKind::periodic) {
        (x ? s.mesh.periodic_x : s.mesh.periodic_y) = true;
      } else {
        (x ? s.mesh.periodic_x : s.mesh.periodic_y) = false;
        if (run.bc[other] == BcKind::periodic) run.bc[other] = BcKind::outflow;
      }
    } else if (k == "p_floor") {
      run.p_floor = to_double(e);
    } else if (k == "threads") {
      run.threads = static_cast<int>(to_long(e));
    } else if (k == "seed") {
      req.seed = static_cast<std::uint64_t>(to_long(e));
    } else if (k == "out" || k == "output") {
      req.output.dir = e.value;
    } else if (k == "series_interval") {
      req.output.series_interval = std::max(1L, to_long(e));
    } else if (k == "snapshot_interval") {
      req.output.snapshot_interval = std::max(0L, to_long(e));
    } else {
      fail(e, "unknown key");
    }
  } catch (const ConfigError& err) {
    const std::string what = err.what();
    if (what.rfind("line ", 0) == 0 || what.rfind("key '", 0) == 0) throw;
    fail(e, what);
  }
}

}  // namespace

std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& source) {
  std::vector<ConfigEntry> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ": line " + std::to_string(line) + ": expected key = value");
    ConfigEntry e{trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)), line};
    if (e.key.empty() || e.value.empty())
      throw ConfigError(source + ": line " + std::to_string(line) + ": empty key or value");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ConfigEntry> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_entries(RunRequest& req, const std::vector<ConfigEntry>& entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].key == "case" && (i > 0 || !req.entries.empty()))
      fail(entries[i], "case must be the first entry");
    apply_one(req, entries[i]);
    req.entries.push_back(entries[i]);
  }
}

RunRequest request_from_entries(const std::vector<ConfigEntry>& entries) {
  RunRequest req;
  if (entries.empty() || entries.front().key != "case")
    throw ConfigError("config must start with a 'case' entry");
  apply_entries(req, entries);
  return req;
}

std::uint64_t config_hash(const RunRequest& req) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& e : req.entries) {
    mix(e.key);
    mix("=");
    mix(e.value);
    mix("\n");
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace esdf
