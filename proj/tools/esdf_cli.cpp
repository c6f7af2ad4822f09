#include "esdf/driver.hpp"
#include "esdf/verify.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace esdf;

struct Common {
  std::string case_id;
  std::string config;
  std::vector<std::string> overrides;
  std::string scheme;
  double cfl = 0.0;
  double dt = 0.0;
  double t_end = 0.0;
  long cells = 0;
  int amr_levels = -1;
  std::string out;
  int threads = 0;
  long seed = -1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--case", c.case_id, "res1 | res2 | res3");
  app->add_option("--config", c.config, "run configuration file");
  app->add_option("--scheme", c.scheme, "lf | ec | esdf-central | esdf");
  app->add_option("--cfl", c.cfl, "CFL number");
  app->add_option("--dt", c.dt, "fixed time step");
  app->add_option("--t-end", c.t_end, "end time");
  app->add_option("--cells", c.cells, "base cells along x");
  app->add_option("--amr-levels", c.amr_levels, "maximum refinement levels");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--threads", c.threads, "OpenMP threads (1 for bitwise reproducible output)");
  app->add_option("--seed", c.seed, "seed recorded in outputs");
  app->add_option("--set", c.overrides, "extra key=value overrides")->take_all();
}

std::vector<ConfigEntry> entries_from(const Common& c) {
  std::vector<ConfigEntry> e;
  if (!c.config.empty()) {
    if (!c.case_id.empty()) throw ConfigError("--case and --config are exclusive; put 'case' in the file");
    e = load_config_file(c.config);
  } else if (!c.case_id.empty()) {
    e.push_back({"case", c.case_id, 0});
  } else {
    throw ConfigError("one of --case or --config is required");
  }
  auto add = [&e](const std::string& k, const std::string& v) { e.push_back({k, v, 0}); };
  if (!c.scheme.empty()) add("scheme", c.scheme);
  if (c.cfl > 0.0) add("cfl", format_double(c.cfl));
  if (c.dt > 0.0) add("dt", format_double(c.dt));
  if (c.t_end > 0.0) add("t_end", format_double(c.t_end));
  if (c.cells > 0) add("cells", std::to_string(c.cells));
  if (c.amr_levels >= 0) add("amr_levels", std::to_string(c.amr_levels));
  if (!c.out.empty()) add("out", c.out);
  if (c.threads > 0) add("threads", std::to_string(c.threads));
  if (c.seed >= 0) add("seed", std::to_string(c.seed));
  for (const auto& o : c.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
    add(o.substr(0, eq), o.substr(eq + 1));
  }
  return e;
}

int cmd_run(const Common& c) {
  const auto req = request_from_entries(entries_from(c));
  RunHooks hooks;
  hooks.log = &std::cerr;
  const auto res = run_request(req, hooks);
  std::cout << res.summary << '\n';
  {
    std::ofstream(req.output.dir + "/" + req.setup.id + "_summary.txt") << res.summary << '\n';
  }
  if (!res.ok) {
    std::cerr << "numerical abort: " << res.message << '\n';
    return 1;
  }
  return 0;
}

int cmd_convergence(const Common& c, const std::vector<double>& dts) {
  if (dts.size() < 3) throw ConfigError("convergence needs at least three --dts values");
  auto base = entries_from(c);
  std::vector<std::pair<double, double>> pts;
  RunRequest first;
  for (double dt : dts) {
    auto e = base;
    e.push_back({"dt", format_double(dt), 0});
    auto req = request_from_entries(e);
    if (pts.empty()) first = req;
    RunHooks hooks;
    hooks.write_files = false;
    const auto res = run_request(req, hooks);
    if (!res.ok) {
      std::cerr << "numerical abort at dt=" << dt << ": " << res.message << '\n';
      return 1;
    }
    pts.emplace_back(dt, std::abs(res.dS));
    std::cerr << "dt=" << format_double(dt) << " |dS|=" << format_double(std::abs(res.dS)) << '\n';
  }
  const double order = convergence_fit(pts);
  ensure_directory(first.output.dir);
  OutputHeader hdr{"convergence", hash_hex(config_hash(first)), first.seed};
  {
    CsvWriter w(first.output.dir + "/" + first.setup.id + "_convergence.csv", hdr, {"dt", "abs_dS", "order"});
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", order);
    for (const auto& [dt, ds] : pts) w.row_text({format_double(dt), format_double(ds), buf});
  }
  Summary sm;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", order);
  sm.add("kind", std::string("convergence")).add("case", first.setup.id).add("points", static_cast<long>(pts.size()))
      .add("order", std::string(buf)).add("config_hash", hdr.config_hash)
      .add("seed", static_cast<long>(first.seed)).add("version", std::string(ESDF_VERSION));
  std::cout << sm.line() << '\n';
  return 0;
}

int cmd_verify(long seed, long count, bool flip, const std::string& out) {
  if (count <= 0) throw ConfigError("--count must be positive");
  VerifyOptions opt;
  opt.seed = static_cast<std::uint64_t>(seed);
  opt.count = count;
  opt.inject_sign_flip = flip;
  const auto rep = run_verify(opt);
  const auto text = rep.text();
  std::cout << text;
  if (!out.empty()) {
    ensure_directory(out);
    std::ofstream f(out + "/verify.txt");
    f << OutputHeader{"verify", "none", opt.seed}.line() << '\n' << text;
  }
  return rep.all_passed() ? 0 : 1;
}

int cmd_report(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("no such output directory '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv" || e.path().extension() == ".txt") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::ifstream in(p);
    std::string first, line, last;
    std::getline(in, first);
    if (p.extension() == ".txt") {
      while (std::getline(in, line))
        if (line.rfind("kind=", 0) == 0 || line.rfind("verify ", 0) == 0) last = line;
      std::cout << "file=" << p.filename().string() << ' ' << (last.empty() ? first : last) << '\n';
      continue;
    }
    if (first.rfind("# esdf ", 0) != 0) continue;
    std::string header;
    std::getline(in, header);
    long rows = 0;
    while (std::getline(in, line)) {
      last = line;
      ++rows;
    }
    std::cout << "file=" << p.filename().string() << ' ' << first.substr(7) << " rows=" << rows
              << " columns=" << header << " last=" << last << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-stable Double-Flux multicomponent Euler solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ESDF_VERSION));

  Common run_opts, conv_opts;
  auto* run = app.add_subcommand("run", "run a case to its end time");
  add_common(run, run_opts);

  auto* conv = app.add_subcommand("convergence", "fixed-dt entropy convergence sweep");
  add_common(conv, conv_opts);
  std::vector<double> dts{4e-4, 2e-4, 1e-4, 5e-5};
  conv->add_option("--dts", dts, "time steps")->delimiter(',');

  long seed = 1, count = 10000;
  bool flip = false;
  std::string verify_out;
  auto* ver = app.add_subcommand("verify", "randomized property suite");
  ver->add_option("--seed", seed, "random seed");
  ver->add_option("--count", count, "samples per property");
  ver->add_option("--out", verify_out, "write verify.txt here");
  ver->add_flag("--inject-sign-flip", flip, "test hook: flip the dissipation sign");

  std::string report_dir = "out";
  auto* rep = app.add_subcommand("report", "summarize the outputs in a directory");
  rep->add_option("--out", report_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*conv) {
      if (conv->count("--dt")) throw ConfigError("use --dts for the sweep");
      return cmd_convergence(conv_opts, dts);
    }
    if (*ver) return cmd_verify(seed, count, flip, verify_out);
    if (*rep) return cmd_report(report_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const CompositionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
