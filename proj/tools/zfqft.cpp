#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "zfqft/experiments.hpp"

using namespace zfqft;

namespace {

enum Exit { ok = 0, criteria_failed = 1, config_error = 2, numeric_error = 3 };

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string json_out, csv_out;
  bool quiet = false;

  // check-smatrix
  std::string family, s_desc;
  std::optional<double> b, value;
  std::vector<double> bs;
  std::optional<int> samples;
  bool allow_boundary_poles = false;
  // scatter
  int n = 2;
  std::string check;
  // ff-verify
  std::string ff_family;
  // car-disorder
  std::optional<int> n_left, n_right;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

ScatteringFunction smatrix_from_flags(const Options& o) {
  if (!o.s_desc.empty()) return ScatteringFunction::parse(o.s_desc);
  const std::string& f = o.family;
  if (f == "constant" || f == "const") {
    if (!o.value) throw ConfigError("--family constant needs --value");
    return ScatteringFunction::constant(*o.value);
  }
  if (f == "sinh_factor" || f == "sinh") {
    if (!o.b) throw ConfigError("--family sinh_factor needs --b");
    return ScatteringFunction::sinh_factor(*o.b);
  }
  if (f == "product") {
    if (o.bs.empty()) throw ConfigError("--family product needs --bs");
    return ScatteringFunction::product(o.bs);
  }
  throw ConfigError("unknown --family '" + f + "'");
}

Config build_config(const Options& o) {
  Config c = o.config_path.empty() ? Config{} : load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  for (const auto& kv : o.overrides) c.apply_override(kv);
  if (!o.family.empty() || !o.s_desc.empty()) c.smatrix = smatrix_from_flags(o);
  if (o.samples) {
    if (*o.samples < 1) throw ConfigError("--samples must be >= 1");
    c.symmetry.samples = *o.samples;
  }
  if (o.allow_boundary_poles) c.allow_boundary_poles = true;
  if (!o.check.empty()) c.scatter.check = o.check;
  if (!o.ff_family.empty()) {
    builtin_family(o.ff_family, c.ff.params);
    c.ff.family = o.ff_family;
  }
  if (o.n_left || o.n_right) {
    c.car.n_left = o.n_left.value_or(c.car.n_left);
    c.car.n_right = o.n_right.value_or(c.car.n_right);
    if (c.car.n_left < 1 || c.car.n_right < 1 || c.car.n_left + c.car.n_right > 6)
      throw ConfigError("car-disorder needs n_left, n_right >= 1 with n_left + n_right <= 6");
    c.car.sizes.clear();
  }
  return c;
}

int emit(const Options& opt, const Config& c, const Outcome& out, bool extra_ok = true) {
  std::string json = report_json(c, out).dump(2) + "\n";
  std::string json_path = !opt.json_out.empty() ? opt.json_out : c.output.json;
  if (json_path == "-")
    std::cout << json;
  else {
    if (!json_path.empty()) write_file(json_path, json);
    if (!opt.quiet)
      for (const auto& l : out.table) std::cout << l << "\n";
  }
  std::string csv_path = !opt.csv_out.empty() ? opt.csv_out : c.output.csv;
  if (!csv_path.empty() && !out.csv.empty()) write_file(csv_path, out.csv);
  bool pass = out.passed && extra_ok;
  if (!opt.quiet && json_path != "-") std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? Exit::ok : Exit::criteria_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zfqft: numerical checks for S-deformed field theories"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "TOML experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--tol-override", o.overrides, "KEY=VAL tolerance override (repeatable)");
  app.add_option("--json", o.json_out, "write the JSON report here ('-' for stdout)");
  app.add_option("--csv", o.csv_out, "write plot-ready CSV here where the command produces one");
  app.add_flag("--quiet", o.quiet, "suppress table and warnings");

  auto* sm = app.add_subcommand("check-smatrix", "symmetry relations of S on the physical strip");
  sm->add_option("--family", o.family, "constant | sinh_factor | product");
  sm->add_option("--b", o.b, "sinh_factor parameter");
  sm->add_option("--value", o.value, "constant value (+1 or -1)");
  sm->add_option("--bs", o.bs, "product parameters");
  sm->add_option("--samples", o.samples, "strip samples");
  sm->add_flag("--allow-boundary-poles", o.allow_boundary_poles, "accept poles on the strip boundary");

  auto* zf = app.add_subcommand("zf-verify", "exchange relations of the ZF operators");
  zf->add_option("--s", o.s_desc, "S descriptor, e.g. const:1 or sinh:0.785");

  auto* wl = app.add_subcommand("wedge-locality", "twisted locality decay of field pairs");
  wl->add_option("--s", o.s_desc, "S descriptor for the phi vs phi^ pair");

  auto* sc = app.add_subcommand("scatter", "scattering amplitudes, statistics and PFG checks");
  sc->add_option("--s", o.s_desc, "S descriptor");
  sc->add_option("--n", o.n, "particle number for the kernel check")->check(CLI::Range(1, 3));
  sc->add_option("--check", o.check, "kernel | phase | two-body | statistics | pfg")
      ->check(CLI::IsMember({"kernel", "phase", "two-body", "statistics", "pfg"}));

  auto* ff = app.add_subcommand("ff-verify", "form factor axioms and boundary round trip");
  ff->add_option("--family", o.ff_family, "ising-fermion-g | free-majorana | constant | left-field");
  ff->add_option("--s", o.s_desc, "S descriptor (families that take one)");

  auto* car = app.add_subcommand("car-disorder", "CAR lattice disorder and fixed-point identities");
  car->add_option("--n-left", o.n_left, "modes left of the cut");
  car->add_option("--n-right", o.n_right, "modes right of the cut");

  auto* all = app.add_subcommand("all-acceptance", "run acceptance criteria 1-8");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return Exit::config_error;
  }
  quiet_flag() = o.quiet;

  Config c;
  try {
    c = build_config(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return Exit::config_error;
  }

  try {
    if (*sm) return emit(o, c, run_check_smatrix(c));
    if (*zf) return emit(o, c, run_zf_verify(c));
    if (*wl) return emit(o, c, run_wedge_locality(c));
    if (*sc) return emit(o, c, run_scatter(c, o.n));
    if (*ff) return emit(o, c, run_ff_verify(c));
    if (*car) return emit(o, c, run_car_disorder(c));
    if (*all) {
      auto progress = [&](const Criterion& k) {
        if (!o.quiet && o.json_out != "-") std::cout << k.line() << std::endl;
      };
      auto cs = run_criteria(c, progress);
      Outcome out = acceptance_outcome(cs);
      out.table.clear();  // already printed as they finished
      bool timely = true;
      for (const auto& k : cs) timely = timely && k.passed();
      return emit(o, c, out, timely);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return Exit::config_error;
  } catch (const Error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return Exit::numeric_error;
  }
  return Exit::config_error;
}
