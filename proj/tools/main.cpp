// Command-line front end for the weighted two-variable Dirichlet series
// toolkit: inversion, evaluation, norms, weight diagnostics, spectral
// minimum estimation, growth scans, contour functional calculus and
// weight shrinking. Reports are deterministic key/value text; exit codes
// are 0 (ok), 1 (operational error), 2 (a requested check failed).

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dirichlet2d/calculus.hpp"
#include "dirichlet2d/gelfand.hpp"
#include "dirichlet2d/series.hpp"
#include "dirichlet2d/series_io.hpp"
#include "dirichlet2d/weights.hpp"

namespace {

using namespace dirichlet2d;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_cpx(Cpx z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g %.17g", z.real(), z.imag());
  return buf;
}

void kv(const std::string& key, const std::string& value) {
  std::cout << key << " " << value << "\n";
}

void kv(const std::string& key, double value) { kv(key, fmt(value)); }
void kv(const std::string& key, std::uint64_t value) { kv(key, std::to_string(value)); }

Cpx parse_complex_flag(const std::string& text) { return parse_complex(text); }

std::vector<std::uint64_t> parse_depths(const std::string& text) {
  std::vector<std::uint64_t> depths;
  if (text.rfind("pow2:", 0) == 0) {
    std::uint64_t top = std::stoull(text.substr(5));
    if (top == 0 || top > 62) throw std::domain_error("pow2 depth exponent must be in [1, 62]");
    for (std::uint64_t k = 1; k <= top; ++k) depths.push_back(std::uint64_t{1} << k);
    return depths;
  }
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    if (auto caret = field.find('^'); caret != std::string::npos) {
      std::uint64_t base = std::stoull(field.substr(0, caret));
      std::uint64_t exp = std::stoull(field.substr(caret + 1));
      std::uint64_t value = 1;
      for (std::uint64_t i = 0; i < exp; ++i) value = checked_mul(value, base);
      depths.push_back(value);
    } else {
      depths.push_back(std::stoull(field));
    }
  }
  if (depths.empty()) throw std::domain_error("empty depth list");
  return depths;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) values.push_back(std::stod(field));
  if (values.empty()) throw std::domain_error("empty list");
  return values;
}

struct CommonFlags {
  std::string in_path;
  std::string out_path;
  std::uint64_t box = 64;
  std::string weight_spec;
  double p = 1.0;
  bool p_set = false;
  std::string mode;
  std::uint64_t seed = 0;
  double tol = 1e-12;
  std::size_t threads = 1;
};

LoadedSeries load_with_mode(const CommonFlags& flags) {
  LoadedSeries loaded = read_series_file(flags.in_path);
  if (flags.mode.empty()) return loaded;
  if (flags.mode == "exact" && !loaded.header.exact) {
    SeriesQ cast;
    for (const auto& [idx, v] : loaded.float_table().entries()) {
      Rat re, im;
      mpq_set_d(re.get_mpq_t(), v.real());
      mpq_set_d(im.get_mpq_t(), v.imag());
      cast.set(idx.m, idx.n, RatC(re, im));
    }
    loaded.header.exact = true;
    loaded.table = std::move(cast);
  } else if (flags.mode == "float" && loaded.header.exact) {
    loaded.table = to_float(loaded.exact_table());
    loaded.header.exact = false;
  } else if (flags.mode != "exact" && flags.mode != "float") {
    throw std::domain_error("mode must be 'exact' or 'float'");
  }
  return loaded;
}

Weight weight_for(const CommonFlags& flags, const LoadedSeries& loaded) {
  if (!flags.weight_spec.empty()) return parse_weight(flags.weight_spec);
  if (loaded.header.weight_spec) return parse_weight(*loaded.header.weight_spec);
  return Weight::constant(1.0);
}

double p_for(const CommonFlags& flags, const LoadedSeries& loaded) {
  if (flags.p_set) return flags.p;
  if (loaded.header.p) return *loaded.header.p;
  return 1.0;
}

int cmd_invert(const CommonFlags& flags, bool verify) {
  LoadedSeries loaded = load_with_mode(flags);
  BoxSpec box = BoxSpec::square(flags.box);
  Weight w = weight_for(flags, loaded);
  double p = p_for(flags, loaded);
  kv("command", "invert");
  kv("input", flags.in_path);
  kv("box", flags.box);
  kv("mode", loaded.header.exact ? "exact" : "float");

  LoadedSeries out;
  out.header = loaded.header;
  if (loaded.header.exact) {
    SeriesQ inverse = invert_formal(loaded.exact_table(), box);
    kv("support", static_cast<std::uint64_t>(inverse.support_size()));
    kv("l1_partial_norm", l1_norm(inverse));
    kv("weighted_p_norm", weighted_p_norm(inverse, PNormParams(p, w)));
    out.table = std::move(inverse);
  } else {
    SeriesD inverse = invert_formal(loaded.float_table(), box);
    kv("support", static_cast<std::uint64_t>(inverse.support_size()));
    kv("l1_partial_norm", l1_norm(inverse));
    kv("weighted_p_norm", weighted_p_norm(inverse, PNormParams(p, w)));
    out.table = std::move(inverse);
  }
  if (!flags.out_path.empty()) {
    write_series_file(flags.out_path, out);
    kv("output", flags.out_path);
  }

  bool verified = true;
  if (verify) {
    // Verify against the file when one was written, so the round trip
    // through the series format is part of the check.
    const LoadedSeries checked =
        flags.out_path.empty() ? out : read_series_file(flags.out_path);
    if (loaded.header.exact) {
      verified = convolve_truncated(loaded.exact_table(), checked.exact_table(), box) ==
                 SeriesQ::identity();
      kv("verify", verified ? "exact" : "failed");
    } else {
      SeriesD defect =
          convolve_truncated(loaded.float_table(), checked.float_table(), box) -
          SeriesD::identity();
      double miss = l1_norm(defect);
      verified = miss <= flags.tol;
      kv("verify_residual", miss);
      kv("verify", verified ? "ok" : "failed");
    }
  }
  return verified ? kExitOk : kExitCheckFailed;
}

int cmd_eval(const CommonFlags& flags, const std::string& s1_text, const std::string& s2_text,
             const std::string& character_spec) {
  LoadedSeries loaded = load_with_mode(flags);
  SeriesD a = loaded.as_float();
  kv("command", "eval");
  kv("input", flags.in_path);
  Cpx value;
  if (!character_spec.empty()) {
    Semicharacter chi = parse_character(character_spec);
    kv("character", character_spec);
    value = gelfand_transform(a, chi);
  } else {
    Cpx s1 = parse_complex_flag(s1_text.empty() ? "0" : s1_text);
    Cpx s2 = parse_complex_flag(s2_text.empty() ? "0" : s2_text);
    kv("s1", fmt_cpx(s1));
    kv("s2", fmt_cpx(s2));
    value = evaluate(a, EvalPoint{s1, s2});
  }
  kv("value", fmt_cpx(value));
  kv("abs", std::abs(value));
  return kExitOk;
}

int cmd_norm(const CommonFlags& flags) {
  LoadedSeries loaded = load_with_mode(flags);
  Weight w = weight_for(flags, loaded);
  double p = p_for(flags, loaded);
  kv("command", "norm");
  kv("input", flags.in_path);
  kv("p", p);
  kv("weight", w.describe());
  if (loaded.header.exact) {
    kv("norm", weighted_p_norm(loaded.exact_table(), PNormParams(p, w)));
    if (p == 1.0) {
      try {
        kv("norm_exact", rat_to_string(weighted_l1_norm_exact(loaded.exact_table(), w)));
      } catch (const std::domain_error&) {
        kv("norm_exact", "unavailable");
      }
    }
  } else {
    kv("norm", weighted_p_norm(loaded.float_table(), PNormParams(p, w)));
  }
  return kExitOk;
}

int cmd_check_weight(const CommonFlags& flags, std::uint64_t primes, std::uint64_t depth,
                     double tol, std::uint64_t bd_depth, const std::string& require) {
  Weight w = parse_weight(flags.weight_spec);
  BoxSpec box = BoxSpec::square(flags.box);
  kv("command", "check-weight");
  kv("weight", w.describe());
  kv("box", flags.box);
  kv("primes", primes);
  kv("depth", depth);
  kv("tol", tol);

  SubmultReport sub = check_submultiplicative(w, box);
  kv("submultiplicative", sub.holds ? "ok" : "violated");
  kv("submultiplicative_worst_excess", sub.worst_excess);
  if (sub.table_partial) kv("submultiplicative_note", "table weight checked on its box only");

  AdmissibilityReport adm = is_admissible(w, primes, depth, tol);
  for (const GrowthProfile& profile : adm.profiles) {
    std::string key = std::string("growth_inf_") + (profile.axis == Axis::First ? "rho" : "mu") +
                      "_" + std::to_string(profile.prime_index);
    kv(key, profile.inf_estimate);
  }
  kv("admissible", adm.admissible ? "yes" : "no");
  kv("admissible_worst_inf", adm.worst_inf);

  AlmostMonotoneOptions mono_opts;
  mono_opts.prime_count = primes;
  mono_opts.depth = depth;
  mono_opts.tol = tol;
  AlmostMonotoneReport mono = is_almost_monotone(w, box, mono_opts);
  kv("almost_monotone",
     mono.verdict == MonotoneVerdict::Admissible
         ? "admissible"
         : (mono.verdict == MonotoneVerdict::MonotoneWithConstant ? "monotone-with-constant"
                                                                  : "violated"));
  kv("almost_monotone_K", mono.constant);

  bool bd_ok = true;
  for (Index2 pair : {Index2{2, 1}, Index2{1, 2}, Index2{2, 3}}) {
    BeurlingDomarReport bd = beurling_domar_partial(w, pair.m, pair.n, bd_depth);
    std::string prefix =
        "beurling_domar_" + std::to_string(pair.m) + "_" + std::to_string(pair.n);
    kv(prefix + "_partial", bd.partial_sum);
    kv(prefix + "_verdict", bd.convergent_evidence ? "convergent-evidence" : "divergent-evidence");
    bd_ok = bd_ok && bd.convergent_evidence;
  }

  bool pass = true;
  if (require == "admissible") pass = adm.admissible;
  else if (require == "submultiplicative") pass = sub.holds;
  else if (require == "almost-monotone") pass = mono.verdict != MonotoneVerdict::Violated;
  else if (require == "beurling-domar") pass = bd_ok;
  else if (!require.empty()) throw std::domain_error("unknown --require check: " + require);
  if (!require.empty()) kv("require_" + require, pass ? "pass" : "fail");
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_spectral_min(const CommonFlags& flags, std::size_t samples, std::size_t grid) {
  LoadedSeries loaded = load_with_mode(flags);
  Weight w = weight_for(flags, loaded);
  SpectralBudget budget;
  budget.random_characters = samples;
  budget.grid_resolution = grid;
  budget.seed = flags.seed;
  SpectralMinReport report = spectral_min_estimate(loaded.as_float(), w, budget);
  kv("command", "spectral-min");
  kv("input", flags.in_path);
  kv("weight", w.describe());
  kv("seed", flags.seed);
  kv("samples", static_cast<std::uint64_t>(report.samples_used));
  kv("grid_min", report.grid_min);
  kv("sample_min", report.sample_min);
  kv("min_abs", report.min_abs);
  kv("method", report.method);
  kv("argmin", report.argmin);
  kv("bound_kind", "upper");
  return kExitOk;
}

int cmd_growth(const CommonFlags& flags, const std::string& depths_text) {
  LoadedSeries loaded = load_with_mode(flags);
  Weight w = weight_for(flags, loaded);
  double p = p_for(flags, loaded);
  std::vector<std::uint64_t> depths = parse_depths(depths_text);
  GrowthReport report = loaded.header.exact
                            ? growth_scan(loaded.exact_table(), w, p, depths)
                            : growth_scan(loaded.float_table(), w, p, depths);
  kv("command", "growth");
  kv("input", flags.in_path);
  kv("weight", w.describe());
  kv("p", p);
  for (std::size_t i = 0; i < report.depths.size(); ++i)
    kv("partial_sum_" + std::to_string(report.depths[i]), report.partial_sums[i]);
  kv("slope_per_doubling", report.slope_per_doubling);
  kv("classification", report.divergent_evidence ? "divergent-evidence" : "bounded-evidence");
  kv("cauchy_converged", report.cauchy_converged ? "yes" : "no");
  for (const std::string& warning : report.warnings) kv("warning", warning);
  return kExitOk;
}

int cmd_funcalc(const CommonFlags& flags, const std::string& phi_text,
                const std::string& center_text, double radius, std::size_t nodes,
                const std::string& compare_path) {
  LoadedSeries loaded = load_with_mode(flags);
  SeriesD a = loaded.as_float();
  Phi phi = parse_phi(phi_text);
  ContourSpec contour;
  contour.center = parse_complex_flag(center_text);
  contour.radius = radius;
  contour.node_count = nodes;
  FuncalcOptions options;
  options.threads = flags.threads;
  BoxSpec box = BoxSpec::square(flags.box);
  FuncalcResult result = functional_calculus(a, phi, contour, box, nullptr, options);
  kv("command", "funcalc");
  kv("input", flags.in_path);
  kv("phi", phi.describe());
  kv("center", fmt_cpx(contour.center));
  kv("radius", radius);
  kv("nodes", static_cast<std::uint64_t>(result.nodes));
  kv("support", static_cast<std::uint64_t>(result.value.support_size()));
  kv("node_halving_error", result.node_halving_error);
  Weight w = weight_for(flags, loaded);
  double p = p_for(flags, loaded);
  kv("p", p);
  kv("weight", w.describe());
  kv("weighted_p_norm", weighted_p_norm(result.value, PNormParams(p, w)));
  if (!compare_path.empty()) {
    LoadedSeries other = read_series_file(compare_path);
    kv("compare", compare_path);
    kv("max_entry_diff", max_abs_diff(result.value, other.as_float()));
  }
  if (!flags.out_path.empty()) {
    LoadedSeries out;
    out.header.exact = false;
    out.table = std::move(result.value);
    write_series_file(flags.out_path, out);
    kv("output", flags.out_path);
  }
  return kExitOk;
}

int cmd_shrink_weight(const CommonFlags& flags, const std::string& r_grid_text,
                      const std::string& depths_text) {
  LoadedSeries loaded = load_with_mode(flags);
  Weight w = parse_weight(flags.weight_spec);
  std::vector<double> r_grid = parse_double_list(r_grid_text);
  std::vector<std::uint64_t> depths;
  if (!depths_text.empty()) depths = parse_depths(depths_text);
  BoxSpec box = BoxSpec::square(flags.box);
  ShrinkSearchReport report =
      loaded.header.exact ? shrink_weight_search(loaded.exact_table(), w, box, r_grid, depths)
                          : shrink_weight_search(loaded.float_table(), w, box, r_grid, depths);
  kv("command", "shrink-weight");
  kv("input", flags.in_path);
  kv("weight", w.describe());
  kv("prime_index", report.prime_index);
  kv("axis", axis_name(report.axis));
  kv("rho", report.rho);
  for (const ShrinkCandidate& candidate : report.candidates) {
    char label[40];
    std::snprintf(label, sizeof label, "candidate_%.6g", candidate.r);
    kv(label, candidate.bounded ? "bounded-evidence" : "divergent-evidence");
  }
  kv("best_r", report.best_r ? fmt(*report.best_r) : "none");
  if (report.shrunk_weight) kv("shrunk_weight", report.shrunk_weight->describe());
  for (const std::string& warning : report.warnings) kv("warning", warning);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted two-variable Dirichlet series toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string s1_text, s2_text, character_spec;
  std::string require_check, phi_text = "reciprocal", center_text = "0", depths_text = "pow2:40";
  std::string r_grid_text, compare_path;
  std::uint64_t primes = 8, depth = 48, bd_depth = 10000;
  double check_tol = 1e-6, radius = 1.0;
  std::size_t samples = 2048, grid = 256, nodes = 256;
  bool verify = false;

  auto add_common = [&](CLI::App* cmd, bool needs_in) {
    if (needs_in) cmd->add_option("--in", flags.in_path, "input series file")->required();
    cmd->add_option("--out", flags.out_path, "output series file");
    cmd->add_option("--box", flags.box, "square box bound M");
    cmd->add_option("--weight", flags.weight_spec, "weight spec");
    cmd->add_option("--p", flags.p, "p-norm exponent in (0,1]")->each([&](const std::string&) {
      flags.p_set = true;
    });
    cmd->add_option("--mode", flags.mode, "cast input to exact|float");
    cmd->add_option("--seed", flags.seed, "random seed (default 0)");
    cmd->add_option("--tol", flags.tol, "tolerance");
    cmd->add_option("--threads", flags.threads, "worker threads (default 1)");
  };

  CLI::App* invert = app.add_subcommand("invert", "formal inverse on a box");
  add_common(invert, true);
  invert->add_flag("--verify", verify, "check a * inverse = delta on the box");

  CLI::App* eval = app.add_subcommand("eval", "evaluate on the closed right half-plane squared");
  add_common(eval, true);
  eval->add_option("--s1", s1_text, "first coordinate, e.g. 0.5+3i");
  eval->add_option("--s2", s2_text, "second coordinate");
  eval->add_option("--character", character_spec, "evaluate a character transform instead");

  CLI::App* norm = app.add_subcommand("norm", "weighted p-norm");
  add_common(norm, true);

  CLI::App* check = app.add_subcommand("check-weight", "weight diagnostics");
  add_common(check, false);
  check->add_option("--primes", primes, "number of primes to profile");
  check->add_option("--depth", depth, "growth profile depth");
  check->add_option("--check-tol", check_tol, "admissibility tolerance");
  check->add_option("--bd-depth", bd_depth, "Beurling-Domar partial sum depth");
  check->add_option("--require", require_check,
                    "admissible|submultiplicative|almost-monotone|beurling-domar");

  CLI::App* spectral = app.add_subcommand("spectral-min", "minimum modulus over characters");
  add_common(spectral, true);
  spectral->add_option("--samples", samples, "Monte-Carlo character count");
  spectral->add_option("--grid", grid, "boundary grid resolution per axis");

  CLI::App* growth = app.add_subcommand("growth", "weighted norm growth of the inverse");
  add_common(growth, true);
  growth->add_option("--depths", depths_text, "comma list, entries like 1024 or 2^10, or pow2:40");

  CLI::App* funcalc = app.add_subcommand("funcalc", "contour functional calculus");
  add_common(funcalc, true);
  funcalc->add_option("--phi", phi_text, "reciprocal|exp|log|poly:c0,c1,...");
  funcalc->add_option("--center", center_text, "contour center");
  funcalc->add_option("--radius", radius, "contour radius")->required();
  funcalc->add_option("--nodes", nodes, "contour nodes");
  funcalc->add_option("--compare", compare_path, "series file to diff against");

  CLI::App* shrink = app.add_subcommand("shrink-weight", "single-prime weight shrinking search");
  add_common(shrink, true);
  shrink->add_option("--r-grid", r_grid_text, "candidate r values")->required();
  shrink->add_option("--depths", depths_text, "growth scan depths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (app.got_subcommand(invert)) return cmd_invert(flags, verify);
    if (app.got_subcommand(eval)) return cmd_eval(flags, s1_text, s2_text, character_spec);
    if (app.got_subcommand(norm)) return cmd_norm(flags);
    if (app.got_subcommand(check))
      return cmd_check_weight(flags, primes, depth, check_tol, bd_depth, require_check);
    if (app.got_subcommand(spectral)) return cmd_spectral_min(flags, samples, grid);
    if (app.got_subcommand(growth)) return cmd_growth(flags, depths_text);
    if (app.got_subcommand(funcalc))
      return cmd_funcalc(flags, phi_text, center_text, radius, nodes, compare_path);
    if (app.got_subcommand(shrink)) return cmd_shrink_weight(flags, r_grid_text, depths_text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
