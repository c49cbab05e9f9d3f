// Python bindings for the Dirichlet series toolkit. Exact-mode tables are
// exposed with string rationals so no precision is lost crossing the
// boundary; float-mode tables use native complex numbers.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dirichlet2d/calculus.hpp"
#include "dirichlet2d/gelfand.hpp"
#include "dirichlet2d/series.hpp"
#include "dirichlet2d/series_io.hpp"
#include "dirichlet2d/weights.hpp"

namespace py = pybind11;
using namespace dirichlet2d;

namespace {

std::pair<std::uint64_t, std::uint64_t> as_pair(Index2 idx) { return {idx.m, idx.n}; }

SeriesD series_from_dict(const std::map<std::pair<std::uint64_t, std::uint64_t>, Cpx>& entries) {
  SeriesD out;
  for (const auto& [key, value] : entries) out.set(key.first, key.second, value);
  return out;
}

SeriesQ exact_from_entries(
    const std::vector<std::tuple<std::uint64_t, std::uint64_t, std::string, std::string>>& rows) {
  SeriesQ out;
  for (const auto& [m, n, re, im] : rows)
    out.set(m, n, RatC(rat_from_string(re), im.empty() ? Rat(0) : rat_from_string(im)));
  return out;
}

py::dict entries_dict(const SeriesD& a) {
  py::dict out;
  for (const auto& [idx, v] : a.entries()) out[py::make_tuple(idx.m, idx.n)] = v;
  return out;
}

py::list exact_entries(const SeriesQ& a) {
  py::list out;
  for (const auto& [idx, v] : a.entries())
    out.append(py::make_tuple(idx.m, idx.n, rat_to_string(v.re), rat_to_string(v.im)));
  return out;
}

GrowthThresholds thresholds_from(double divergent_slope, double cauchy_rel) {
  GrowthThresholds t;
  t.divergent_slope = divergent_slope;
  t.cauchy_rel = cauchy_rel;
  return t;
}

py::dict growth_report_dict(const GrowthReport& report) {
  py::dict out;
  out["depths"] = report.depths;
  out["partial_sums"] = report.partial_sums;
  out["slope_per_doubling"] = report.slope_per_doubling;
  out["classification"] =
      report.divergent_evidence ? "divergent-evidence" : "bounded-evidence";
  out["cauchy_converged"] = report.cauchy_converged;
  out["warnings"] = report.warnings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weighted convolution algebras of two-variable Dirichlet series";
  m.attr("__version__") = "0.1.0";

  // ---- lattice ----
  py::class_<BoxSpec>(m, "Box")
      .def_static("square", &BoxSpec::square, py::arg("bound"))
      .def_static("explicit_set",
                  [](const std::vector<std::pair<std::uint64_t, std::uint64_t>>& members) {
                    std::vector<Index2> converted;
                    converted.reserve(members.size());
                    for (const auto& [mm, nn] : members) converted.push_back({mm, nn});
                    return BoxSpec::explicit_set(std::move(converted));
                  },
                  py::arg("members"))
      .def("contains",
           [](const BoxSpec& box, std::uint64_t mm, std::uint64_t nn) {
             return box.contains(mm, nn);
           })
      .def("members",
           [](const BoxSpec& box) {
             std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
             for (Index2 idx : box.enumerate()) out.push_back(as_pair(idx));
             return out;
           })
      .def("closure_added",
           [](const BoxSpec& box) {
             std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
             for (Index2 idx : box.closure_added()) out.push_back(as_pair(idx));
             return out;
           })
      .def("__repr__", &BoxSpec::describe);

  m.def("factorize", [](std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (const PrimeFactor& pf : factorize(n)) out.emplace_back(pf.prime_index, pf.exponent);
    return out;
  });
  m.def("nth_prime", &nth_prime);
  m.def("divisors2", [](std::uint64_t mm, std::uint64_t nn) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (Index2 idx : divisors2(mm, nn)) out.push_back(as_pair(idx));
    return out;
  });

  // ---- weights ----
  py::class_<Weight>(m, "Weight")
      .def_static("parse", &parse_weight, py::arg("spec"))
      .def_static("constant", &Weight::constant)
      .def_static("two_adic", &Weight::two_adic)
      .def_static("axis_power", &Weight::axis_power)
      .def_static("log_product", &Weight::log_product)
      .def_static("multiplicative", &Weight::multiplicative, py::arg("first_axis"),
                  py::arg("second_axis"))
      .def_static("min_of", [](const std::vector<Weight>& parts) { return min_weight(parts); })
      .def("__call__",
           [](const Weight& w, std::uint64_t mm, std::uint64_t nn) { return w(mm, nn); })
      .def("__repr__", &Weight::describe);

  py::enum_<Axis>(m, "Axis").value("FIRST", Axis::First).value("SECOND", Axis::Second);

  m.def(
      "growth_profile",
      [](const Weight& w, std::uint64_t prime_index, Axis axis, std::uint64_t depth) {
        GrowthProfile profile = growth_profile(w, prime_index, axis, depth);
        py::dict out;
        out["estimates"] = profile.estimates;
        out["inf_estimate"] = profile.inf_estimate;
        return out;
      },
      py::arg("weight"), py::arg("prime_index"), py::arg("axis") = Axis::First,
      py::arg("depth") = 48);

  m.def(
      "is_admissible",
      [](const Weight& w, std::uint64_t prime_count, std::uint64_t depth, double tol) {
        AdmissibilityReport report = is_admissible(w, prime_count, depth, tol);
        py::dict out;
        out["admissible"] = report.admissible;
        out["worst_inf"] = report.worst_inf;
        out["worst_prime_index"] = report.worst_prime_index;
        out["worst_axis"] = report.worst_axis == Axis::First ? "first" : "second";
        return out;
      },
      py::arg("weight"), py::arg("prime_count") = 8, py::arg("depth") = 48,
      py::arg("tol") = 1e-6);

  m.def(
      "is_almost_monotone",
      [](const Weight& w, const BoxSpec& box) {
        AlmostMonotoneReport report = is_almost_monotone(w, box);
        py::dict out;
        out["verdict"] = report.verdict == MonotoneVerdict::Admissible
                             ? "admissible"
                             : (report.verdict == MonotoneVerdict::MonotoneWithConstant
                                    ? "monotone-with-constant"
                                    : "violated");
        out["constant"] = report.constant;
        return out;
      },
      py::arg("weight"), py::arg("box"));

  m.def(
      "beurling_domar_partial",
      [](const Weight& w, std::uint64_t l, std::uint64_t k, std::uint64_t depth) {
        BeurlingDomarReport report = beurling_domar_partial(w, l, k, depth);
        py::dict out;
        out["partial_sum"] = report.partial_sum;
        out["convergent_evidence"] = report.convergent_evidence;
        out["tail_bound"] = report.tail_bound;
        return out;
      },
      py::arg("weight"), py::arg("l"), py::arg("k"), py::arg("depth") = 10000);

  // ---- series ----
  py::class_<SeriesD>(m, "Series")
      .def(py::init(&series_from_dict), py::arg("entries"))
      .def_static("basis", &SeriesD::basis, py::arg("m"), py::arg("n"))
      .def_static("identity", &SeriesD::identity)
      .def("entries", &entries_dict)
      .def("support_size", &SeriesD::support_size)
      .def("at", [](const SeriesD& a, std::uint64_t mm, std::uint64_t nn) { return a.at(mm, nn); })
      .def("__mul__", [](const SeriesD& a, const SeriesD& b) { return convolve(a, b); })
      .def("__add__", [](const SeriesD& a, const SeriesD& b) { return a + b; })
      .def("__sub__", [](const SeriesD& a, const SeriesD& b) { return a - b; })
      .def("scaled", [](const SeriesD& a, Cpx c) { return a.scaled(c); })
      .def("truncated", [](const SeriesD& a, const BoxSpec& box) { return truncated(a, box); })
      .def("__repr__", [](const SeriesD& a) {
        return "<Series float support=" + std::to_string(a.support_size()) + ">";
      });

  py::class_<SeriesQ>(m, "SeriesExact")
      .def(py::init(&exact_from_entries), py::arg("entries"))
      .def_static("basis", &SeriesQ::basis, py::arg("m"), py::arg("n"))
      .def_static("identity", &SeriesQ::identity)
      .def("entries", &exact_entries)
      .def("support_size", &SeriesQ::support_size)
      .def("at",
           [](const SeriesQ& a, std::uint64_t mm, std::uint64_t nn) {
             RatC v = a.at(mm, nn);
             return py::make_tuple(rat_to_string(v.re), rat_to_string(v.im));
           })
      .def("to_float", [](const SeriesQ& a) { return to_float(a); })
      .def("__mul__", [](const SeriesQ& a, const SeriesQ& b) { return convolve(a, b); })
      .def("__add__", [](const SeriesQ& a, const SeriesQ& b) { return a + b; })
      .def("__sub__", [](const SeriesQ& a, const SeriesQ& b) { return a - b; })
      .def("__eq__", [](const SeriesQ& a, const SeriesQ& b) { return a == b; })
      .def("truncated", [](const SeriesQ& a, const BoxSpec& box) { return truncated(a, box); })
      .def("__repr__", [](const SeriesQ& a) {
        return "<Series exact support=" + std::to_string(a.support_size()) + ">";
      });

  m.def("convolve", [](const SeriesD& a, const SeriesD& b) { return convolve(a, b); });
  m.def("convolve_exact", [](const SeriesQ& a, const SeriesQ& b) { return convolve(a, b); });
  m.def(
      "invert_formal",
      [](const SeriesD& a, const BoxSpec& box) { return invert_formal(a, box); },
      py::arg("series"), py::arg("box"));
  m.def(
      "invert_formal_exact",
      [](const SeriesQ& a, const BoxSpec& box) { return invert_formal(a, box); },
      py::arg("series"), py::arg("box"));
  m.def(
      "evaluate",
      [](const SeriesD& a, Cpx s1, Cpx s2) { return evaluate(a, EvalPoint{s1, s2}); },
      py::arg("series"), py::arg("s1"), py::arg("s2"));
  m.def(
      "weighted_p_norm",
      [](const SeriesD& a, double p, const Weight& w) {
        return weighted_p_norm(a, PNormParams(p, w));
      },
      py::arg("series"), py::arg("p") = 1.0, py::arg("weight") = Weight::constant(1.0));
  m.def(
      "weighted_p_norm_exact",
      [](const SeriesQ& a, double p, const Weight& w) {
        return weighted_p_norm(a, PNormParams(p, w));
      },
      py::arg("series"), py::arg("p") = 1.0, py::arg("weight") = Weight::constant(1.0));
  m.def(
      "weighted_l1_norm_exact",
      [](const SeriesQ& a, const Weight& w) { return rat_to_string(weighted_l1_norm_exact(a, w)); },
      py::arg("series"), py::arg("weight"));
  m.def(
      "neumann_inverse",
      [](const SeriesD& a, const BoxSpec& box, double tol, std::size_t max_terms) {
        NeumannResult<Cpx> result = neumann_inverse(a, box, tol, max_terms);
        py::dict out;
        out["inverse"] = result.inverse;
        out["terms_used"] = result.terms_used;
        out["final_increment"] = result.final_increment;
        return out;
      },
      py::arg("series"), py::arg("box"), py::arg("tol") = 1e-12, py::arg("max_terms") = 4096);

  m.def("read_series_file", [](const std::string& path) {
    LoadedSeries loaded = read_series_file(path);
    return py::make_tuple(loaded.header.exact, loaded.as_float());
  });
  m.def("write_series_file",
        [](const std::string& path, const SeriesD& a) {
          LoadedSeries loaded;
          loaded.header.exact = false;
          loaded.table = a;
          write_series_file(path, loaded);
        });

  // ---- gelfand ----
  py::class_<Semicharacter>(m, "Semicharacter")
      .def_static("point", &Semicharacter::point, py::arg("s1"), py::arg("s2"))
      .def_static("trivial", &Semicharacter::trivial)
      .def_static("flat", &Semicharacter::flat, py::arg("z1"), py::arg("z2"))
      .def_static("parse", &parse_character)
      .def("set_prime_value", &Semicharacter::set_prime_value, py::arg("axis"),
           py::arg("prime_index"), py::arg("value"))
      .def("prime_value", &Semicharacter::prime_value, py::arg("axis"), py::arg("prime_index"))
      .def("__call__",
           [](const Semicharacter& chi, std::uint64_t mm, std::uint64_t nn) {
             return chi(mm, nn);
           })
      .def("__repr__", &Semicharacter::describe);

  m.def("gelfand_transform",
        [](const SeriesD& a, const Semicharacter& chi) { return gelfand_transform(a, chi); });
  m.def(
      "check_omega_bounded",
      [](const Semicharacter& chi, const Weight& w, std::uint64_t prime_count,
         std::uint64_t max_exponent, std::size_t random_tuples, std::uint64_t seed) {
        BoundTrialPlan plan;
        plan.prime_count = prime_count;
        plan.max_exponent = max_exponent;
        plan.random_tuples = random_tuples;
        plan.seed = seed;
        OmegaBoundReport report = check_omega_bounded(chi, w, plan);
        py::dict out;
        out["bounded"] = report.bounded;
        out["worst_ratio"] = report.worst_ratio;
        out["worst_point"] = report.worst_point;
        out["trials"] = report.trials;
        return out;
      },
      py::arg("character"), py::arg("weight"), py::arg("prime_count") = 6,
      py::arg("max_exponent") = 8, py::arg("random_tuples") = 128, py::arg("seed") = 0);
  m.def(
      "spectral_min_estimate",
      [](const SeriesD& a, const Weight& w, std::size_t samples, std::size_t grid,
         std::uint64_t seed) {
        SpectralBudget budget;
        budget.random_characters = samples;
        budget.grid_resolution = grid;
        budget.seed = seed;
        SpectralMinReport report = spectral_min_estimate(a, w, budget);
        py::dict out;
        out["min_abs"] = report.min_abs;
        out["grid_min"] = report.grid_min;
        out["sample_min"] = report.sample_min;
        out["argmin"] = report.argmin;
        out["method"] = report.method;
        out["samples_used"] = report.samples_used;
        out["seed"] = report.seed;
        out["upper_bound_only"] = report.upper_bound_only;
        return out;
      },
      py::arg("series"), py::arg("weight") = Weight::constant(1.0), py::arg("samples") = 2048,
      py::arg("grid") = 256, py::arg("seed") = 0);

  // ---- calculus ----
  m.def(
      "resolvent",
      [](const SeriesD& a, Cpx lambda, const BoxSpec& box) {
        ResolventSample<Cpx> sample = resolvent(a, lambda, box);
        py::dict out;
        out["inverse"] = sample.inverse;
        out["residual"] = sample.residual;
        return out;
      },
      py::arg("series"), py::arg("lam"), py::arg("box"));
  m.def(
      "functional_calculus",
      [](const SeriesD& a, const std::string& phi, Cpx center, double radius, std::size_t nodes,
         const BoxSpec& box, std::size_t threads) {
        ContourSpec contour;
        contour.center = center;
        contour.radius = radius;
        contour.node_count = nodes;
        FuncalcOptions options;
        options.threads = threads;
        FuncalcResult result = functional_calculus(a, parse_phi(phi), contour, box, nullptr,
                                                   options);
        py::dict out;
        out["value"] = result.value;
        out["node_halving_error"] = result.node_halving_error;
        out["nodes"] = result.nodes;
        return out;
      },
      py::arg("series"), py::arg("phi"), py::arg("center"), py::arg("radius"),
      py::arg("nodes") = 256, py::arg("box") = BoxSpec::square(64), py::arg("threads") = 1);
  m.def(
      "growth_scan",
      [](const SeriesD& a, const Weight& w, double p, const std::vector<std::uint64_t>& depths,
         double divergent_slope, double cauchy_rel) {
        return growth_report_dict(
            growth_scan(a, w, p, depths, thresholds_from(divergent_slope, cauchy_rel)));
      },
      py::arg("series"), py::arg("weight"), py::arg("p") = 1.0, py::arg("depths"),
      py::arg("divergent_slope") = 0.1, py::arg("cauchy_rel") = 1e-9);
  m.def(
      "growth_scan_exact",
      [](const SeriesQ& a, const Weight& w, double p, const std::vector<std::uint64_t>& depths,
         double divergent_slope, double cauchy_rel) {
        return growth_report_dict(
            growth_scan(a, w, p, depths, thresholds_from(divergent_slope, cauchy_rel)));
      },
      py::arg("series"), py::arg("weight"), py::arg("p") = 1.0, py::arg("depths"),
      py::arg("divergent_slope") = 0.1, py::arg("cauchy_rel") = 1e-9);
  m.def(
      "shrink_weight_search",
      [](const SeriesD& a, const Weight& w, const BoxSpec& box, const std::vector<double>& r_grid,
         const std::vector<std::uint64_t>& depths) {
        ShrinkSearchReport report = shrink_weight_search(a, w, box, r_grid, depths);
        py::dict out;
        py::list candidates;
        for (const ShrinkCandidate& candidate : report.candidates) {
          py::dict c;
          c["r"] = candidate.r;
          c["bounded"] = candidate.bounded;
          c["report"] = growth_report_dict(candidate.report);
          candidates.append(c);
        }
        out["candidates"] = candidates;
        out["best_r"] = report.best_r ? py::cast(*report.best_r) : py::none();
        out["shrunk_weight"] =
            report.shrunk_weight ? py::cast(*report.shrunk_weight) : py::none();
        out["prime_index"] = report.prime_index;
        out["axis"] = report.axis == Axis::First ? "first" : "second";
        out["rho"] = report.rho;
        out["warnings"] = report.warnings;
        return out;
      },
      py::arg("series"), py::arg("weight"), py::arg("box"), py::arg("r_grid"),
      py::arg("depths") = std::vector<std::uint64_t>{});
}
