#include "dirichlet2d/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dirichlet2d {

namespace {

std::uint64_t exponent_of(const Factorization& f, std::uint64_t prime_index) {
  for (const auto& pf : f)
    if (pf.prime_index == prime_index) return pf.exponent;
  return 0;
}

double log_of_factored(const Factorization& f) {
  double s = 0.0;
  for (const auto& pf : f)
    s += static_cast<double>(pf.exponent) * std::log(static_cast<double>(nth_prime(pf.prime_index)));
  return s;
}

// Reconstructs the integer when it fits; nullopt means "off any finite table".
std::optional<std::uint64_t> try_unfactorize(const Factorization& f) {
  std::uint64_t value = 1;
  for (const auto& pf : f) {
    std::uint64_t p = nth_prime(pf.prime_index);
    for (std::uint64_t e = 0; e < pf.exponent; ++e) {
      if (__builtin_mul_overflow(value, p, &value)) return std::nullopt;
    }
  }
  return value;
}

double mfp_log(const Weight::MultiplicativeFromPrimes& spec, const Factorization& fm,
               const Factorization& fn) {
  double s = 0.0;
  for (const auto& pf : fm) {
    auto it = spec.first_axis.find(pf.prime_index);
    if (it != spec.first_axis.end()) s += static_cast<double>(pf.exponent) * std::log(it->second);
  }
  for (const auto& pf : fn) {
    auto it = spec.second_axis.find(pf.prime_index);
    if (it != spec.second_axis.end()) s += static_cast<double>(pf.exponent) * std::log(it->second);
  }
  return s;
}

double powi(double base, std::uint64_t e) {
  double r = 1.0;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

}  // namespace

Weight::Weight(Spec s) : spec_(std::make_shared<const Spec>(std::move(s))) {}

Weight Weight::constant(double c) {
  if (!(c >= 1.0)) throw std::domain_error("constant weight must be >= 1");
  return Weight(Constant{c});
}

Weight Weight::two_adic() { return Weight(TwoAdic{}); }

Weight Weight::axis_power(double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw std::domain_error("axis-power weight needs alpha, beta >= 0");
  return Weight(AxisPower{alpha, beta});
}

Weight Weight::log_product() { return Weight(LogProduct{}); }

Weight Weight::multiplicative(std::map<std::uint64_t, double> first_axis,
                              std::map<std::uint64_t, double> second_axis) {
  for (const auto* axis : {&first_axis, &second_axis})
    for (const auto& [i, v] : *axis) {
      if (i == 0) throw std::domain_error("prime indices are 1-based");
      if (!(v >= 1.0)) throw std::domain_error("multiplicative prime values must be >= 1");
    }
  std::erase_if(first_axis, [](const auto& kv) { return kv.second == 1.0; });
  std::erase_if(second_axis, [](const auto& kv) { return kv.second == 1.0; });
  return Weight(MultiplicativeFromPrimes{std::move(first_axis), std::move(second_axis)});
}

Weight Weight::table(std::map<Index2, double> values) {
  for (const auto& [idx, v] : values) {
    if (idx.m == 0 || idx.n == 0) throw std::domain_error("table indices must be positive");
    if (!(v >= 1.0)) throw std::domain_error("table weight values must be >= 1");
  }
  std::erase_if(values, [](const auto& kv) { return kv.second == 1.0; });
  return Weight(Table{std::move(values)});
}

Weight Weight::pointwise_min(std::vector<Weight> parts) {
  if (parts.empty()) throw std::domain_error("min of an empty weight list");
  if (parts.size() == 1) return parts.front();
  return Weight(Min{std::move(parts)});
}

double Weight::log_value(const Factorization& fm, const Factorization& fn) const {
  return std::visit(
      [&](const auto& spec) -> double {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return std::log(spec.value);
        } else if constexpr (std::is_same_v<T, TwoAdic>) {
          double k = static_cast<double>(exponent_of(fm, 1) + exponent_of(fn, 1));
          return (k + 1.0) * std::log(2.0);
        } else if constexpr (std::is_same_v<T, AxisPower>) {
          return spec.alpha * log_of_factored(fm) + spec.beta * log_of_factored(fn);
        } else if constexpr (std::is_same_v<T, LogProduct>) {
          return std::log1p(log_of_factored(fm)) + std::log1p(log_of_factored(fn));
        } else if constexpr (std::is_same_v<T, MultiplicativeFromPrimes>) {
          return mfp_log(spec, fm, fn);
        } else if constexpr (std::is_same_v<T, Table>) {
          auto m = try_unfactorize(fm);
          auto n = try_unfactorize(fn);
          if (!m || !n) return 0.0;
          auto it = spec.values.find(Index2{*m, *n});
          return it == spec.values.end() ? 0.0 : std::log(it->second);
        } else {
          double best = std::numeric_limits<double>::infinity();
          for (const Weight& part : spec.parts) best = std::min(best, part.log_value(fm, fn));
          return best;
        }
      },
      *spec_);
}

double Weight::operator()(std::uint64_t m, std::uint64_t n) const {
  if (m == 0 || n == 0) throw std::domain_error("weights are defined on N^2, indices >= 1");
  // Direct paths keep the tabulated examples exact; the general case goes
  // through log space.
  if (const auto* c = std::get_if<Constant>(spec_.get())) return c->value;
  if (std::get_if<TwoAdic>(spec_.get())) {
    std::uint64_t k = 0;
    std::uint64_t x = m;
    while (x % 2 == 0) {
      x /= 2;
      ++k;
    }
    x = n;
    while (x % 2 == 0) {
      x /= 2;
      ++k;
    }
    return std::ldexp(1.0, static_cast<int>(k + 1));
  }
  if (const auto* t = std::get_if<Table>(spec_.get())) {
    auto it = t->values.find(Index2{m, n});
    return it == t->values.end() ? 1.0 : it->second;
  }
  if (const auto* mn = std::get_if<Min>(spec_.get())) {
    double best = std::numeric_limits<double>::infinity();
    for (const Weight& part : mn->parts) best = std::min(best, part(m, n));
    return best;
  }
  if (const auto* mfp = std::get_if<MultiplicativeFromPrimes>(spec_.get())) {
    double value = 1.0;
    for (const auto& pf : factorize(m)) {
      auto it = mfp->first_axis.find(pf.prime_index);
      if (it != mfp->first_axis.end()) value *= powi(it->second, pf.exponent);
    }
    for (const auto& pf : factorize(n)) {
      auto it = mfp->second_axis.find(pf.prime_index);
      if (it != mfp->second_axis.end()) value *= powi(it->second, pf.exponent);
    }
    return value;
  }
  if (const auto* ap = std::get_if<AxisPower>(spec_.get()))
    return std::pow(static_cast<double>(m), ap->alpha) * std::pow(static_cast<double>(n), ap->beta);
  return std::exp(log_value(factorize(m), factorize(n)));
}

double Weight::growth_root(std::uint64_t prime_index, Axis axis, std::uint64_t power) const {
  if (power == 0) throw std::domain_error("growth root needs power >= 1");
  return std::visit(
      [&](const auto& spec) -> double {
        using T = std::decay_t<decltype(spec)>;
        double k = static_cast<double>(power);
        if constexpr (std::is_same_v<T, Constant>) {
          return std::pow(spec.value, 1.0 / k);
        } else if constexpr (std::is_same_v<T, TwoAdic>) {
          if (prime_index == 1) return std::exp2((k + 1.0) / k);
          return std::exp2(1.0 / k);
        } else if constexpr (std::is_same_v<T, AxisPower>) {
          double p = static_cast<double>(nth_prime(prime_index));
          return std::pow(p, axis == Axis::First ? spec.alpha : spec.beta);
        } else if constexpr (std::is_same_v<T, LogProduct>) {
          double lp = std::log(static_cast<double>(nth_prime(prime_index)));
          return std::exp(std::log1p(k * lp) / k);
        } else if constexpr (std::is_same_v<T, MultiplicativeFromPrimes>) {
          const auto& attached = axis == Axis::First ? spec.first_axis : spec.second_axis;
          auto it = attached.find(prime_index);
          return it == attached.end() ? 1.0 : it->second;
        } else if constexpr (std::is_same_v<T, Table>) {
          Factorization f{{prime_index, power}};
          double lv = axis == Axis::First ? log_value(f, {}) : log_value({}, f);
          return std::exp(lv / k);
        } else {
          double best = std::numeric_limits<double>::infinity();
          for (const Weight& part : spec.parts)
            best = std::min(best, part.growth_root(prime_index, axis, power));
          return best;
        }
      },
      *spec_);
}

std::optional<Rat> Weight::exact_value(std::uint64_t m, std::uint64_t n) const {
  if (const auto* c = std::get_if<Constant>(spec_.get())) {
    if (c->value == std::floor(c->value) && c->value <= 9e15) {
      return Rat(static_cast<long>(c->value));
    }
    return std::nullopt;
  }
  if (std::get_if<TwoAdic>(spec_.get())) {
    std::uint64_t k = 0;
    for (std::uint64_t x : {m, n})
      while (x % 2 == 0) {
        x /= 2;
        ++k;
      }
    mpz_class z;
    mpz_ui_pow_ui(z.get_mpz_t(), 2, k + 1);
    return Rat(z);
  }
  if (const auto* ap = std::get_if<AxisPower>(spec_.get())) {
    if (ap->alpha != std::floor(ap->alpha) || ap->beta != std::floor(ap->beta)) return std::nullopt;
    if (ap->alpha > 64 || ap->beta > 64) return std::nullopt;
    mpz_class zm, zn;
    mpz_ui_pow_ui(zm.get_mpz_t(), m, static_cast<unsigned long>(ap->alpha));
    mpz_ui_pow_ui(zn.get_mpz_t(), n, static_cast<unsigned long>(ap->beta));
    return Rat(zm * zn);
  }
  if (const auto* mn = std::get_if<Min>(spec_.get())) {
    std::optional<Rat> best;
    for (const Weight& part : mn->parts) {
      auto v = part.exact_value(m, n);
      if (!v) return std::nullopt;
      if (!best || *v < *best) best = v;
    }
    return best;
  }
  return std::nullopt;
}

bool Weight::is_constant() const {
  if (std::get_if<Constant>(spec_.get())) return true;
  if (const auto* mn = std::get_if<Min>(spec_.get())) {
    for (const Weight& part : mn->parts)
      if (!part.is_constant()) return false;
    return true;
  }
  return false;
}

bool Weight::table_backed() const {
  if (std::get_if<Table>(spec_.get())) return true;
  if (const auto* mn = std::get_if<Min>(spec_.get()))
    for (const Weight& part : mn->parts)
      if (part.table_backed()) return true;
  return false;
}

std::string Weight::describe() const {
  return std::visit(
      [&](const auto& spec) -> std::string {
        using T = std::decay_t<decltype(spec)>;
        char buf[64];
        if constexpr (std::is_same_v<T, Constant>) {
          std::snprintf(buf, sizeof buf, "const:%.17g", spec.value);
          return buf;
        } else if constexpr (std::is_same_v<T, TwoAdic>) {
          return "twoadic";
        } else if constexpr (std::is_same_v<T, AxisPower>) {
          std::snprintf(buf, sizeof buf, "axispow:%.17g,%.17g", spec.alpha, spec.beta);
          return buf;
        } else if constexpr (std::is_same_v<T, LogProduct>) {
          return "logprod";
        } else if constexpr (std::is_same_v<T, MultiplicativeFromPrimes>) {
          std::string out = "mfp{";
          bool first = true;
          for (const auto& [i, v] : spec.first_axis) {
            std::snprintf(buf, sizeof buf, "%s1 %llu %.17g", first ? "" : "; ",
                          static_cast<unsigned long long>(i), v);
            out += buf;
            first = false;
          }
          for (const auto& [i, v] : spec.second_axis) {
            std::snprintf(buf, sizeof buf, "%s2 %llu %.17g", first ? "" : "; ",
                          static_cast<unsigned long long>(i), v);
            out += buf;
            first = false;
          }
          return out + "}";
        } else if constexpr (std::is_same_v<T, Table>) {
          return "table{" + std::to_string(spec.values.size()) + " points}";
        } else {
          std::string out = "min(";
          for (std::size_t i = 0; i < spec.parts.size(); ++i) {
            if (i) out += ",";
            out += spec.parts[i].describe();
          }
          return out + ")";
        }
      },
      *spec_);
}

namespace {

struct WeightParser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool consume(const std::string& token) {
    skip_space();
    if (text.compare(pos, token.size(), token) == 0) {
      pos += token.size();
      return true;
    }
    return false;
  }

  double parse_number() {
    skip_space();
    std::size_t start = pos;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                 text[pos] == '.' || text[pos] == '-' || text[pos] == '+' ||
                                 text[pos] == 'e' || text[pos] == 'E'))
      ++pos;
    if (pos == start) throw WeightParseError("expected a number", start);
    try {
      return std::stod(text.substr(start, pos - start));
    } catch (const std::exception&) {
      throw WeightParseError("malformed number '" + text.substr(start, pos - start) + "'", start);
    }
  }

  std::string parse_until(const std::string& stops) {
    skip_space();
    std::size_t start = pos;
    while (pos < text.size() && stops.find(text[pos]) == std::string::npos) ++pos;
    std::string out = text.substr(start, pos - start);
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    return out;
  }

  Weight parse_spec() {
    skip_space();
    if (consume("const:")) return Weight::constant(parse_number());
    if (consume("twoadic")) return Weight::two_adic();
    if (consume("axispow:")) {
      double alpha = parse_number();
      if (!consume(",")) throw WeightParseError("expected ',' in axispow spec", pos);
      double beta = parse_number();
      return Weight::axis_power(alpha, beta);
    }
    if (consume("logprod")) return Weight::log_product();
    if (consume("mfp:")) {
      std::string path = parse_until(",)");
      if (path.empty()) throw WeightParseError("mfp spec needs a file path", pos);
      return load_mfp_file(path);
    }
    if (consume("min(")) {
      std::vector<Weight> parts;
      parts.push_back(parse_spec());
      while (consume(",")) parts.push_back(parse_spec());
      if (!consume(")")) throw WeightParseError("expected ')' closing min(...)", pos);
      return min_weight(parts);
    }
    throw WeightParseError("unknown weight spec", pos);
  }

  static Weight load_mfp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("cannot open weight file: " + path);
    std::map<std::uint64_t, double> first, second;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string trimmed = line;
      if (auto h = trimmed.find('#'); h != std::string::npos) trimmed.resize(h);
      std::istringstream ls(trimmed);
      int axis;
      std::uint64_t index;
      double value;
      if (!(ls >> axis)) continue;  // blank or comment line
      if (!(ls >> index >> value) || (axis != 1 && axis != 2))
        throw std::domain_error(path + ":" + std::to_string(lineno) +
                                ": expected 'axis index value' with axis 1 or 2");
      (axis == 1 ? first : second)[index] = value;
    }
    return Weight::multiplicative(std::move(first), std::move(second));
  }
};

}  // namespace

Weight parse_weight(const std::string& text) {
  WeightParser parser{text};
  Weight w = parser.parse_spec();
  parser.skip_space();
  if (parser.pos != text.size())
    throw WeightParseError("trailing characters after weight spec", parser.pos);
  return w;
}

GrowthProfile growth_profile(const Weight& w, std::uint64_t prime_index, Axis axis,
                             std::uint64_t depth) {
  if (depth == 0) throw std::domain_error("growth profile needs depth >= 1");
  GrowthProfile profile;
  profile.axis = axis;
  profile.prime_index = prime_index;
  profile.estimates.reserve(depth);
  double inf = std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 1; n <= depth; ++n) {
    double est = w.growth_root(prime_index, axis, n);
    profile.estimates.push_back(est);
    inf = std::min(inf, est);
  }
  profile.inf_estimate = inf;
  return profile;
}

AdmissibilityReport is_admissible(const Weight& w, std::uint64_t prime_count, std::uint64_t depth,
                                  double tol) {
  if (prime_count == 0 || depth == 0) throw std::domain_error("admissibility needs I, N >= 1");
  if (!(tol > 0)) throw std::domain_error("admissibility tolerance must be positive");
  AdmissibilityReport report;
  report.prime_count = prime_count;
  report.depth = depth;
  report.tol = tol;
  report.worst_inf = 1.0;
  for (std::uint64_t i = 1; i <= prime_count; ++i) {
    for (Axis axis : {Axis::First, Axis::Second}) {
      GrowthProfile profile = growth_profile(w, i, axis, depth);
      if (profile.inf_estimate > report.worst_inf) {
        report.worst_inf = profile.inf_estimate;
        report.worst_prime_index = i;
        report.worst_axis = axis;
      }
      if (!report.witness_prime_index && profile.inf_estimate > 1.0 + tol) {
        report.witness_prime_index = i;
        report.witness_axis = axis;
        report.witness_inf = profile.inf_estimate;
      }
      report.profiles.push_back(std::move(profile));
    }
  }
  report.admissible = report.worst_inf <= 1.0 + tol;
  return report;
}

AlmostMonotoneReport is_almost_monotone(const Weight& w, const BoxSpec& box,
                                        const AlmostMonotoneOptions& opts) {
  AlmostMonotoneReport report;
  report.table_partial = w.table_backed();
  AdmissibilityReport adm = is_admissible(w, opts.prime_count, opts.depth, opts.tol);
  if (adm.admissible) {
    report.verdict = MonotoneVerdict::Admissible;
    report.constant = 1.0;
    return report;
  }
  std::vector<Index2> members = box.enumerate(10000);
  std::vector<double> values(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) values[i] = w(members[i].m, members[i].n);
  double best_k = 1.0;
  std::pair<Index2, Index2> best_pair{members.front(), members.front()};
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = 0; j < members.size(); ++j) {
      const Index2 a = members[i];
      const Index2 b = members[j];
      if (b.m % a.m != 0 && b.n % a.n != 0) continue;
      double ratio = values[i] / values[j];
      if (ratio > best_k) {
        best_k = ratio;
        best_pair = {a, b};
      }
    }
  }
  report.constant = best_k;
  if (opts.require_constant && best_k > *opts.require_constant * (1.0 + 1e-12)) {
    report.verdict = MonotoneVerdict::Violated;
    report.witness = best_pair;
    report.witness_ratio = best_k;
  } else {
    report.verdict = MonotoneVerdict::MonotoneWithConstant;
  }
  return report;
}

BeurlingDomarReport beurling_domar_partial(const Weight& w, std::uint64_t l, std::uint64_t k,
                                           std::uint64_t depth) {
  if (depth == 0) throw std::domain_error("partial sums need depth >= 1");
  BeurlingDomarReport report;
  report.l = l;
  report.k = k;
  report.depth = depth;
  Factorization fl = factorize(l);
  Factorization fk = factorize(k);
  auto scaled = [](const Factorization& f, std::uint64_t n) {
    Factorization out = f;
    for (auto& pf : out) pf.exponent *= n;
    return out;
  };
  double sum = 0.0;
  double at_quarter = 0.0, at_half = 0.0;
  std::uint64_t quarter = std::max<std::uint64_t>(1, depth / 4);
  std::uint64_t half = std::max<std::uint64_t>(1, depth / 2);
  for (std::uint64_t n = 1; n <= depth; ++n) {
    double term = w.log_value(scaled(fl, n), scaled(fk, n)) /
                  (1.0 + static_cast<double>(n) * static_cast<double>(n));
    sum += term;
    if (n == quarter) at_quarter = sum;
    if (n == half) at_half = sum;
  }
  report.partial_sum = sum;
  report.last_increment = sum - at_half;
  report.prev_increment = at_half - at_quarter;
  double base = w.log_value(fl, fk);
  report.tail_bound = base <= 1e-15 ? 0.0 : std::numeric_limits<double>::infinity();
  bool divergent = report.last_increment > 1e-9 &&
                   report.last_increment >= 0.75 * std::max(report.prev_increment, 1e-300);
  report.convergent_evidence = !divergent;
  return report;
}

Weight min_weight(const std::vector<Weight>& parts) {
  if (parts.empty()) throw std::domain_error("min of an empty weight list");
  // Fold constants; a constant 1 wins outright since every weight is >= 1.
  std::optional<double> const_min;
  bool all_constant = true;
  bool all_mfp = true;
  for (const Weight& part : parts) {
    if (const auto* c = std::get_if<Weight::Constant>(&part.spec())) {
      const_min = const_min ? std::min(*const_min, c->value) : c->value;
      all_mfp = false;
    } else {
      all_constant = false;
      if (!std::get_if<Weight::MultiplicativeFromPrimes>(&part.spec())) all_mfp = false;
    }
  }
  if (const_min && *const_min == 1.0) return Weight::constant(1.0);
  if (all_constant) return Weight::constant(*const_min);
  if (all_mfp) {
    std::map<std::uint64_t, double> first, second;
    auto merge = [](std::map<std::uint64_t, double>& into,
                    const std::map<std::uint64_t, double>& from, bool first_part) {
      if (first_part) {
        into = from;
        return;
      }
      // min with an absent entry is min(v, 1) = 1
      std::erase_if(into, [&](const auto& kv) { return !from.count(kv.first); });
      for (auto& [i, v] : into) v = std::min(v, from.at(i));
    };
    bool first_part = true;
    for (const Weight& part : parts) {
      const auto& mfp = std::get<Weight::MultiplicativeFromPrimes>(part.spec());
      merge(first, mfp.first_axis, first_part);
      merge(second, mfp.second_axis, first_part);
      first_part = false;
    }
    return Weight::multiplicative(std::move(first), std::move(second));
  }
  std::vector<Weight> flat;
  for (const Weight& part : parts) {
    if (const auto* mn = std::get_if<Weight::Min>(&part.spec()))
      flat.insert(flat.end(), mn->parts.begin(), mn->parts.end());
    else
      flat.push_back(part);
  }
  return Weight::pointwise_min(std::move(flat));
}

SubmultReport check_submultiplicative(const Weight& w, const BoxSpec& box) {
  SubmultReport report;
  report.table_partial = w.table_backed();
  std::vector<Index2> members = box.enumerate(4096);
  std::vector<double> values(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) values[i] = w(members[i].m, members[i].n);
  report.worst_left = members.front();
  report.worst_right = members.front();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i; j < members.size(); ++j) {
      auto prod = try_mul(members[i], members[j]);
      if (!prod) continue;
      double excess = w(prod->m, prod->n) / (values[i] * values[j]) - 1.0;
      if (excess > worst) {
        worst = excess;
        report.worst_left = members[i];
        report.worst_right = members[j];
      }
    }
  }
  report.worst_excess = worst;
  report.holds = worst <= 1e-12;
  return report;
}

}  // namespace dirichlet2d
