#include "harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <regex>
#include <sstream>

#include "growthlab/constructions.hpp"
#include "growthlab/decompose.hpp"
#include "growthlab/errors.hpp"
#include "growthlab/expansion.hpp"
#include "growthlab/family.hpp"
#include "growthlab/groupaction.hpp"

namespace growthlab::cli {

namespace {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_top_level(std::string_view s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string inner_text(const Spec& s) {
  const auto open = s.raw.find('(');
  return trim(std::string_view(s.raw).substr(open + 1, s.raw.size() - open - 2));
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(std::string_view s) {
  double v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

/// "1,2,8" or "1-4,16".
std::optional<std::vector<std::uint64_t>> parse_list(std::string_view s) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split_top_level(s, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      auto v = parse_u64(part);
      if (!v) return std::nullopt;
      out.push_back(*v);
      continue;
    }
    auto lo = parse_u64(trim(part.substr(0, dash)));
    auto hi = parse_u64(trim(part.substr(dash + 1)));
    if (!lo || !hi || *lo > *hi || *hi - *lo > 1'000'000) return std::nullopt;
    for (std::uint64_t v = *lo; v <= *hi; ++v) out.push_back(v);
  }
  return out;
}

// Context for turning specs into objects.
struct Ctx {
  std::optional<std::uint64_t> size;
  std::filesystem::path base_dir;
  std::mt19937_64* rng = nullptr;
};

std::filesystem::path resolve(const Ctx& ctx, const std::string& path) {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : ctx.base_dir / p;
}

std::ifstream open_file(const Ctx& ctx, const std::string& path) {
  std::ifstream in(resolve(ctx, path));
  if (!in) throw ConfigError("cannot open file: " + resolve(ctx, path).string());
  return in;
}

std::uint64_t arg_u64(const Ctx& ctx, const std::string& a) {
  if (a == "n") {
    if (!ctx.size) throw ConfigError("placeholder n used without sizes");
    return *ctx.size;
  }
  auto v = parse_u64(a);
  if (!v) throw ConfigError("expected a nonnegative integer, got '" + a + "'");
  return *v;
}

long arg_long(const Ctx& ctx, const std::string& a) {
  if (!a.empty() && a[0] == '-') return -static_cast<long>(arg_u64(ctx, a.substr(1)));
  return static_cast<long>(arg_u64(ctx, a));
}

BigRat arg_rat(const Ctx& ctx, const std::string& a) {
  if (a == "n" || a == "-n") return BigRat(arg_long(ctx, a));
  try {
    return BigRat::parse(a);
  } catch (const std::exception&) {
    throw ConfigError("expected a rational, got '" + a + "'");
  }
}

void want_args(const Spec& s, std::size_t count) {
  if (s.args.size() != count) {
    throw ConfigError(s.name + "(...) takes " + std::to_string(count) + " arguments: '" + s.raw + "'");
  }
}

std::size_t poly_arity(const std::string& text) {
  static const std::regex yvar("y([0-9])");
  std::size_t arity = 1;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), yvar); it != std::sregex_iterator(); ++it) {
    arity = std::max<std::size_t>(arity, static_cast<std::size_t>(std::stoi((*it)[1].str())) + 2);
  }
  return arity;
}

MultiPoly build_poly(const std::string& text) { return parse_poly(text, poly_arity(text)); }

FiniteSet build_set(const std::string& text, const Ctx& ctx) {
  const Spec s = parse_spec(text);
  if (!s.call) throw ConfigError("unknown set generator '" + text + "'");
  if (s.name == "ap" || s.name == "gp") {
    want_args(s, 3);
    const BigRat a = arg_rat(ctx, s.args[0]);
    const BigRat b = arg_rat(ctx, s.args[1]);
    const std::uint64_t count = arg_u64(ctx, s.args[2]);
    return s.name == "ap" ? gen_ap(a, b, count) : gen_gp(a, b, count);
  }
  if (s.name == "range") {
    want_args(s, 2);
    const long lo = arg_long(ctx, s.args[0]);
    const long hi = arg_long(ctx, s.args[1]);
    if (hi < lo) throw ConfigError("empty range '" + text + "'");
    return FiniteSet::integer_range(lo, hi);
  }
  if (s.name == "random") {
    want_args(s, 3);
    const long lo = arg_long(ctx, s.args[0]);
    const long hi = arg_long(ctx, s.args[1]);
    const std::uint64_t count = arg_u64(ctx, s.args[2]);
    if (hi < lo) throw ConfigError("empty range '" + text + "'");
    std::uniform_int_distribution<long> dist(lo, hi);
    std::vector<BigRat> vals;
    for (std::uint64_t i = 0; i < count; ++i) vals.emplace_back(dist(*ctx.rng));
    return FiniteSet::of_rationals(vals);
  }
  if (s.name == "list") {
    std::vector<BigRat> vals;
    for (const auto& a : s.args) vals.push_back(arg_rat(ctx, a));
    return FiniteSet::of_rationals(vals);
  }
  if (s.name == "span") {
    want_args(s, 1);
    return gen_span(arg_u64(ctx, s.args[0])).set;
  }
  if (s.name == "tower") {
    want_args(s, 1);
    return gen_counterexample(arg_u64(ctx, s.args[0])).set;
  }
  if (s.name == "file") {
    want_args(s, 1);
    auto in = open_file(ctx, s.args[0]);
    return FiniteSet::parse(in);
  }
  throw ConfigError("unknown set generator '" + s.name + "'");
}

ClassKind class_kind(const std::string& name) {
  if (name == "additive") return ClassKind::additive;
  if (name == "multiplicative") return ClassKind::multiplicative;
  throw ConfigError("family kind must be additive or multiplicative, got '" + name + "'");
}

PolyFamily build_family(const std::string& text, const Ctx& ctx) {
  const Spec s = parse_spec(text);
  if (!s.call) {
    std::vector<UniPoly> members;
    for (const auto& p : split_top_level(text, ';')) members.push_back(parse_uni(p));
    return PolyFamily(std::move(members));
  }
  if (s.name == "family") {
    want_args(s, 4);
    return gen_structured_family(class_kind(s.args[0]), parse_uni(s.args[1]), parse_uni(s.args[2]),
                                 build_set(s.args[3], ctx));
  }
  if (s.name == "tower") {
    want_args(s, 1);
    return counterexample_polys(arg_u64(ctx, s.args[0]));
  }
  if (s.name == "list") {
    std::vector<UniPoly> members;
    for (const auto& p : s.args) members.push_back(parse_uni(p));
    return PolyFamily(std::move(members));
  }
  if (s.name == "file") {
    want_args(s, 1);
    auto in = open_file(ctx, s.args[0]);
    return PolyFamily::parse(in);
  }
  throw ConfigError("unknown family generator '" + s.name + "'");
}

std::shared_ptr<const GroupAction> build_action(const std::string& text, const Ctx& ctx) {
  const Spec s = parse_spec(text);
  if (!s.call) throw ConfigError("unknown action '" + text + "'");
  want_args(s, 1);
  if (s.name == "perm") {
    auto in = open_file(ctx, s.args[0]);
    return load_perm_action(in);
  }
  static const std::map<std::string, ActionKind> kinds{
      {"cyclic", ActionKind::cyclic}, {"agl1", ActionKind::agl1}, {"psl2", ActionKind::psl2}};
  const auto it = kinds.find(s.name);
  if (it == kinds.end()) throw ConfigError("unknown action '" + s.name + "'");
  return make_action(it->second, arg_u64(ctx, s.args[0]));
}

ActionSubset build_subset(const GroupAction& act, Role role, const std::string& text, const Ctx& ctx) {
  const std::uint64_t universe = role == Role::group ? act.group_order() : act.point_count();
  auto make = [&](std::vector<Code> codes) {
    return role == Role::group ? ActionSubset::group_side(std::move(codes)) : ActionSubset::point_side(std::move(codes));
  };
  if (text == "all") {
    std::vector<Code> codes(universe);
    for (Code c = 0; c < universe; ++c) codes[c] = c;
    return make(std::move(codes));
  }
  const Spec s = parse_spec(text);
  if (!s.call) throw ConfigError("unknown subset '" + text + "'");
  if (s.name == "range") {
    want_args(s, 2);
    const std::uint64_t lo = arg_u64(ctx, s.args[0]);
    const std::uint64_t hi = arg_u64(ctx, s.args[1]);
    if (hi < lo || hi >= universe) throw ConfigError("range outside 0.." + std::to_string(universe - 1) + ": " + text);
    std::vector<Code> codes;
    for (Code c = lo; c <= hi; ++c) codes.push_back(c);
    return make(std::move(codes));
  }
  if (s.name == "list") {
    std::vector<Code> codes;
    for (const auto& item : split_top_level(inner_text(s), ';')) {
      codes.push_back(role == Role::group ? act.parse_element(item) : act.parse_point(item));
    }
    return make(std::move(codes));
  }
  if (s.name == "file") {
    want_args(s, 1);
    auto in = open_file(ctx, s.args[0]);
    return parse_subset(act, role, in);
  }
  throw ConfigError("unknown subset generator '" + s.name + "'");
}

// Static checks shared by validation: spec syntax, generator names, numeric
// arguments and referenced files. Objects are not built here.
void check_spec(const std::string& key, const std::string& text, const std::set<std::string>& names, bool has_sizes,
                const std::filesystem::path& base_dir, std::vector<std::string>& errors, bool allow_literal = false) {
  Spec s;
  try {
    s = parse_spec(text);
  } catch (const std::exception& e) {
    errors.push_back(key + ": " + e.what());
    return;
  }
  if (!s.call) {
    if (!allow_literal && !names.count(text)) errors.push_back(key + ": unknown generator '" + text + "'");
    return;
  }
  if (!names.count(s.name)) {
    errors.push_back(key + ": unknown generator '" + s.name + "'");
    return;
  }
  if (s.name == "file" || s.name == "perm") {
    if (s.args.size() != 1 || s.args[0].empty()) {
      errors.push_back(key + ": " + s.name + "(...) takes one path");
      return;
    }
    std::filesystem::path p(s.args[0]);
    if (!p.is_absolute()) p = base_dir / p;
    if (!std::filesystem::exists(p)) errors.push_back(key + ": file not found: " + p.string());
    return;
  }
  for (const auto& a : s.args) {
    if ((a == "n" || a == "-n") && !has_sizes) errors.push_back(key + ": placeholder n needs a sizes list");
  }
  if (s.name == "family" && s.args.size() == 4) {
    check_spec(key, s.args[3], {"ap", "gp", "range", "random", "list", "file"}, has_sizes, base_dir, errors);
  }
}

const std::set<std::string> kSetGens{"ap", "gp", "range", "random", "list", "span", "tower", "file"};
const std::set<std::string> kFamilyGens{"family", "tower", "list", "file"};
const std::set<std::string> kActionGens{"cyclic", "agl1", "psl2", "perm"};
const std::set<std::string> kSubsetGens{"all", "range", "list", "file"};

bool is_set_key(const std::string& key) {
  static const std::regex re("A|B|D|B[0-9]");
  return std::regex_match(key, re);
}

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

double ln(double v) { return std::log(v); }

std::string dim_cell(double count, double xi) {
  if (count < 1 || xi <= 1) return {};
  return format_double(ln(count) / ln(xi));
}

std::string echo_constants(const Params& p, const std::string& xi_default) {
  std::ostringstream s;
  s << "constants: c=" << format_double(p.c.value_or(1.0)) << " c'=" << format_double(p.c_prime.value_or(1.0))
    << " xi=" << (p.xi ? format_double(*p.xi) : xi_default);
  return s.str();
}

std::vector<std::optional<std::uint64_t>> sweep(const ExperimentConfig& cfg) {
  std::vector<std::optional<std::uint64_t>> out;
  if (auto it = cfg.inputs.find("sizes"); it != cfg.inputs.end()) {
    const auto sizes = parse_list(it->second);
    for (auto v : *sizes) out.emplace_back(v);
  } else {
    out.emplace_back(std::nullopt);
  }
  return out;
}

std::string input(const ExperimentConfig& cfg, const std::string& key, const std::string& fallback = {}) {
  const auto it = cfg.inputs.find(key);
  return it == cfg.inputs.end() ? fallback : it->second;
}

std::vector<std::uint64_t> list_input(const ExperimentConfig& cfg, const std::string& key, const std::string& fallback) {
  return *parse_list(input(cfg, key, fallback));
}

// ---------------------------------------------------------------- scenarios

void run_measure(const ExperimentConfig& cfg, Report& rep, std::mt19937_64& rng) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> points;
  const bool multi = cfg.inputs.count("poly") > 0;
  for (const auto& size : sweep(cfg)) {
    const Ctx ctx{size, cfg.base_dir, &rng};
    const FiniteSet a = build_set(input(cfg, "A"), ctx);
    Row row;
    row.label = cfg.label;
    row.n = a.size();
    std::uint64_t image = 0;
    if (multi) {
      const MultiPoly f = build_poly(input(cfg, "poly"));
      std::vector<FiniteSet> bs;
      for (std::size_t i = 0; i + 1 < f.arity(); ++i) {
        const std::string key = "B" + std::to_string(i);
        bs.push_back(cfg.inputs.count(key) ? build_set(input(cfg, key), ctx) : a);
      }
      image = image_size_multi(f, a, bs, cfg.threads);
    } else {
      const PolyFamily fam = build_family(input(cfg, "family"), ctx);
      image = image_size(fam, a, cfg.threads);
      row.f_count = fmt_u64(fam.size());
    }
    row.image = fmt_u64(image);
    row.log_scale = fmt_u64(a.size());
    row.coarse_dim = dim_cell(static_cast<double>(image), cfg.params.xi.value_or(static_cast<double>(a.size())));
    points.emplace_back(a.size(), image);
    rep.rows.push_back(std::move(row));
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> fit_points;
  for (const auto& p : points) {
    if (p.first > 1 && p.second > 0) fit_points.push_back(p);
  }
  std::sort(fit_points.begin(), fit_points.end());
  fit_points.erase(std::unique(fit_points.begin(), fit_points.end(),
                               [](const auto& x, const auto& y) { return x.first == y.first; }),
                   fit_points.end());
  if (fit_points.size() >= 2) {
    const ExponentFit fit = fit_exponent(fit_points);
    for (auto& row : rep.rows) {
      row.slope = format_double(fit.slope);
      row.residual = format_double(fit.residual);
    }
    rep.summary.push_back("fit: |image| ~ |A|^" + format_double(fit.slope) + " (rms log residual " +
                          format_double(fit.residual) + ")");
  }
  for (const auto& [n, image] : points) {
    rep.summary.push_back("|A| = " + fmt_u64(n) + ": image = " + fmt_u64(image));
  }
  rep.summary.push_back(echo_constants(cfg.params, "|A|"));
}

void run_classify(const ExperimentConfig& cfg, Report& rep, std::mt19937_64& rng) {
  const Ctx ctx{std::nullopt, cfg.base_dir, &rng};
  const PolyFamily fam = build_family(input(cfg, "family"), ctx);
  const double eps = cfg.params.eps.value_or(0.5);
  for (ClassKind kind : {ClassKind::additive, ClassKind::multiplicative}) {
    const std::string kname = kind == ClassKind::additive ? "additive" : "multiplicative";
    const auto classes = classify_family(fam, kind);
    std::vector<bool> seen(fam.size(), false);
    for (std::size_t i = 0; i < classes.size(); ++i) {
      const auto& cls = classes[i];
      std::string params;
      for (const auto& m : cls.members) {
        if (seen.at(m.index)) throw InvariantViolation("member in two classes");
        seen[m.index] = true;
        const UniPoly arg = kind == ClassKind::additive ? cls.inner + UniPoly::constant(m.a) : cls.inner * m.a;
        if (compose(cls.outer, arg) != fam.members()[m.index]) throw InvariantViolation("class certificate mismatch");
        params += (params.empty() ? "" : " ") + m.a.str();
      }
      Row row;
      row.label = cfg.label + "/" + kname;
      row.n = i + 1;
      row.f_count = fmt_u64(fam.size());
      row.value = fmt_u64(cls.members.size());
      rep.rows.push_back(std::move(row));
      rep.summary.push_back(kname + " class " + std::to_string(i + 1) + ": outer " + cls.outer.str("t") + ", inner " +
                            cls.inner.str() + ", a = {" + params + "}");
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw InvariantViolation("classes miss a member");
  }
  const auto verdict = eps_structured(fam, eps);
  rep.summary.push_back("eps = " + format_double(eps) + ": eps_additive = " + (verdict.eps_additive ? "yes" : "no") +
                        ", eps_multiplicative = " + (verdict.eps_multiplicative ? "yes" : "no") +
                        " (largest classes " + fmt_u64(verdict.largest_additive) + " and " +
                        fmt_u64(verdict.largest_multiplicative) + " of " + fmt_u64(fam.size()) + ")");
}

void run_decompose(const ExperimentConfig& cfg, Report& rep) {
  const std::string text = input(cfg, "poly");
  const MultiPoly f = build_poly(text);
  if (f.arity() == 1) {
    const UniPoly p = parse_uni(text);
    const auto decs = decompose_uni(p);
    for (const auto& d : decs) {
      if (compose(d.outer, d.inner) != p) throw InvariantViolation("decomposition does not recompose");
      Row row;
      row.label = cfg.label + "/uni";
      row.n = static_cast<std::uint64_t>(d.inner.degree());
      row.value = fmt_u64(static_cast<std::uint64_t>(d.outer.degree()));
      rep.rows.push_back(std::move(row));
      rep.summary.push_back("f = (" + d.outer.str("t") + ") o (" + d.inner.str() + ")");
    }
    if (decs.empty()) rep.summary.push_back("no nontrivial decomposition");
    return;
  }
  const AddMulForm w = detect_addmul(f);
  Row row;
  row.label = cfg.label + "/" + to_string(w.kind);
  row.n = f.degree_in(0);
  if (w.kind != FormKind::none) {
    if (recompose(w) != f) throw InvariantViolation("witness does not recompose");
    row.value = fmt_u64(static_cast<std::uint64_t>(w.h.degree()));
    rep.summary.push_back(to_string(w.kind) + ": g(t) = " + w.g.str("t") + ", h(x) = " + w.h.str() +
                          ", s = " + w.s->str());
  } else {
    rep.summary.push_back("none: no additive or multiplicative form");
  }
  rep.rows.push_back(std::move(row));
}

void run_incidence(const ExperimentConfig& cfg, Report& rep, std::mt19937_64& rng) {
  const std::string mode = input(cfg, "mode", "graph");
  const SurfaceSpec u = mode == "implicit" ? SurfaceSpec::parse_implicit(input(cfg, "surface"))
                                           : SurfaceSpec::parse_graph(input(cfg, "surface"));
  std::vector<std::pair<std::uint64_t, std::uint64_t>> points;
  for (const auto& size : sweep(cfg)) {
    const Ctx ctx{size, cfg.base_dir, &rng};
    const FiniteSet a = build_set(input(cfg, "A"), ctx);
    const FiniteSet d = build_set(input(cfg, "D"), ctx);
    const FiniteSet b = build_set(input(cfg, "B"), ctx);
    const std::uint64_t count = incidence_surface(u, a, d, b, cfg.threads);
    const std::uint64_t scale = a.size() * d.size();
    Row row;
    row.label = cfg.label;
    row.n = a.size();
    row.incidence = fmt_u64(count);
    row.log_scale = fmt_u64(scale);
    row.coarse_dim = dim_cell(static_cast<double>(count), cfg.params.xi.value_or(static_cast<double>(scale)));
    rep.rows.push_back(std::move(row));
    if (scale > 1 && count > 0) points.emplace_back(scale, count);
    rep.summary.push_back("|A| = " + fmt_u64(a.size()) + ", |D| = " + fmt_u64(d.size()) + ", |B| = " +
                          fmt_u64(b.size()) + ": incidences = " + fmt_u64(count));
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(), [](const auto& x, const auto& y) { return x.first == y.first; }),
               points.end());
  if (points.size() >= 2) {
    const ExponentFit fit = fit_exponent(points);
    for (auto& row : rep.rows) {
      row.slope = format_double(fit.slope);
      row.residual = format_double(fit.residual);
    }
    rep.summary.push_back("fit: incidences ~ (|A||D|)^" + format_double(fit.slope));
  }
  rep.summary.push_back(echo_constants(cfg.params, "|A||D|"));
}

void run_construct(const ExperimentConfig& cfg, Report& rep, std::mt19937_64& rng) {
  const Ctx ctx{std::nullopt, cfg.base_dir, &rng};
  const std::string text = input(cfg, "generator");
  const Spec s = parse_spec(text);
  Row row;
  row.label = cfg.label + "/" + s.name;
  std::ostringstream artifact;
  if (s.name == "family") {
    const PolyFamily fam = build_family(text, ctx);
    for (const auto& m : fam.members()) artifact << m.str() << '\n';
    row.n = fam.size();
    row.f_count = fmt_u64(fam.size());
    rep.artifacts.emplace_back(".family", artifact.str());
  } else {
    const FiniteSet set = build_set(text, ctx);
    if ((s.name == "ap" || s.name == "gp") && set.size() != arg_u64(ctx, s.args.at(2))) {
      throw InvariantViolation("progression has repeated elements");
    }
    if (s.name == "span" && set.size() != gen_span(arg_u64(ctx, s.args.at(0))).expected_size()) {
      throw InvariantViolation("span set size differs from its closed form");
    }
    set.write(artifact);
    row.n = set.size();
    row.value = fmt_u64(set.size());
    rep.artifacts.emplace_back(".set", artifact.str());
  }
  rep.summary.push_back("generated " + text + " with " + fmt_u64(*row.n) + " elements");
  rep.rows.push_back(std::move(row));
}

void run_span(const ExperimentConfig& cfg, Report& rep) {
  const std::uint64_t budget = cfg.params.budget.value_or(10'000'000);
  for (std::uint64_t N : list_input(cfg, "Ns", "256,4096,65536")) {
    const SpanInstance inst = gen_span(N);
    for (std::uint64_t k : list_input(cfg, "ks", "1,2,3")) {
      const SumsetMeasure m = span_iterated_sumset(inst, static_cast<unsigned>(k), budget);
      const double target = 2.0 - std::ldexp(1.0, 1 - static_cast<int>(k));
      Row row;
      row.label = cfg.label + "/k=" + fmt_u64(k);
      row.n = N;
      row.image = m.size.get_str();
      row.log_scale = fmt_u64(N);
      row.coarse_dim = format_double(m.dim.value);
      row.value = format_double(target);
      rep.rows.push_back(std::move(row));
      rep.summary.push_back("N = " + fmt_u64(N) + ", k = " + fmt_u64(k) + ": |kS| = " + m.size.get_str() +
                            ", dim = " + format_double(m.dim.value) + ", reference " + format_double(target) +
                            ", deviation " + format_double(std::abs(m.dim.value - target)));
    }
  }
  rep.summary.push_back(echo_constants(cfg.params, "N"));
}

void run_tower(const ExperimentConfig& cfg, Report& rep) {
  for (std::uint64_t n : list_input(cfg, "ns", "16")) {
    const auto inst = gen_counterexample(n);
    const std::uint64_t image = image_size(inst.family, inst.set);
    if (image != 2 * n) throw InvariantViolation("tower image differs from 2n at n = " + fmt_u64(n));
    Row row;
    row.label = cfg.label;
    row.n = n;
    row.f_count = fmt_u64(n);
    row.image = fmt_u64(image);
    row.log_scale = fmt_u64(inst.set.size());
    row.coarse_dim = dim_cell(static_cast<double>(image), static_cast<double>(inst.set.size()));
    rep.rows.push_back(std::move(row));
    rep.summary.push_back("n = " + fmt_u64(n) + ": |F| = " + fmt_u64(n) + ", |A| = " + fmt_u64(inst.set.size()) +
                          ", |F*A| = " + fmt_u64(image));
  }
}

void run_bsg(const ExperimentConfig& cfg, Report& rep, std::mt19937_64& rng) {
  const Ctx ctx{std::nullopt, cfg.base_dir, &rng};
  const auto act = build_action(input(cfg, "action"), ctx);
  const ActionSubset s = build_subset(*act, Role::group, input(cfg, "S"), ctx);
  const ActionSubset a = build_subset(*act, Role::point, input(cfg, "A"), ctx);
  BsgOptions opts;
  if (cfg.params.top) opts.top = *cfg.params.top;
  if (cfg.params.quantile) opts.quantile = *cfg.params.quantile;
  if (cfg.params.budget) opts.product_budget = *cfg.params.budget;
  const double delta = cfg.params.delta.value_or(0.3);
  const unsigned n = static_cast<unsigned>(cfg.params.n.value_or(1));
  const double t = cfg.params.t.value_or(0.0);
  const BsgResult r = bsg_extract(*act, s, a, opts);
  const BsgCheck check = verify_bsg(*act, r, a, s, delta, n, t);
  const double quality = certificate_delta(*act, r, a, s, n, t);
  Row row;
  row.label = cfg.label;
  row.n = a.size();
  row.f_count = fmt_u64(s.size());
  row.image = fmt_u64(r.size_HT);
  row.incidence = fmt_u64(r.incidences);
  row.log_scale = fmt_u64(a.size());
  row.coarse_dim = dim_cell(static_cast<double>(r.size_HT), static_cast<double>(a.size()));
  row.value = format_double(quality);
  rep.rows.push_back(std::move(row));
  auto yn = [](bool b) { return b ? "pass" : "FAIL"; };
  rep.summary.push_back("action " + act->name() + ", |S| = " + fmt_u64(s.size()) + ", |A| = " + fmt_u64(a.size()) +
                        ", incidences = " + fmt_u64(r.incidences));
  rep.summary.push_back("|H| = " + fmt_u64(r.size_H) + ", |T| = " + fmt_u64(r.size_T) + ", |H*T| = " +
                        fmt_u64(r.size_HT) + ", |H cap hS| = " + fmt_u64(r.size_H_cap_hS) + ", h = " +
                        act->element_str(r.h));
  rep.summary.push_back("delta = " + format_double(delta) + ", n = " + std::to_string(n) + ", t = " + format_double(t) +
                        ": |H| " + yn(check.size_H) + ", |T| " + yn(check.size_T) + ", |H*T| " +
                        yn(check.non_expansion) + ", |H cap hS| " + yn(check.intersection) + ", T in A " +
                        yn(check.T_in_A));
  rep.summary.push_back("smallest certified delta = " + format_double(quality));
}

void run_stab(const ExperimentConfig& cfg, Report& rep, std::mt19937_64& rng) {
  const Ctx ctx{std::nullopt, cfg.base_dir, &rng};
  const auto act = build_action(input(cfg, "action"), ctx);
  const ActionSubset w = build_subset(*act, Role::group, input(cfg, "W", "all"), ctx);
  const ActionSubset a = build_subset(*act, Role::point, input(cfg, "A", "all"), ctx);
  const unsigned n = static_cast<unsigned>(cfg.params.n.value_or(2));
  const StabReport r = stab_count(*act, w, a, n, cfg.params.budget.value_or(10'000'000), cfg.threads);
  for (const auto& [stab, tuples] : r.histogram) {
    Row row;
    row.label = cfg.label;
    row.n = stab;
    row.f_count = fmt_u64(w.size());
    row.log_scale = fmt_u64(a.size());
    row.value = fmt_u64(tuples);
    rep.rows.push_back(std::move(row));
  }
  rep.summary.push_back("action " + act->name() + ", |W| = " + fmt_u64(w.size()) + ", |A| = " + fmt_u64(a.size()) +
                        ", n = " + std::to_string(n));
  rep.summary.push_back("tuples with a nontrivial stabilizer: " + fmt_u64(r.nontrivial) + " of " + fmt_u64(r.tuples));
}

void run_bounds(const ExperimentConfig& cfg, Report& rep) {
  const Params& p = cfg.params;
  const double eps = p.eps.value_or(0.5);
  const double c = p.c.value_or(1.0);
  const double c_prime = p.c_prime.value_or(1.0);
  const std::uint64_t m = p.m.value_or(1);
  BoundParams bp;
  bp.eps = eps;
  bp.c = c;
  bp.c_prime = c_prime;
  bp.gamma = p.gamma.value_or(1.0);
  bp.gamma_prime = p.gamma_prime.value_or(1.0);
  bp.k = p.k.value_or(1);
  bp.r = p.r.value_or(1.0);
  auto add = [&](const std::string& name, double v) {
    Row row;
    row.label = cfg.label + "/" + name;
    row.value = format_double(v);
    rep.rows.push_back(std::move(row));
    rep.summary.push_back(name + " = " + format_double(v));
  };
  add("eta_unbalanced", eta_unbalanced_er(m, eps, c_prime));
  add("eta0", eta0_main1d(eps, c));
  add("delta_jz", delta_jz(bp));
  rep.summary.push_back("inputs: eps=" + format_double(eps) + " m=" + fmt_u64(m) + " gamma=" + format_double(bp.gamma) +
                        " gamma'=" + format_double(bp.gamma_prime) + " k=" + fmt_u64(bp.k) + " r=" + format_double(bp.r));
  rep.summary.push_back(echo_constants(p, "unused"));
}

// ---------------------------------------------------------------- config

struct KeyRule {
  enum Type { real, count } type;
  std::optional<double> Params::*real_field = nullptr;
  std::optional<std::uint64_t> Params::*count_field = nullptr;
};

const std::map<std::string, KeyRule>& param_rules() {
  static const std::map<std::string, KeyRule> rules{
      {"eps", {KeyRule::real, &Params::eps}},
      {"delta", {KeyRule::real, &Params::delta}},
      {"t", {KeyRule::real, &Params::t}},
      {"c", {KeyRule::real, &Params::c}},
      {"c_prime", {KeyRule::real, &Params::c_prime}},
      {"xi", {KeyRule::real, &Params::xi}},
      {"gamma", {KeyRule::real, &Params::gamma}},
      {"gamma_prime", {KeyRule::real, &Params::gamma_prime}},
      {"r", {KeyRule::real, &Params::r}},
      {"quantile", {KeyRule::real, &Params::quantile}},
      {"n", {KeyRule::count, nullptr, &Params::n}},
      {"k", {KeyRule::count, nullptr, &Params::k}},
      {"m", {KeyRule::count, nullptr, &Params::m}},
      {"budget", {KeyRule::count, nullptr, &Params::budget}},
      {"top", {KeyRule::count, nullptr, &Params::top}},
  };
  return rules;
}

const std::set<std::string>& input_keys() {
  static const std::set<std::string> keys{"family", "poly", "A", "B", "D", "B0", "B1", "B2", "B3", "B4",
                                          "B5", "B6", "B7", "B8", "B9", "surface", "mode", "sizes", "action",
                                          "S", "W", "generator", "Ns", "ks", "ns"};
  return keys;
}

void check_params(const ExperimentConfig& cfg, std::vector<std::string>& errors) {
  const Params& p = cfg.params;
  if (p.eps) {
    if (cfg.scenario == Scenario::bounds) {
      if (!(*p.eps > 0 && *p.eps <= 1)) errors.push_back("eps must be in (0,1]");
    } else if (!(*p.eps > 0 && *p.eps < 1)) {
      errors.push_back("eps must be in (0,1)");
    }
  }
  auto positive = [&](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0)) errors.push_back(std::string(name) + " must be positive");
  };
  positive(p.c, "c");
  positive(p.c_prime, "c_prime");
  positive(p.gamma, "gamma");
  positive(p.gamma_prime, "gamma_prime");
  positive(p.r, "r");
  if (p.xi && !(*p.xi > 1)) errors.push_back("xi must be greater than 1");
  if (p.delta && !(*p.delta >= 0)) errors.push_back("delta must be nonnegative");
  if (p.t && !(*p.t >= 0)) errors.push_back("t must be nonnegative");
  if (p.quantile && !(*p.quantile >= 0 && *p.quantile <= 1)) errors.push_back("quantile must be in [0,1]");
  if (p.k && *p.k == 0) errors.push_back("k must be at least 1");
  if (p.m && *p.m == 0) errors.push_back("m must be at least 1");
  if (p.n && *p.n == 0) errors.push_back("n must be at least 1");
}

void check_inputs(const ExperimentConfig& cfg, std::vector<std::string>& errors) {
  const auto& in = cfg.inputs;
  const bool has_sizes = in.count("sizes") > 0;
  auto require = [&](const std::string& key) {
    if (!in.count(key)) errors.push_back("missing input '" + key + "' for scenario " + to_string(cfg.scenario));
  };
  for (const char* key : {"sizes", "Ns", "ks", "ns"}) {
    if (in.count(key) && !parse_list(in.at(key))) errors.push_back(std::string(key) + ": expected a list like 1,2,8-10");
  }
  for (const auto& [key, value] : in) {
    if (is_set_key(key)) {
      if (cfg.scenario == Scenario::bsg || cfg.scenario == Scenario::stab) {
        check_spec(key, value, kSubsetGens, has_sizes, cfg.base_dir, errors);
      } else {
        check_spec(key, value, kSetGens, has_sizes, cfg.base_dir, errors);
      }
    } else if (key == "S" || key == "W") {
      check_spec(key, value, kSubsetGens, has_sizes, cfg.base_dir, errors);
    } else if (key == "family") {
      check_spec(key, value, kFamilyGens, has_sizes, cfg.base_dir, errors, true);
    } else if (key == "action") {
      check_spec(key, value, kActionGens, has_sizes, cfg.base_dir, errors);
    } else if (key == "generator") {
      std::set<std::string> gens = kSetGens;
      gens.insert("family");
      check_spec(key, value, gens, has_sizes, cfg.base_dir, errors);
    } else if (key == "mode" && value != "graph" && value != "implicit") {
      errors.push_back("mode must be graph or implicit");
    }
  }
  auto check_poly = [&](const std::string& key, bool uni) {
    if (!in.count(key)) return;
    try {
      if (uni) {
        parse_uni(in.at(key));
      } else {
        build_poly(in.at(key));
      }
    } catch (const std::exception& e) {
      errors.push_back(key + ": " + e.what());
    }
  };
  switch (cfg.scenario) {
    case Scenario::measure:
      require("A");
      if (in.count("family") == in.count("poly")) errors.push_back("measure needs exactly one of 'family' or 'poly'");
      check_poly("poly", false);
      break;
    case Scenario::classify:
      require("family");
      break;
    case Scenario::decompose:
      require("poly");
      check_poly("poly", false);
      break;
    case Scenario::incidence:
      for (const char* key : {"surface", "A", "D", "B"}) require(key);
      if (in.count("surface")) {
        try {
          if (in.count("mode") && in.at("mode") == "implicit") {
            SurfaceSpec::parse_implicit(in.at("surface"));
          } else {
            SurfaceSpec::parse_graph(in.at("surface"));
          }
        } catch (const std::exception& e) {
          errors.push_back(std::string("surface: ") + e.what());
        }
      }
      break;
    case Scenario::construct:
      require("generator");
      break;
    case Scenario::bsg:
      for (const char* key : {"action", "S", "A"}) require(key);
      break;
    case Scenario::stab:
      require("action");
      break;
    case Scenario::span:
    case Scenario::tower:
    case Scenario::bounds:
      break;
  }
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"measure", "classify", "decompose", "incidence", "construct",
                                              "span",    "tower",    "bsg",       "stab",      "bounds"};
  return names;
}

std::optional<Scenario> scenario_from(std::string_view name) {
  const auto& names = scenario_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Scenario>(i);
  }
  return std::nullopt;
}

std::string to_string(Scenario s) { return scenario_names().at(static_cast<std::size_t>(s)); }

Spec parse_spec(std::string_view text) {
  Spec s;
  s.raw = trim(text);
  const auto open = s.raw.find('(');
  int depth = 0;
  for (char ch : s.raw) {
    if (ch == '(') ++depth;
    if (ch == ')' && --depth < 0) throw std::invalid_argument("unbalanced parentheses in '" + s.raw + "'");
  }
  if (depth != 0) throw std::invalid_argument("unbalanced parentheses in '" + s.raw + "'");
  static const std::regex call(R"(([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\))");
  std::smatch m;
  if (open == std::string::npos || !std::regex_match(s.raw, m, call)) {
    s.name = s.raw;
    return s;
  }
  // A call must close at the last character: "f(x)+1" is a literal.
  depth = 0;
  for (std::size_t i = open; i < s.raw.size(); ++i) {
    if (s.raw[i] == '(') ++depth;
    if (s.raw[i] == ')' && --depth == 0 && i + 1 != s.raw.size()) {
      s.name = s.raw;
      return s;
    }
  }
  s.call = true;
  s.name = m[1].str();
  const std::string inner = trim(m[2].str());
  if (!inner.empty()) s.args = split_top_level(inner, ',');
  return s;
}

Validation validate_config(const std::string& text, std::optional<Scenario> scenario,
                           const std::filesystem::path& base_dir) {
  Validation out;
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  std::optional<std::string> scenario_key;
  std::string section;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string where = "line " + std::to_string(lineno) + ": ";
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') {
        out.errors.push_back(where + "malformed section header");
        continue;
      }
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (section != "run" && section != "params" && section != "inputs") {
        out.errors.push_back(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      out.errors.push_back(where + "expected key = value");
      continue;
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (section.empty()) {
      out.errors.push_back(where + "key '" + key + "' outside a section");
      continue;
    }
    if (!seen.insert(section + "." + key).second) {
      out.errors.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    if (value.empty()) {
      out.errors.push_back(where + "empty value for '" + key + "'");
      continue;
    }
    if (section == "run") {
      if (key == "scenario") {
        scenario_key = value;
      } else if (key == "label") {
        cfg.label = value;
      } else if (key == "seed") {
        if (auto v = parse_u64(value)) {
          cfg.seed = *v;
        } else {
          out.errors.push_back(where + "seed must be an unsigned integer");
        }
      } else if (key == "threads") {
        auto v = parse_u64(value);
        if (v && *v >= 1 && *v <= 1024) {
          cfg.threads = static_cast<unsigned>(*v);
        } else {
          out.errors.push_back(where + "threads must be in 1..1024");
        }
      } else {
        out.errors.push_back(where + "unknown key '" + key + "' in [run]");
      }
    } else if (section == "params") {
      const auto& rules = param_rules();
      const auto it = rules.find(key);
      if (it == rules.end()) {
        out.errors.push_back(where + "unknown key '" + key + "' in [params]");
      } else if (it->second.type == KeyRule::real) {
        if (auto v = parse_real(value); v && std::isfinite(*v)) {
          cfg.params.*(it->second.real_field) = *v;
        } else {
          out.errors.push_back(where + key + " must be a finite number");
        }
      } else if (auto v = parse_u64(value)) {
        cfg.params.*(it->second.count_field) = *v;
      } else {
        out.errors.push_back(where + key + " must be an unsigned integer");
      }
    } else if (section == "inputs") {
      if (!input_keys().count(key)) {
        out.errors.push_back(where + "unknown key '" + key + "' in [inputs]");
      } else {
        cfg.inputs[key] = value;
      }
    }
  }
  if (scenario_key) {
    const auto named = scenario_from(*scenario_key);
    if (!named) {
      out.errors.push_back("unknown scenario '" + *scenario_key + "'");
    } else if (scenario && *scenario != *named) {
      out.errors.push_back("config is for scenario " + *scenario_key + ", not " + to_string(*scenario));
    } else {
      cfg.scenario = *named;
    }
  }
  if (scenario) {
    cfg.scenario = *scenario;
  } else if (!scenario_key) {
    out.errors.push_back("missing scenario");
  }
  if (cfg.label.empty()) cfg.label = to_string(cfg.scenario);
  if (cfg.label.find_first_of(",\"\n") != std::string::npos) out.errors.push_back("label may not contain ',' or '\"'");
  check_params(cfg, out.errors);
  check_inputs(cfg, out.errors);
  if (out.errors.empty()) out.config = std::move(cfg);
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_csv(const Report& report, std::ostream& out) {
  out << "scenario,label,n,f_count,image,incidence,log_scale,coarse_dim,slope,residual,value\n";
  for (const auto& r : report.rows) {
    out << report.scenario << ',' << r.label << ',' << (r.n ? std::to_string(*r.n) : "") << ',' << r.f_count << ','
        << r.image << ',' << r.incidence << ',' << r.log_scale << ',' << r.coarse_dim << ',' << r.slope << ','
        << r.residual << ',' << r.value << '\n';
  }
}

Report run_experiment(const ExperimentConfig& cfg) {
  Report rep;
  rep.scenario = to_string(cfg.scenario);
  std::mt19937_64 rng(cfg.seed);
  try {
    switch (cfg.scenario) {
      case Scenario::measure: run_measure(cfg, rep, rng); break;
      case Scenario::classify: run_classify(cfg, rep, rng); break;
      case Scenario::decompose: run_decompose(cfg, rep); break;
      case Scenario::incidence: run_incidence(cfg, rep, rng); break;
      case Scenario::construct: run_construct(cfg, rep, rng); break;
      case Scenario::span: run_span(cfg, rep); break;
      case Scenario::tower: run_tower(cfg, rep); break;
      case Scenario::bsg: run_bsg(cfg, rep, rng); break;
      case Scenario::stab: run_stab(cfg, rep, rng); break;
      case Scenario::bounds: run_bounds(cfg, rep); break;
    }
  } catch (const ConfigError& e) {
    throw std::invalid_argument(e.what());
  }
  std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const Row& a, const Row& b) {
    if (a.label != b.label) return a.label < b.label;
    return a.n < b.n;
  });
  rep.summary.insert(rep.summary.begin(), "scenario " + rep.scenario + ", label " + cfg.label + ", seed " +
                                              std::to_string(cfg.seed) + ", threads " + std::to_string(cfg.threads));
  return rep;
}

std::vector<std::string> plan(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  out.push_back("scenario " + to_string(cfg.scenario) + ", label " + cfg.label + ", seed " + std::to_string(cfg.seed) +
                ", threads " + std::to_string(cfg.threads));
  for (const auto& [key, value] : cfg.inputs) out.push_back("input " + key + " = " + value);
  const Params& p = cfg.params;
  for (const auto& [key, rule] : param_rules()) {
    if (rule.type == KeyRule::real && (p.*(rule.real_field))) {
      out.push_back("param " + key + " = " + format_double(*(p.*(rule.real_field))));
    }
    if (rule.type == KeyRule::count && (p.*(rule.count_field))) {
      out.push_back("param " + key + " = " + std::to_string(*(p.*(rule.count_field))));
    }
  }
  std::size_t runs = 1;
  if (auto it = cfg.inputs.find("sizes"); it != cfg.inputs.end()) runs = parse_list(it->second)->size();
  if (cfg.scenario == Scenario::span) {
    runs = list_input(cfg, "Ns", "256,4096,65536").size() * list_input(cfg, "ks", "1,2,3").size();
  }
  if (cfg.scenario == Scenario::tower) runs = list_input(cfg, "ns", "16").size();
  out.push_back("measurements planned: " + std::to_string(runs));
  out.push_back(echo_constants(p, "auto"));
  return out;
}

}  // namespace growthlab::cli
