#include "moprox/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace moprox {

bool DomainBox::contains(const Vec& x) const {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] > lower[i] && x[i] < upper[i])) return false;
  return true;
}

Problem::Problem(std::string name, int nvars, DomainBox box, Vec reference_point,
                 std::vector<Component> components)
    : name_(std::move(name)),
      nvars_(nvars),
      box_(std::move(box)),
      reference_point_(std::move(reference_point)),
      components_(std::move(components)) {
  if (nvars_ < 1) throw ValidationError("nvars must be >= 1");
  if (box_.lower.size() != static_cast<std::size_t>(nvars_) ||
      box_.upper.size() != static_cast<std::size_t>(nvars_))
    throw ValidationError("domain bounds must have nvars entries");
  for (int i = 0; i < nvars_; ++i) {
    if (std::isnan(box_.lower[i]) || std::isnan(box_.upper[i]))
      throw ValidationError("domain bound is NaN");
    if (!(box_.lower[i] < box_.upper[i]))
      throw ValidationError("domain lower bound must be below upper bound");
  }
  if (reference_point_.size() != static_cast<std::size_t>(nvars_))
    throw ValidationError("reference_point must have nvars entries");
  for (int i = 0; i < nvars_; ++i)
    if (!(reference_point_[i] >= box_.lower[i] && reference_point_[i] <= box_.upper[i]))
      throw ValidationError("reference_point outside the domain closure");
  if (components_.empty()) throw ValidationError("problem needs at least one component");
  for (const Component& comp : components_) {
    if (comp.pieces.empty())
      throw ValidationError("component '" + comp.name + "' has no pieces");
    for (const SmoothPiece& piece : comp.pieces) {
      if (!(piece.lipschitz_grad > 0.0) || !std::isfinite(piece.lipschitz_grad))
        throw ValidationError("piece '" + piece.label + "': lipschitz_grad must be positive");
      if (piece.expr.nvars() != nvars_)
        throw ValidationError("piece '" + piece.label + "': wrong variable count");
      if (piece.expr.uses_abs())
        throw ValidationError("piece '" + piece.label + "': abs() is not C1");
    }
  }
}

namespace {

double bound_from_json(const nlohmann::json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ValidationError(where + ": expected a number or \"inf\"/\"-inf\"");
}

Problem problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("problem file: top level must be an object");
  for (const char* key : {"name", "nvars", "domain", "reference_point", "components"})
    if (!j.contains(key)) throw ValidationError(std::string("problem file: missing '") + key + "'");

  const int nvars = j.at("nvars").get<int>();
  if (nvars < 1) throw ValidationError("nvars must be >= 1");

  DomainBox box;
  const auto& dom = j.at("domain");
  if (!dom.contains("lower") || !dom.contains("upper"))
    throw ValidationError("domain: needs 'lower' and 'upper' arrays");
  for (const auto& v : dom.at("lower")) box.lower.push_back(bound_from_json(v, "domain.lower"));
  for (const auto& v : dom.at("upper")) box.upper.push_back(bound_from_json(v, "domain.upper"));

  Vec ref;
  for (const auto& v : j.at("reference_point")) ref.push_back(v.get<double>());

  std::vector<Component> comps;
  for (const auto& jc : j.at("components")) {
    Component comp;
    comp.name = jc.value("name", "f" + std::to_string(comps.size() + 1));
    if (!jc.contains("pieces")) throw ValidationError("component '" + comp.name + "': missing 'pieces'");
    for (const auto& jp : jc.at("pieces")) {
      if (!jp.contains("expr")) throw ValidationError("piece: missing 'expr'");
      std::string label = jp.value("label", "");
      std::string text = jp.at("expr").get<std::string>();
      try {
        Expression e = Expression::parse(text, nvars);
        double lip = jp.value("lipschitz_grad", 0.0);
        comp.pieces.push_back(SmoothPiece{std::move(e), lip, std::move(label)});
      } catch (const ParseError& pe) {
        throw ValidationError("piece '" + text + "': " + pe.what());
      }
    }
    comps.push_back(std::move(comp));
  }

  return Problem(j.value("name", "unnamed"), nvars, std::move(box), std::move(ref),
                 std::move(comps));
}

}  // namespace

Problem Problem::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open problem file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

Problem Problem::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("problem file: ") + e.what());
  }
  try {
    return problem_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("problem file: ") + e.what());
  }
}

void Problem::check_in_box(const Vec& x) const {
  if (x.size() != static_cast<std::size_t>(nvars_))
    throw DomainError("point has wrong dimension");
  if (!box_.contains(x)) throw DomainError("point outside the open domain box");
}

double Problem::piece_value(int j, int i, const Vec& x) const {
  return components_[j].pieces[i].expr.eval(x);
}

Vec Problem::piece_gradient(int j, int i, const Vec& x) const {
  return components_[j].pieces[i].expr.eval_grad(x).partials;
}

double Problem::component_value(int j, const Vec& x) const {
  check_in_box(x);
  const auto& pieces = components_[j].pieces;
  double v = pieces[0].expr.eval(x);
  for (std::size_t i = 1; i < pieces.size(); ++i) v = std::max(v, pieces[i].expr.eval(x));
  return v;
}

Vec Problem::evaluate(const Vec& x) const {
  check_in_box(x);
  Vec out(components_.size());
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const auto& pieces = components_[j].pieces;
    double v = pieces[0].expr.eval(x);
    for (std::size_t i = 1; i < pieces.size(); ++i) v = std::max(v, pieces[i].expr.eval(x));
    out[j] = v;
  }
  return out;
}

ActiveSet Problem::active_pieces(int j, const Vec& x, double eps_act) const {
  check_in_box(x);
  if (eps_act < 0.0) throw ValidationError("eps_act must be nonnegative");
  const auto& pieces = components_[j].pieces;
  std::vector<double> vals(pieces.size());
  double fj = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    vals[i] = pieces[i].expr.eval(x);
    fj = std::max(fj, vals[i]);
  }
  ActiveSet act;
  act.component = j;
  act.tolerance = eps_act;
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (vals[i] >= fj - eps_act) act.pieces.push_back(static_cast<int>(i));
  return act;
}

std::vector<std::vector<GradEntry>> Problem::clarke_generators(
    const Vec& x, std::optional<double> eps_act) const {
  check_in_box(x);
  std::vector<std::vector<GradEntry>> out(components_.size());
  for (int j = 0; j < num_components(); ++j) {
    double eps = eps_act ? *eps_act : default_eps_active(component_value(j, x));
    ActiveSet act = active_pieces(j, x, eps);
    for (int i : act.pieces)
      out[j].push_back(GradEntry{i, piece_gradient(j, i, x)});
  }
  return out;
}

bool Problem::dominated_by(const Vec& x, const Vec& bound) const {
  if (bound.size() != components_.size())
    throw ValidationError("bound must have one entry per component");
  Vec fx = evaluate(x);
  return leq_componentwise(fx, bound);
}

double Problem::max_lipschitz(int j) const {
  double m = 0.0;
  for (const SmoothPiece& piece : components_[j].pieces)
    m = std::max(m, piece.lipschitz_grad);
  return m;
}

DomainBox sampling_bounds(const Problem& p) {
  DomainBox b = p.box();
  const Vec& ref = p.reference_point();
  for (int i = 0; i < p.nvars(); ++i) {
    double radius = 2.0 * std::max(1.0, std::fabs(ref[i]));
    if (!std::isfinite(b.lower[i])) b.lower[i] = ref[i] - radius;
    if (!std::isfinite(b.upper[i])) b.upper[i] = ref[i] + radius;
  }
  return b;
}

std::optional<Vec> sample_sublevel(const Problem& p, const Vec& bound, Rng& rng,
                                   int max_attempts) {
  DomainBox b = sampling_bounds(p);
  Vec x(p.nvars());
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    for (int i = 0; i < p.nvars(); ++i) x[i] = rng.uniform(b.lower[i], b.upper[i]);
    if (!p.box().contains(x)) continue;
    try {
      if (p.dominated_by(x, bound)) return x;
    } catch (const DomainError&) {
    }
  }
  return std::nullopt;
}

}  // namespace moprox
