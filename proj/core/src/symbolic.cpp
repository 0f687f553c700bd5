#include "kanlm/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "kanlm/errors.hpp"
#include "kanlm/lbfgs.hpp"

namespace kanlm {

namespace {

struct TargetStats {
  double mean = 0.0;
  double sst = 0.0;
};

TargetStats target_stats(const std::vector<double>& ys) {
  TargetStats t;
  for (double y : ys) t.mean += y;
  t.mean /= static_cast<double>(ys.size());
  for (double y : ys) t.sst += (y - t.mean) * (y - t.mean);
  return t;
}

// Closed-form (c, d) for fixed (a, b); returns false when some sample
// leaves the candidate's domain.
bool score_ab(const std::vector<double>& xs, const std::vector<double>& ys, CandidateId cid,
              double a, double b, const TargetStats& ts, std::vector<double>& g_buf,
              CandidateFit& out) {
  const std::size_t n = xs.size();
  g_buf.resize(n);
  double g_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = a * xs[i] + b;
    if (!candidate_in_domain(cid, u)) return false;
    const double g = candidate_eval(cid, u).value;
    if (!std::isfinite(g)) return false;
    g_buf[i] = g;
    g_sum += g;
  }
  const double g_mean = g_sum / static_cast<double>(n);
  double g_var = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dg = g_buf[i] - g_mean;
    g_var += dg * dg;
    cov += dg * (ys[i] - ts.mean);
  }

  double c, d;
  if (g_var <= 1e-14 * (1.0 + g_mean * g_mean) * static_cast<double>(n)) {
    c = 0.0;
    d = ts.mean;
  } else {
    c = cov / g_var;
    d = ts.mean - c * g_mean;
  }
  if (!std::isfinite(c) || !std::isfinite(d)) return false;

  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = c * g_buf[i] + d - ys[i];
    sse += e * e;
  }
  const double r2 = 1.0 - sse / ts.sst;
  if (!std::isfinite(r2)) return false;
  if (r2 > out.r2) {
    out.a = a;
    out.b = b;
    out.c = c;
    out.d = d;
    out.r2 = r2;
    out.feasible = true;
  }
  return true;
}

}  // namespace

CandidateFit fit_candidate(const std::vector<double>& xs, const std::vector<double>& ys,
                           CandidateId cid) {
  if (xs.size() != ys.size()) throw InvalidInput("fit_candidate: length mismatch");
  if (xs.size() < 10) throw InvalidInput("fit_candidate: need at least 10 samples");
  const auto [x_min, x_max] = std::minmax_element(xs.begin(), xs.end());
  if (!(*x_max > *x_min)) throw InvalidInput("fit_candidate: degenerate input range");

  CandidateFit fit;
  fit.cid = cid;
  const TargetStats ts = target_stats(ys);

  if (ts.sst <= 0.0) {
    // Constant target: only the constant candidate is a meaningful fit.
    if (cid == CandidateId::Const) {
      fit.a = 1.0;
      fit.b = 0.0;
      fit.c = 0.0;
      fit.d = ts.mean;
      fit.r2 = 1.0;
      fit.feasible = true;
    }
    return fit;
  }

  if (cid == CandidateId::Const) {
    fit.a = 1.0;
    fit.b = 0.0;
    fit.c = 0.0;
    fit.d = ts.mean;
    fit.r2 = 0.0;
    fit.feasible = true;
    return fit;
  }

  std::vector<double> g_buf;
  double ca = 0.0, cb = 0.0;  // incumbent grid center
  double span = 5.0, step = 0.5;
  for (int round = 0; round < 3; ++round) {
    const int half = static_cast<int>(std::lround(span / step));
    for (int ia = -half; ia <= half; ++ia)
      for (int ib = -half; ib <= half; ++ib)
        score_ab(xs, ys, cid, ca + ia * step, cb + ib * step, ts, g_buf, fit);
    if (!fit.feasible) return fit;  // domain excluded every grid point
    ca = fit.a;
    cb = fit.b;
    span = step;
    step /= 10.0;
  }
  return fit;
}

CandidateFit symbolify_edge(const ActivationEdge& edge, const std::vector<double>& observed_inputs,
                            const std::vector<CandidateId>& library) {
  if (edge.fixed) throw InvalidInput("symbolify_edge: edge is already locked");
  if (library.empty()) throw InvalidInput("symbolify_edge: empty candidate library");

  std::vector<double> xs;
  const std::size_t n = observed_inputs.size();
  const std::size_t stride = n > 400 ? (n + 399) / 400 : 1;
  for (std::size_t i = 0; i < n; i += stride) xs.push_back(observed_inputs[i]);
  // Candidate arguments are affine in x, so a fit that is feasible at both
  // observed extremes is feasible on every point in between. Make sure the
  // extremes survive the thinning.
  const auto [mn, mx] = std::minmax_element(observed_inputs.begin(), observed_inputs.end());
  if (std::find(xs.begin(), xs.end(), *mn) == xs.end()) xs.push_back(*mn);
  if (std::find(xs.begin(), xs.end(), *mx) == xs.end()) xs.push_back(*mx);

  // A node that barely moves feeds this edge a single value; the only honest
  // reading is a constant.
  const double span_tol = 1e-9 * std::max({1.0, std::fabs(*mn), std::fabs(*mx)});
  if (*mx - *mn <= span_tol) {
    if (std::find(library.begin(), library.end(), CandidateId::Const) == library.end())
      throw NumericalFailure("symbolify_edge: constant input but no const candidate in library");
    CandidateFit f;
    f.cid = CandidateId::Const;
    f.a = 1.0;
    f.b = 0.0;
    f.c = 0.0;
    f.d = edge_forward(edge, 0.5 * (*mn + *mx));
    f.r2 = 1.0;
    f.feasible = true;
    return f;
  }

  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double x : xs) ys.push_back(edge_forward(edge, x));

  std::vector<CandidateFit> fits;
  fits.reserve(library.size());
  double top = -std::numeric_limits<double>::infinity();
  for (CandidateId cid : library) {
    fits.push_back(fit_candidate(xs, ys, cid));
    if (fits.back().feasible) top = std::max(top, fits.back().r2);
  }
  if (!std::isfinite(top)) throw NumericalFailure("symbolify_edge: every candidate infeasible");

  // R2 gaps this small are within the noise of the thinned sample, so treat
  // them as ties and let library order decide: earlier entries are simpler.
  constexpr double kTieTolerance = 1e-4;
  CandidateFit best;
  for (const CandidateFit& f : fits)
    if (f.feasible && f.r2 >= top - kTieTolerance) {
      best = f;
      break;
    }
  return best;
}

namespace {

std::string edge_note(int layer, int j, int i, const CandidateFit& fit, bool locked) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "layer %d edge j=%d i=%d: %s r2=%.6f %s", layer, j, i,
                candidate_name(fit.cid), fit.r2, locked ? "locked" : "kept as spline");
  return buf;
}

}  // namespace

Extraction extract_network(const KanNetwork& net,
                           const std::vector<std::vector<double>>& train_inputs,
                           const ExtractOptions& opts) {
  if (!(opts.r2_threshold > 0.0 && opts.r2_threshold <= 1.0))
    throw InvalidInput("extract_network: r2_threshold must be in (0, 1]");
  if (train_inputs.empty()) throw InvalidInput("extract_network: no training inputs");
  for (const auto& row : train_inputs)
    if (static_cast<int>(row.size()) != net.n_inputs())
      throw InvalidInput("extract_network: input width mismatch");

  Extraction ext;
  ext.net = net;

  // Node values feeding the layer being processed, recomputed through the
  // layers locked so far.
  std::vector<std::vector<double>> acts = train_inputs;
  for (std::size_t l = 0; l < ext.net.layers.size(); ++l) {
    KanLayer& layer = ext.net.layers[l];
    for (int j = 0; j < layer.n_out; ++j)
      for (int i = 0; i < layer.n_in; ++i) {
        ActivationEdge& edge = layer.edge(j, i);
        if (edge.pruned || edge.fixed) continue;
        std::vector<double> xs;
        xs.reserve(acts.size());
        for (const auto& row : acts) xs.push_back(row[i]);
        CandidateFit fit = symbolify_edge(edge, xs, opts.library);
        const bool lock = fit.r2 >= opts.r2_threshold;
        if (lock) edge.fixed = FixedForm{fit.cid, fit.a, fit.b, fit.c, fit.d};
        else
          ext.unresolved.push_back(
              UnresolvedEdge{static_cast<int>(l), j, i, fit.r2});
        ext.notes.push_back(edge_note(static_cast<int>(l), j, i, fit, lock));
      }
    for (auto& row : acts) row = layer_forward(layer, row);
  }

  // Affine fine-tune: distill the locked network back onto the original
  // network's outputs so locking errors in early layers get compensated.
  ParamVector affine = pack(ext.net, GradMode::Affine);
  if (!affine.empty() && opts.finetune_iters > 0) {
    std::vector<std::vector<double>> targets;
    targets.reserve(train_inputs.size());
    for (const auto& row : train_inputs) targets.push_back(network_forward(net, row));
    Objective obj = [&](const std::vector<double>& p, std::vector<double>& grad) {
      unpack(ext.net, p, GradMode::Affine);
      try {
        LossGrad lg = network_backward(ext.net, train_inputs, targets, 0.0, GradMode::Affine);
        grad = std::move(lg.grad);
        return lg.loss;
      } catch (const EvalDomainError&) {
        // Trial step pushed a locked argument out of its candidate's
        // domain; report a huge loss so the line search backs off.
        grad.assign(p.size(), 0.0);
        return 1e100;
      }
    };
    LbfgsConfig cfg;
    cfg.max_iters = opts.finetune_iters;
    LbfgsResult res = lbfgs_minimize(obj, affine, cfg);
    unpack(ext.net, res.x, GradMode::Affine);
  }

  // Compose per-output expressions, sharing node subtrees.
  std::vector<ExprPtr> node_exprs;
  for (int i = 0; i < ext.net.n_inputs(); ++i) {
    std::string name = i < static_cast<int>(opts.var_names.size())
                           ? opts.var_names[i]
                           : "x" + std::to_string(i);
    node_exprs.push_back(make_var(name));
  }
  for (std::size_t l = 0; l < ext.net.layers.size(); ++l) {
    const KanLayer& layer = ext.net.layers[l];
    std::vector<ExprPtr> next;
    for (int j = 0; j < layer.n_out; ++j) {
      std::vector<ExprPtr> parts;
      for (int i = 0; i < layer.n_in; ++i) {
        const ActivationEdge& edge = layer.edge(j, i);
        if (edge.pruned) continue;
        if (edge.fixed) {
          const FixedForm& ff = *edge.fixed;
          parts.push_back(make_unary(ff.cid, node_exprs[i], ff.a, ff.b, ff.c, ff.d));
        } else {
          auto payload = std::make_shared<SplinePayload>();
          payload->edge = edge;
          payload->layer = static_cast<int>(l);
          payload->j = j;
          payload->i = i;
          parts.push_back(make_spline(std::move(payload), node_exprs[i]));
        }
      }
      next.push_back(make_sum(std::move(parts)));
    }
    node_exprs = std::move(next);
  }
  ext.outputs = std::move(node_exprs);
  return ext;
}

// --- canonical polynomial machinery for simplify -------------------------

namespace {

double round_to(double x, int decimals) {
  if (decimals > 300) return x;
  const double s = std::pow(10.0, decimals);
  const double r = std::nearbyint(x * s) / s;
  return r == 0.0 ? 0.0 : r;
}

// Stable identity string; used both for like-term collection and for the
// deterministic ordering of opaque (transcendental, spline, power) atoms.
std::string stable_key(const ExprPtr& e) {
  char buf[40];
  switch (e->kind) {
    case Expr::Kind::Constant:
      std::snprintf(buf, sizeof buf, "c%.17g", e->value);
      return buf;
    case Expr::Kind::Variable:
      return e->name;
    case Expr::Kind::Sum:
    case Expr::Kind::Product: {
      std::string out = e->kind == Expr::Kind::Sum ? "s(" : "m(";
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (i) out += ',';
        out += stable_key(e->kids[i]);
      }
      return out + ")";
    }
    case Expr::Kind::Power:
      return "pow" + std::to_string(e->exponent) + "(" + stable_key(e->kids[0]) + ")";
    case Expr::Kind::Unary: {
      std::string out = candidate_name(e->cid);
      char nums[170];
      std::snprintf(nums, sizeof nums, "[%.17g,%.17g,%.17g,%.17g]", e->a, e->b, e->c, e->d);
      return out + nums + "(" + stable_key(e->kids[0]) + ")";
    }
    case Expr::Kind::Spline: {
      const SplinePayload& p = *e->payload;
      std::string out = "spline" + std::to_string(p.layer) + "." + std::to_string(p.j) + "." +
                        std::to_string(p.i) + "{";
      char num[64];
      std::snprintf(num, sizeof num, "%.17g,%.17g;", p.edge.w_b, p.edge.w_s);
      out += num;
      for (double c : p.edge.coeffs) {
        std::snprintf(num, sizeof num, "%.17g,", c);
        out += num;
      }
      return out + "}(" + stable_key(e->kids[0]) + ")";
    }
  }
  return "?";
}

struct Monomial {
  std::map<std::string, int> vars;                      // name -> exponent
  std::vector<std::pair<std::string, ExprPtr>> opaque;  // key -> atom, sorted

  std::string key() const {
    std::string out;
    for (const auto& [name, exp] : vars) out += name + "^" + std::to_string(exp) + "|";
    for (const auto& [k, node] : opaque) out += k + "|";
    return out;
  }

  int degree() const {
    int d = 0;
    for (const auto& [name, exp] : vars) d += exp;
    return d;
  }

  bool pure_poly() const { return opaque.empty(); }
  bool is_const() const { return vars.empty() && opaque.empty(); }
};

// Canonical sum of coeff * monomial, keyed by monomial identity.
using Poly = std::map<std::string, std::pair<Monomial, double>>;

void poly_add_term(Poly& p, const Monomial& m, double coeff) {
  if (coeff == 0.0) return;
  auto [it, fresh] = p.emplace(m.key(), std::make_pair(m, coeff));
  if (!fresh) {
    it->second.second += coeff;
    if (it->second.second == 0.0) p.erase(it);
  }
}

Poly poly_const(double v) {
  Poly p;
  poly_add_term(p, Monomial{}, v);
  return p;
}

void poly_add(Poly& into, const Poly& other) {
  for (const auto& [key, term] : other) poly_add_term(into, term.first, term.second);
}

void poly_scale(Poly& p, double s) {
  if (s == 0.0) {
    p.clear();
    return;
  }
  for (auto& [key, term] : p) term.second *= s;
}

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial m = a;
  for (const auto& [name, exp] : b.vars) m.vars[name] += exp;
  m.opaque.insert(m.opaque.end(), b.opaque.begin(), b.opaque.end());
  std::sort(m.opaque.begin(), m.opaque.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return m;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ka, ta] : a)
    for (const auto& [kb, tb] : b) {
      poly_add_term(out, monomial_mul(ta.first, tb.first), ta.second * tb.second);
      if (out.size() > 20000) throw NumericalFailure("simplify: expansion grew too large");
    }
  return out;
}

Poly poly_pow(const Poly& base, int n) {
  Poly out = poly_const(1.0);
  for (int i = 0; i < n; ++i) out = poly_mul(out, base);
  return out;
}

bool poly_is_pure(const Poly& p) {
  for (const auto& [key, term] : p)
    if (!term.first.pure_poly()) return false;
  return true;
}

bool poly_as_const(const Poly& p, double& out) {
  if (p.empty()) {
    out = 0.0;
    return true;
  }
  if (p.size() == 1 && p.begin()->second.first.is_const()) {
    out = p.begin()->second.second;
    return true;
  }
  return false;
}

ExprPtr from_poly(const Poly& p, int decimals);

Poly to_poly(const ExprPtr& e, int decimals, bool expand_powers);

// Rebuilds an opaque atom over the simplified inner argument and returns
// it as a single-term poly (coefficient 1).
Poly atom_poly(ExprPtr atom) {
  Monomial m;
  std::string key = stable_key(atom);
  m.opaque.emplace_back(std::move(key), std::move(atom));
  Poly p;
  poly_add_term(p, m, 1.0);
  return p;
}

Poly unary_to_poly(const ExprPtr& e, int decimals, bool expand_powers) {
  Poly inner = to_poly(e->kids[0], decimals, expand_powers);
  // Fold the affine wrap a*arg + b into the inner polynomial.
  poly_scale(inner, e->a);
  poly_add_term(inner, Monomial{}, e->b);

  double u0;
  if (poly_as_const(inner, u0)) {
    // Constant argument: the node collapses to a constant.
    return poly_const(e->c * candidate_eval(e->cid, u0).value + e->d);
  }

  Poly out;
  switch (e->cid) {
    case CandidateId::Const:
      return poly_const(e->c + e->d);
    case CandidateId::X:
      poly_scale(inner, e->c);
      poly_add_term(inner, Monomial{}, e->d);
      return inner;
    case CandidateId::X2:
    case CandidateId::X3:
    case CandidateId::X4: {
      const int n = e->cid == CandidateId::X2 ? 2 : e->cid == CandidateId::X3 ? 3 : 4;
      if (expand_powers && poly_is_pure(inner)) {
        out = poly_pow(inner, n);
        poly_scale(out, e->c);
        poly_add_term(out, Monomial{}, e->d);
        return out;
      }
      out = atom_poly(make_power(from_poly(inner, decimals), n));
      break;
    }
    default:
      out = atom_poly(make_unary(e->cid, from_poly(inner, decimals), 1.0, 0.0, 1.0, 0.0));
      break;
  }
  poly_scale(out, e->c);
  poly_add_term(out, Monomial{}, e->d);
  return out;
}

Poly to_poly(const ExprPtr& e, int decimals, bool expand_powers) {
  switch (e->kind) {
    case Expr::Kind::Constant:
      return poly_const(e->value);
    case Expr::Kind::Variable: {
      Monomial m;
      m.vars[e->name] = 1;
      Poly p;
      poly_add_term(p, m, 1.0);
      return p;
    }
    case Expr::Kind::Sum: {
      Poly p;
      for (const ExprPtr& k : e->kids) poly_add(p, to_poly(k, decimals, expand_powers));
      return p;
    }
    case Expr::Kind::Product: {
      Poly p = poly_const(1.0);
      for (const ExprPtr& k : e->kids) p = poly_mul(p, to_poly(k, decimals, expand_powers));
      return p;
    }
    case Expr::Kind::Power: {
      Poly base = to_poly(e->kids[0], decimals, expand_powers);
      double v;
      if (poly_as_const(base, v)) {
        double r = 1.0;
        for (int i = 0; i < e->exponent; ++i) r *= v;
        return poly_const(r);
      }
      if (expand_powers && poly_is_pure(base)) return poly_pow(base, e->exponent);
      if (e->exponent == 0) return poly_const(1.0);
      if (e->exponent == 1) return base;
      return atom_poly(make_power(from_poly(base, decimals), e->exponent));
    }
    case Expr::Kind::Unary:
      return unary_to_poly(e, decimals, expand_powers);
    case Expr::Kind::Spline: {
      Poly inner = to_poly(e->kids[0], decimals, expand_powers);
      return atom_poly(make_spline(e->payload, from_poly(inner, decimals)));
    }
  }
  throw InvalidInput("simplify: unknown node kind");
}

// Ordering of canonical terms: pure polynomial terms by descending total
// degree (per-variable exponents break ties), then opaque-bearing terms
// alphabetically by their atom keys, then the constant.
struct OrderedTerm {
  Monomial m;
  double coeff;
  int klass;  // 0 poly, 1 opaque, 2 constant
  std::string sort_key;
};

ExprPtr term_expr(const Monomial& m, double coeff) {
  std::vector<ExprPtr> factors;
  std::vector<std::pair<std::string, int>> vars(m.vars.begin(), m.vars.end());
  std::sort(vars.begin(), vars.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [name, exp] : vars) {
    ExprPtr v = make_var(name);
    factors.push_back(exp == 1 ? v : make_power(v, exp));
  }
  for (const auto& [key, atom] : m.opaque) factors.push_back(atom);

  if (factors.empty()) return make_const(coeff);
  if (coeff == 1.0 && factors.size() == 1) return factors.front();
  std::vector<ExprPtr> kids;
  if (coeff != 1.0) kids.push_back(make_const(coeff));
  kids.insert(kids.end(), factors.begin(), factors.end());
  return make_product(std::move(kids));
}

ExprPtr from_poly(const Poly& p, int decimals) {
  // Collect the variable universe so same-degree terms order consistently.
  std::vector<std::string> universe;
  {
    std::set<std::string> seen;
    for (const auto& [key, term] : p)
      for (const auto& [name, exp] : term.first.vars) seen.insert(name);
    universe.assign(seen.begin(), seen.end());
  }

  std::vector<OrderedTerm> terms;
  for (const auto& [key, term] : p) {
    const double coeff = round_to(term.second, decimals);
    if (coeff == 0.0) continue;
    OrderedTerm t{term.first, coeff, 0, {}};
    if (term.first.is_const()) {
      t.klass = 2;
    } else if (term.first.pure_poly()) {
      t.klass = 0;
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d|", 9999 - std::min(9999, term.first.degree()));
      t.sort_key = buf;
      for (const std::string& name : universe) {
        auto it = term.first.vars.find(name);
        const int exp = it == term.first.vars.end() ? 0 : it->second;
        std::snprintf(buf, sizeof buf, "%04d", 9999 - exp);
        t.sort_key += buf;
      }
    } else {
      t.klass = 1;
      for (const auto& [k, atom] : term.first.opaque) t.sort_key += k + "|";
      t.sort_key += term.first.key();
    }
    terms.push_back(std::move(t));
  }

  std::sort(terms.begin(), terms.end(), [](const OrderedTerm& a, const OrderedTerm& b) {
    if (a.klass != b.klass) return a.klass < b.klass;
    return a.sort_key < b.sort_key;
  });

  if (terms.empty()) return make_const(0.0);
  std::vector<ExprPtr> kids;
  kids.reserve(terms.size());
  for (const OrderedTerm& t : terms) kids.push_back(term_expr(t.m, t.coeff));
  return make_sum(std::move(kids));
}

}  // namespace

ExprPtr simplify(const ExprPtr& e, int decimals, bool expand_powers) {
  if (decimals < 0) throw InvalidInput("simplify: decimals must be non-negative");
  return from_poly(to_poly(e, decimals, expand_powers), decimals);
}

namespace {

ExprPtr substitute_vars(const ExprPtr& e, const std::map<std::string, ExprPtr>& subst) {
  switch (e->kind) {
    case Expr::Kind::Constant:
      return e;
    case Expr::Kind::Variable: {
      auto it = subst.find(e->name);
      if (it == subst.end())
        throw InvalidInput("denormalize: no stats for variable " + e->name);
      return it->second;
    }
    default: {
      Expr copy = *e;
      for (ExprPtr& k : copy.kids) k = substitute_vars(k, subst);
      return std::make_shared<const Expr>(std::move(copy));
    }
  }
}

}  // namespace

ExprPtr denormalize(const ExprPtr& e, const NormStats& stats, Channel target,
                    bool expand_powers) {
  std::map<std::string, ExprPtr> subst;
  for (const std::string& name : expr_variables(e)) {
    const ChannelStats& cs = stats.at(channel_from_name(name));
    // v_norm = (v - mu) / sigma, kept as a unary so simplify folds it.
    subst[name] = make_unary(CandidateId::X, make_var(name), 1.0 / cs.stddev,
                             -cs.mean / cs.stddev, 1.0, 0.0);
  }
  const ChannelStats& ys = stats.at(target);
  ExprPtr raw = substitute_vars(e, subst);
  ExprPtr wrapped =
      make_sum({make_product({make_const(ys.stddev), raw}), make_const(ys.mean)});
  // High-precision pass: re-canonicalize without visible rounding.
  return simplify(wrapped, 15, expand_powers);
}

}  // namespace kanlm
