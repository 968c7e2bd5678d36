#include "algset/estimators.hpp"

#include "algset/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace algset {

double evaluate_polynomial(const MonomialBasis& basis, const Eigen::VectorXd& coeffs,
                           const Eigen::VectorXd& x) {
    if (coeffs.size() != static_cast<Eigen::Index>(basis.size())) {
        throw std::invalid_argument("evaluate_polynomial: coefficient length mismatch");
    }
    return coeffs.dot(veronese(basis, x));
}

Eigen::VectorXd evaluate_system(const PolynomialSystem& sys, const Eigen::VectorXd& x) {
    const Eigen::VectorXd phi = veronese(sys.basis, x);
    Eigen::VectorXd values(static_cast<Eigen::Index>(sys.coeffs.size()));
    for (std::size_t j = 0; j < sys.coeffs.size(); ++j) {
        values(static_cast<Eigen::Index>(j)) = sys.coeffs[j].dot(phi);
    }
    return values;
}

// ---------------------------------------------------------------------------
// univariate machinery

namespace {

using Poly = std::vector<double>; // ascending coefficients

double horner(const Poly& p, double x) {
    double v = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
    return v;
}

double max_abs_coeff(const Poly& p) {
    double m = 0.0;
    for (double c : p) m = std::max(m, std::abs(c));
    return m;
}

Poly trim(const Poly& p, double eps) {
    Poly q = p;
    while (!q.empty() && std::abs(q.back()) <= eps) q.pop_back();
    return q;
}

Poly derivative(const Poly& p) {
    if (p.size() <= 1) return {};
    Poly d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
    return d;
}

void scale_to_unit_inf(Poly& p) {
    const double m = max_abs_coeff(p);
    if (m > 0.0) {
        for (double& c : p) c /= m;
    }
}

// remainder of a mod b (deg b >= 1, leading coefficient of b nonzero)
Poly remainder(Poly a, const Poly& b) {
    const std::size_t db = b.size() - 1;
    const double lead = b.back();
    while (a.size() > db) {
        const double q = a.back() / lead;
        const std::size_t shift = a.size() - 1 - db;
        for (std::size_t i = 0; i < db; ++i) a[shift + i] -= q * b[i];
        a.pop_back();
    }
    return a;
}

std::vector<Poly> sturm_chain(const Poly& p) {
    std::vector<Poly> chain;
    Poly p0 = p;
    scale_to_unit_inf(p0);
    chain.push_back(p0);
    Poly p1 = trim(derivative(p0), 0.0);
    if (p1.empty()) return chain;
    scale_to_unit_inf(p1);
    chain.push_back(p1);
    while (chain.back().size() >= 2) {
        Poly r = remainder(chain[chain.size() - 2], chain.back());
        r = trim(r, 1e-13);
        if (r.empty()) break; // gcd reached (multiple roots)
        for (double& c : r) c = -c;
        scale_to_unit_inf(r);
        chain.push_back(std::move(r));
    }
    return chain;
}

int sign_changes(const std::vector<Poly>& chain, double x) {
    int changes = 0;
    int last = 0;
    for (const Poly& q : chain) {
        const double v = horner(q, x);
        const int s = (v > 0.0) - (v < 0.0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

// distinct roots in (a, b]
int count_roots(const std::vector<Poly>& chain, double a, double b) {
    return sign_changes(chain, a) - sign_changes(chain, b);
}

void isolate(const std::vector<Poly>& chain, double a, double b, double min_width,
             std::vector<std::pair<double, double>>& out) {
    const int count = count_roots(chain, a, b);
    if (count <= 0) return;
    if (count == 1 || b - a <= min_width) {
        out.emplace_back(a, b);
        return;
    }
    double mid = 0.5 * (a + b);
    // avoid splitting exactly at a root of the first chain element
    if (std::abs(horner(chain.front(), mid)) <= 1e-300) mid += 1e-3 * (b - a);
    isolate(chain, a, mid, min_width, out);
    isolate(chain, mid, b, min_width, out);
}

double bisect_refine(const Poly& p, double lo, double hi) {
    double flo = horner(p, lo);
    if (flo == 0.0) return lo;
    for (int iter = 0; iter < 200 && hi - lo > 1e-16 * (1.0 + std::abs(hi)); ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = horner(p, mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double newton_polish(const Poly& p, const Poly& dp, double x, double lo, double hi) {
    double best = x;
    double best_val = std::abs(horner(p, x));
    for (int iter = 0; iter < 12; ++iter) {
        const double d = horner(dp, x);
        if (d == 0.0) break;
        double next = x - horner(p, x) / d;
        if (next < lo || next > hi || !std::isfinite(next)) break;
        x = next;
        const double v = std::abs(horner(p, x));
        if (v < best_val) {
            best_val = v;
            best = x;
        } else {
            break;
        }
    }
    return best;
}

void collect_roots(const Poly& p, double a, double b, double tol_abs, int depth,
                   std::vector<double>& out);

// exactly one distinct root of p in [lo, hi]
void refine_isolated(const Poly& p, const Poly& dp, double lo, double hi, double tol_abs,
                     int depth, std::vector<double>& out) {
    const double flo = horner(p, lo);
    const double fhi = horner(p, hi);
    if ((flo > 0.0) != (fhi > 0.0) || flo == 0.0 || fhi == 0.0) {
        double x = bisect_refine(p, lo, hi);
        x = newton_polish(p, dp, x, lo, hi);
        out.push_back(x);
        return;
    }
    // even multiplicity: the touch point is a root of the derivative
    std::vector<double> candidates;
    if (depth < 8 && dp.size() >= 2) {
        collect_roots(dp, lo, hi, tol_abs, depth + 1, candidates);
    }
    candidates.push_back(lo);
    candidates.push_back(hi);
    candidates.push_back(0.5 * (lo + hi));
    double best = candidates.front();
    double best_val = std::abs(horner(p, best));
    for (double c : candidates) {
        const double v = std::abs(horner(p, c));
        if (v < best_val) {
            best_val = v;
            best = c;
        }
    }
    if (best_val <= tol_abs) out.push_back(best);
}

void collect_roots(const Poly& p, double a, double b, double tol_abs, int depth,
                   std::vector<double>& out) {
    const double scale = max_abs_coeff(p);
    if (scale == 0.0) return;
    Poly q = trim(p, 1e-14 * scale);
    if (q.size() <= 1) return; // nonzero constant
    if (q.size() == 2) {
        const double r = -q[0] / q[1];
        if (r >= a && r <= b) out.push_back(r);
        return;
    }

    const double span = b - a;
    const double pad = 1e-9 * (span + 1.0);
    const auto chain = sturm_chain(q);
    const Poly& p0 = chain.front();
    const Poly dp0 = derivative(p0);

    std::vector<std::pair<double, double>> intervals;
    isolate(chain, a - pad, b + pad, 1e-13 * (span + 1.0), intervals);
    for (const auto& [lo, hi] : intervals) {
        refine_isolated(p0, dp0, lo, hi, tol_abs / std::max(scale, 1e-300), depth, out);
    }
}

} // namespace

RootResult real_roots_univariate(const std::vector<double>& coeffs, double a, double b,
                                 double tol) {
    if (!(a <= b)) throw std::invalid_argument("real_roots_univariate: empty interval");
    RootResult result;
    const double scale = max_abs_coeff(coeffs);
    if (scale == 0.0) {
        result.identically_zero = true;
        return result;
    }

    std::vector<double> raw;
    collect_roots(coeffs, a, b, tol * scale, 0, raw);

    // endpoints count as roots when the polynomial vanishes there
    for (double e : {a, b}) {
        if (std::abs(horner(coeffs, e)) <= tol * scale) raw.push_back(e);
    }

    std::sort(raw.begin(), raw.end());
    const double dedupe = 1e-9 * (b - a + 1.0);
    for (double r : raw) {
        r = std::clamp(r, a, b);
        if (std::abs(horner(coeffs, r)) > tol * scale) continue;
        if (!result.roots.empty() && r - result.roots.back() <= dedupe) continue;
        result.roots.push_back(r);
    }
    return result;
}

// ---------------------------------------------------------------------------
// zero-set slicing

namespace {

// restriction of a bivariate polynomial to a fixed first coordinate; the
// returned univariate polynomial is in the second coordinate (axis = 0
// fixes x and returns a polynomial in y; axis = 1 the other way around)
Poly restrict_to_axis(const MonomialBasis& basis, const Eigen::VectorXd& coeffs, int axis,
                      double fixed) {
    Poly out(static_cast<std::size_t>(basis.degree()) + 1, 0.0);
    for (std::size_t r = 0; r < basis.size(); ++r) {
        const auto vars = basis.at(r).variables();
        const int fixed_exp = axis == 0 ? vars[0] : vars[1];
        const int free_exp = axis == 0 ? vars[1] : vars[0];
        out[static_cast<std::size_t>(free_exp)] +=
            coeffs(static_cast<Eigen::Index>(r)) * ipow(fixed, fixed_exp);
    }
    return out;
}

} // namespace

std::vector<Eigen::Vector2d> zero_set_slice_2d(const PolynomialSystem& sys, const Window2d& window,
                                               int resolution) {
    if (sys.basis.dimension() != 2) {
        throw std::invalid_argument("zero_set_slice_2d: only d = 2 is supported");
    }
    if (sys.coeffs.empty()) throw std::invalid_argument("zero_set_slice_2d: empty system");
    if (resolution < 2) throw std::invalid_argument("zero_set_slice_2d: resolution >= 2 required");

    double coeff_scale = 0.0;
    for (const auto& c : sys.coeffs) coeff_scale = std::max(coeff_scale, c.cwiseAbs().maxCoeff());
    const double tol_join = 1e-6 * coeff_scale;

    std::vector<Eigen::Vector2d> points;
    auto sweep = [&](int axis) {
        const double lo = axis == 0 ? window.x_min : window.y_min;
        const double hi = axis == 0 ? window.x_max : window.y_max;
        const double free_lo = axis == 0 ? window.y_min : window.x_min;
        const double free_hi = axis == 0 ? window.y_max : window.x_max;
        for (int i = 0; i < resolution; ++i) {
            const double fixed =
                lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1);
            std::vector<double> candidates;
            for (const auto& c : sys.coeffs) {
                const Poly restricted = restrict_to_axis(sys.basis, c, axis, fixed);
                const RootResult rr = real_roots_univariate(restricted, free_lo, free_hi, 1e-12);
                if (rr.identically_zero) continue;
                candidates.insert(candidates.end(), rr.roots.begin(), rr.roots.end());
            }
            std::sort(candidates.begin(), candidates.end());
            for (double t : candidates) {
                Eigen::Vector2d p = axis == 0 ? Eigen::Vector2d(fixed, t) : Eigen::Vector2d(t, fixed);
                if (evaluate_system(sys, p).cwiseAbs().maxCoeff() <= tol_join) {
                    if (!points.empty() && (points.back() - p).norm() <= 1e-12) continue;
                    points.push_back(p);
                }
            }
        }
    };
    sweep(0);
    sweep(1);
    return points;
}

// ---------------------------------------------------------------------------
// semi-algebraic tube

double default_lambda(double n) {
    if (!(n >= 2.0)) throw std::invalid_argument("default_lambda: n >= 2 required");
    return std::log(n) / std::sqrt(n);
}

bool tube_membership(const PolynomialSystem& sys, const Eigen::VectorXd& x, double lambda) {
    if (lambda <= 0.0) throw std::invalid_argument("tube_membership: lambda must be > 0");
    return evaluate_system(sys, x).cwiseAbs().maxCoeff() <= lambda;
}

namespace {

struct SegmentAccumulator {
    int resolution;
    std::map<std::int64_t, Eigen::Vector2d> edge_points;
    std::vector<std::pair<std::int64_t, std::int64_t>> segments;

    std::int64_t edge_key(int i, int j, bool vertical) const {
        return (static_cast<std::int64_t>(j) * resolution + i) * 2 + (vertical ? 1 : 0);
    }
};

} // namespace

std::vector<Polyline> tube_contour_2d(const PolynomialSystem& sys, double lambda,
                                      const Window2d& window, int resolution) {
    if (sys.basis.dimension() != 2) {
        throw std::invalid_argument("tube_contour_2d: only d = 2 is supported");
    }
    if (resolution < 2) throw std::invalid_argument("tube_contour_2d: resolution >= 2 required");
    if (lambda <= 0.0) throw std::invalid_argument("tube_contour_2d: lambda must be > 0");

    const int n = resolution;
    auto xs = [&](int i) {
        return window.x_min + (window.x_max - window.x_min) * i / static_cast<double>(n - 1);
    };
    auto ys = [&](int j) {
        return window.y_min + (window.y_max - window.y_min) * j / static_cast<double>(n - 1);
    };
    auto level = [&](double x, double y) {
        return evaluate_system(sys, Eigen::Vector2d(x, y)).cwiseAbs().maxCoeff() - lambda;
    };

    Eigen::MatrixXd f(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f(i, j) = level(xs(i), ys(j));

    SegmentAccumulator acc;
    acc.resolution = n;

    auto corner_inside = [&](int i, int j) { return f(i, j) < 0.0; };
    auto edge_point = [&](int i0, int j0, int i1, int j1, bool vertical,
                          int ei, int ej) -> std::int64_t {
        const std::int64_t key = acc.edge_key(ei, ej, vertical);
        if (acc.edge_points.find(key) == acc.edge_points.end()) {
            const double f0 = f(i0, j0);
            const double f1 = f(i1, j1);
            const double t = f0 / (f0 - f1);
            const Eigen::Vector2d a(xs(i0), ys(j0));
            const Eigen::Vector2d b(xs(i1), ys(j1));
            acc.edge_points.emplace(key, a + t * (b - a));
        }
        return key;
    };

    for (int i = 0; i + 1 < n; ++i) {
        for (int j = 0; j + 1 < n; ++j) {
            const bool c0 = corner_inside(i, j);
            const bool c1 = corner_inside(i + 1, j);
            const bool c2 = corner_inside(i + 1, j + 1);
            const bool c3 = corner_inside(i, j + 1);

            // crossed edges: bottom, right, top, left
            std::vector<std::int64_t> crossed;
            std::int64_t e0 = 0, e1 = 0, e2 = 0, e3 = 0;
            const bool b0 = c0 != c1, b1 = c1 != c2, b2 = c3 != c2, b3 = c0 != c3;
            if (b0) crossed.push_back(e0 = edge_point(i, j, i + 1, j, false, i, j));
            if (b1) crossed.push_back(e1 = edge_point(i + 1, j, i + 1, j + 1, true, i + 1, j));
            if (b2) crossed.push_back(e2 = edge_point(i, j + 1, i + 1, j + 1, false, i, j + 1));
            if (b3) crossed.push_back(e3 = edge_point(i, j, i, j + 1, true, i, j));

            if (crossed.size() == 2) {
                acc.segments.emplace_back(crossed[0], crossed[1]);
            } else if (crossed.size() == 4) {
                // ambiguous saddle: resolve with the true level at the center.
                // The isolated corner pair determines the pairing: corners
                // c1/c3 isolated -> (bottom,right)+(top,left); corners c0/c2
                // isolated -> (bottom,left)+(right,top).
                const double fc = level(0.5 * (xs(i) + xs(i + 1)), 0.5 * (ys(j) + ys(j + 1)));
                const bool center_inside = fc < 0.0;
                const bool diag02 = c0; // inside corners on the c0-c2 diagonal
                if (center_inside == diag02) {
                    acc.segments.emplace_back(e0, e1);
                    acc.segments.emplace_back(e2, e3);
                } else {
                    acc.segments.emplace_back(e0, e3);
                    acc.segments.emplace_back(e1, e2);
                }
            }
        }
    }

    // chain segments into polylines
    std::map<std::int64_t, std::vector<std::size_t>> adjacency;
    for (std::size_t s = 0; s < acc.segments.size(); ++s) {
        adjacency[acc.segments[s].first].push_back(s);
        adjacency[acc.segments[s].second].push_back(s);
    }

    std::vector<bool> used(acc.segments.size(), false);
    std::vector<Polyline> polylines;

    auto walk = [&](std::size_t start_seg, std::int64_t start_key) {
        Polyline line;
        line.points.push_back(acc.edge_points.at(start_key));
        std::size_t seg = start_seg;
        std::int64_t key = start_key;
        while (true) {
            used[seg] = true;
            const auto [a, b] = acc.segments[seg];
            key = (key == a) ? b : a;
            line.points.push_back(acc.edge_points.at(key));
            std::size_t next = seg;
            for (std::size_t cand : adjacency[key]) {
                if (!used[cand]) {
                    next = cand;
                    break;
                }
            }
            if (next == seg) break;
            seg = next;
        }
        line.closed = (key == start_key) && line.points.size() > 2;
        if (line.closed) line.points.back() = line.points.front();
        return line;
    };

    // open chains first (endpoints of degree 1), then the remaining loops
    for (std::size_t s = 0; s < acc.segments.size(); ++s) {
        if (used[s]) continue;
        const auto [a, b] = acc.segments[s];
        if (adjacency[a].size() == 1) {
            polylines.push_back(walk(s, a));
        } else if (adjacency[b].size() == 1) {
            polylines.push_back(walk(s, b));
        }
    }
    for (std::size_t s = 0; s < acc.segments.size(); ++s) {
        if (!used[s]) polylines.push_back(walk(s, acc.segments[s].first));
    }
    return polylines;
}

// ---------------------------------------------------------------------------
// structure-aware projection

int FactorStructure::total_degree() const {
    return std::accumulate(degrees.begin(), degrees.end(), 0);
}

Eigen::VectorXd multiply_polynomials(const MonomialBasis& basis_p, const Eigen::VectorXd& p,
                                     const MonomialBasis& basis_q, const Eigen::VectorXd& q,
                                     const MonomialBasis& basis_out) {
    if (basis_p.dimension() != basis_q.dimension() ||
        basis_p.dimension() != basis_out.dimension()) {
        throw std::invalid_argument("multiply_polynomials: shared dimension required");
    }
    if (basis_out.degree() != basis_p.degree() + basis_q.degree()) {
        throw std::invalid_argument("multiply_polynomials: output degree must be g1 + g2");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_out.size()));
    for (std::size_t rp = 0; rp < basis_p.size(); ++rp) {
        const double cp = p(static_cast<Eigen::Index>(rp));
        if (cp == 0.0) continue;
        const auto vp = basis_p.at(rp).variables();
        for (std::size_t rq = 0; rq < basis_q.size(); ++rq) {
            const double cq = q(static_cast<Eigen::Index>(rq));
            if (cq == 0.0) continue;
            const auto vq = basis_q.at(rq).variables();
            std::vector<int> sum(vp.size());
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = vp[k] + vq[k];
            out(static_cast<Eigen::Index>(basis_out.rank_of_variables(sum))) += cp * cq;
        }
    }
    return out;
}

Eigen::VectorXd canonical_sign(const MonomialBasis& basis, Eigen::VectorXd coeffs) {
    const double floor = 1e-10 * coeffs.cwiseAbs().maxCoeff();
    int top_degree = -1;
    Eigen::Index lead = -1;
    for (std::size_t r = 0; r < basis.size(); ++r) {
        const auto rr = static_cast<Eigen::Index>(r);
        if (std::abs(coeffs(rr)) <= floor) continue;
        const int deg = basis.at(r).monomial_degree();
        if (deg > top_degree) {
            top_degree = deg;
            lead = rr;
        }
    }
    if (lead >= 0 && coeffs(lead) < 0.0) coeffs = -coeffs;
    return coeffs;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct BasisCache {
    int d;
    std::map<int, MonomialBasis> by_degree;

    const MonomialBasis& of_degree(int g) {
        auto it = by_degree.find(g);
        if (it == by_degree.end()) it = by_degree.emplace(g, MonomialBasis::build(d, g)).first;
        return it->second;
    }
};

} // namespace

namespace {

struct BlockDescentOutcome {
    bool degenerate = false;
    double scale = 1.0;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<Eigen::VectorXd> factors;
};

BlockDescentOutcome run_block_descent(const MonomialBasis& basis, const Eigen::VectorXd& u,
                                      const FactorStructure& structure,
                                      const std::vector<const MonomialBasis*>& factor_bases,
                                      BasisCache& cache, std::vector<Eigen::VectorXd> factors,
                                      int max_iters, double tol) {
    const int m = static_cast<int>(structure.degrees.size());
    const double u_norm = u.norm();

    BlockDescentOutcome out;
    out.factors = std::move(factors);
    double prev_residual = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iters; ++iter) {
        for (int t = 0; t < m; ++t) {
            // cofactor: product of all factors except the active one
            Eigen::VectorXd acc;
            const MonomialBasis* acc_basis = nullptr;
            int acc_degree = 0;
            for (int jf = 0; jf < m; ++jf) {
                if (jf == t) continue;
                const auto jfs = static_cast<std::size_t>(jf);
                if (acc_basis == nullptr) {
                    acc = out.factors[jfs];
                    acc_degree = structure.degrees[jfs];
                    acc_basis = factor_bases[jfs];
                } else {
                    const MonomialBasis& next = cache.of_degree(acc_degree + structure.degrees[jfs]);
                    acc = multiply_polynomials(*acc_basis, acc, *factor_bases[jfs], out.factors[jfs],
                                               next);
                    acc_degree += structure.degrees[jfs];
                    acc_basis = &next;
                }
            }
            if (!acc.allFinite() || acc.norm() <= 1e-12) {
                out.degenerate = true;
                return out;
            }

            // multiplication by the cofactor is linear in the active factor
            const MonomialBasis& bt = *factor_bases[static_cast<std::size_t>(t)];
            Eigen::MatrixXd design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.size()),
                                                           static_cast<Eigen::Index>(bt.size()));
            for (std::size_t rc = 0; rc < acc_basis->size(); ++rc) {
                const double cc = acc(static_cast<Eigen::Index>(rc));
                if (cc == 0.0) continue;
                const auto vc = acc_basis->at(rc).variables();
                for (std::size_t rt = 0; rt < bt.size(); ++rt) {
                    const auto vt = bt.at(rt).variables();
                    std::vector<int> sum(vc.size());
                    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = vc[k] + vt[k];
                    design(static_cast<Eigen::Index>(basis.rank_of_variables(sum)),
                           static_cast<Eigen::Index>(rt)) += cc;
                }
            }

            // normal equations with a small ridge to survive near-rank-deficiency
            Eigen::MatrixXd normal = design.transpose() * design;
            normal.diagonal().array() += 1e-12;
            const Eigen::VectorXd solution = normal.ldlt().solve(design.transpose() * u);
            if (!solution.allFinite() || solution.norm() <= 1e-14 * u_norm) {
                out.degenerate = true;
                return out;
            }
            out.residual = (design * solution - u).norm();
            out.scale = solution.norm();
            out.factors[static_cast<std::size_t>(t)] = solution / out.scale;
        }
        if (prev_residual - out.residual < tol) break;
        prev_residual = out.residual;
    }
    return out;
}

} // namespace

FactoredPolynomial project_factorized(const MonomialBasis& basis, const Eigen::VectorXd& u,
                                      const FactorStructure& structure,
                                      const ProjectionOptions& opts) {
    const int m = static_cast<int>(structure.degrees.size());
    if (m < 2) throw std::invalid_argument("project_factorized: at least two factors required");
    for (int g : structure.degrees) {
        if (g < 1) throw std::invalid_argument("project_factorized: factor degrees must be >= 1");
    }
    if (structure.total_degree() != basis.degree()) {
        throw std::invalid_argument("project_factorized: factor degrees must sum to the basis degree");
    }
    if (u.size() != static_cast<Eigen::Index>(basis.size())) {
        throw std::invalid_argument("project_factorized: coefficient length mismatch");
    }
    if (u.norm() == 0.0) throw std::invalid_argument("project_factorized: zero target");

    BasisCache cache{basis.dimension(), {}};
    std::vector<const MonomialBasis*> factor_bases;
    factor_bases.reserve(static_cast<std::size_t>(m));
    for (int g : structure.degrees) factor_bases.push_back(&cache.of_degree(g));

    bool have_result = false;
    BlockDescentOutcome best;

    for (int restart = 0; restart < opts.restarts; ++restart) {
        BlockDescentOutcome outcome;
        outcome.degenerate = true;
        for (int attempt = 0; attempt < 3 && outcome.degenerate; ++attempt) {
            GaussianSampler rng(mix_seed(opts.seed, static_cast<std::uint64_t>(restart),
                                         static_cast<std::uint64_t>(attempt)));
            std::vector<Eigen::VectorXd> init;
            init.reserve(static_cast<std::size_t>(m));
            for (int t = 0; t < m; ++t) {
                Eigen::VectorXd v = rng.normal_vector(
                    static_cast<int>(factor_bases[static_cast<std::size_t>(t)]->size()));
                init.push_back(v.normalized());
            }
            outcome = run_block_descent(basis, u, structure, factor_bases, cache, std::move(init),
                                        opts.max_iters, opts.tol);
        }
        if (outcome.degenerate) continue;
        // lexicographic (residual, restart index) tie-break keeps the result
        // independent of any parallel restart schedule
        if (!have_result || outcome.residual < best.residual) {
            best = std::move(outcome);
            have_result = true;
        }
    }
    if (!have_result) {
        throw std::runtime_error("project_factorized: all restarts degenerate");
    }

    FactoredPolynomial fp;
    fp.scale = best.scale;
    fp.residual = best.residual;
    fp.factors = std::move(best.factors);

    // resolve sign/order ambiguity for reporting
    for (std::size_t t = 0; t < fp.factors.size(); ++t) {
        const Eigen::VectorXd canon =
            canonical_sign(*factor_bases[t], fp.factors[t]);
        if ((canon - fp.factors[t]).cwiseAbs().maxCoeff() > 0.0) fp.scale = -fp.scale;
        fp.factors[t] = canon;
    }
    std::vector<std::size_t> order(fp.factors.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (structure.degrees[a] != structure.degrees[b]) {
            return structure.degrees[a] < structure.degrees[b];
        }
        const auto& fa = fp.factors[a];
        const auto& fb = fp.factors[b];
        return std::lexicographical_compare(fa.data(), fa.data() + fa.size(), fb.data(),
                                            fb.data() + fb.size());
    });
    std::vector<Eigen::VectorXd> sorted;
    sorted.reserve(fp.factors.size());
    for (std::size_t i : order) sorted.push_back(fp.factors[i]);
    fp.factors = std::move(sorted);
    return fp;
}

Eigen::VectorXd expand_factored(const MonomialBasis& basis, const FactoredPolynomial& fp,
                                const FactorStructure& structure) {
    BasisCache cache{basis.dimension(), {}};
    Eigen::VectorXd acc;
    const MonomialBasis* acc_basis = nullptr;
    int acc_degree = 0;
    for (std::size_t jf = 0; jf < fp.factors.size(); ++jf) {
        const MonomialBasis& bj = cache.of_degree(structure.degrees[jf]);
        if (acc_basis == nullptr) {
            acc = fp.factors[jf];
            acc_degree = structure.degrees[jf];
            acc_basis = &bj;
        } else {
            const MonomialBasis& next = cache.of_degree(acc_degree + structure.degrees[jf]);
            acc = multiply_polynomials(*acc_basis, acc, bj, fp.factors[jf], next);
            acc_degree += structure.degrees[jf];
            acc_basis = &next;
        }
    }
    return fp.scale * acc;
}

StructuredSystem structured_system(const MonomialBasis& basis, const KernelEstimate& kernel,
                                   const FactorStructure& structure,
                                   const ProjectionOptions& opts) {
    if (kernel.k_hat < 1) {
        throw std::invalid_argument("structured_system: empty kernel estimate");
    }
    StructuredSystem out{PolynomialSystem{basis, {}}, {}};
    for (std::size_t j = 0; j < kernel.k_hat; ++j) {
        ProjectionOptions col_opts = opts;
        col_opts.seed = mix_seed(opts.seed, 0x5e7ULL, j);
        const Eigen::VectorXd u = kernel.vectors.col(static_cast<Eigen::Index>(j));
        FactoredPolynomial fp = project_factorized(basis, u, structure, col_opts);
        Eigen::VectorXd expanded = expand_factored(basis, fp, structure);
        const double norm = expanded.norm();
        if (norm > 0.0) expanded /= norm;
        out.system.coeffs.push_back(canonical_sign(basis, expanded));
        out.factorizations.push_back(std::move(fp));
    }
    return out;
}

} // namespace algset
