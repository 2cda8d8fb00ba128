#include "spherekit/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <mutex>

namespace spherekit {

namespace {

// Requested tolerances are clamped to the rounding noise of a g-point
// sampled problem; GE cannot certify residuals below that.
inline double resid_floor(int g) { return g * std::numeric_limits<double>::epsilon(); }

// A residual plateau at or below this level (relative to vscale) that grid
// doubling fails to improve is treated as converged-at-roundoff.
constexpr double kPlateauAccept = 256 * std::numeric_limits<double>::epsilon();

std::mutex& growth_mutex() {
    static std::mutex m;
    return m;
}

std::vector<std::pair<double, double>>& growth_store() {
    static std::vector<std::pair<double, double>> v;
    return v;
}

void log_growth(double alpha, double ratio) {
    std::lock_guard<std::mutex> lock(growth_mutex());
    growth_store().emplace_back(alpha, ratio);
}

bool trace_enabled() {
    static const bool on = std::getenv("SPHEREKIT_TRACE") != nullptr;
    return on;
}

}  // namespace

std::vector<std::pair<double, double>> growth_log() {
    std::lock_guard<std::mutex> lock(growth_mutex());
    return growth_store();
}

void clear_growth_log() {
    std::lock_guard<std::mutex> lock(growth_mutex());
    growth_store().clear();
}

std::pair<double, double> sv_2x2(complex a, complex b) {
    const double sp = std::abs(a + b);
    const double sm = std::abs(a - b);
    return {std::max(sp, sm), std::min(sp, sm)};
}

std::pair<complex, complex> pinv_2x2(complex a, complex b, double alpha) {
    const complex s = a + b;
    const complex d = a - b;
    const double sp = std::abs(s);
    const double dp = std::abs(d);
    if (sp == 0.0 && dp == 0.0) throw pivot_error("pinv_2x2: zero pivot matrix");
    // Exactly-singular directions are never inverted, independent of alpha.
    if (dp == 0.0) return {1.0 / s, complex{}};
    if (sp == 0.0) return {complex{}, 1.0 / d};
    if (dp < alpha * sp) return {1.0 / s, complex{}};
    if (sp < alpha * dp) return {complex{}, 1.0 / d};
    return {1.0 / s, 1.0 / d};
}

ZeroOutResult pole_zero_out(std::function<complex(double, double)> f_doubled, double lambda0) {
    ZeroOutResult r;
    r.lambda0 = lambda0;
    r.captured_col = [f_doubled, lambda0](double theta) { return f_doubled(lambda0, theta); };
    r.residual = [f_doubled, lambda0](double lambda, double theta) {
        return f_doubled(lambda, theta) - f_doubled(lambda0, theta);
    };
    return r;
}

std::optional<PivotBlock> pivot_search(const BMCGrid& residual, double alpha) {
    const int m = residual.rows, n = residual.cols;
    double best = 0;
    int best_jt = -1, best_k = -1;
    // theta* sweeps 0..pi in ascending order: grid rows m/2..m-1, then the
    // -pi row standing in for theta* = pi. lambda* sweeps [0,pi) ascending.
    for (int t = 0; t <= m / 2; ++t) {
        const int j = (m / 2 + t) % m;
        for (int k = n / 2; k < n; ++k) {
            const complex a = residual.at(j, k - n / 2);
            const complex b = residual.at(j, k);
            const double s1 = std::max(std::abs(a + b), std::abs(a - b));
            if (s1 > best) {
                best = s1;
                best_jt = t;
                best_k = k;
            }
        }
    }
    if (best == 0.0) return std::nullopt;
    const int j = (m / 2 + best_jt) % m;
    PivotBlock p;
    p.theta_star = kTwoPi * best_jt / m;  // in [0,pi]
    p.lambda_star = residual.lambda(best_k);
    p.a = residual.at(j, best_k - n / 2);
    p.b = residual.at(j, best_k);
    std::tie(p.m_even, p.m_odd) = pinv_2x2(p.a, p.b, alpha);
    return p;
}

namespace {

int locate_on_grid(double x, double x0, double step, int count, const char* what) {
    const double t = (x - x0) / step;
    const long idx = std::lround(t);
    if (std::abs(t - static_cast<double>(idx)) > 1e-9)
        throw index_error(std::string(what) + ": pivot coordinate is not a grid node");
    const long wrapped = ((idx % count) + count) % count;
    return static_cast<int>(wrapped);
}

}  // namespace

BMCGrid ge_step(const BMCGrid& residual, const PivotBlock& p) {
    const int m = residual.rows, n = residual.cols;
    const int js = locate_on_grid(p.theta_star, -kPi, kTwoPi / m, m, "ge_step theta");
    const int ks = locate_on_grid(p.lambda_star, -kPi, kTwoPi / n, n, "ge_step lambda");
    const int jm = (m - js) % m;           // -theta*
    const int km = (ks + n / 2) % n;       // lambda* - pi

    std::vector<complex> ce(m), co(m), re(n), ro(n);
    for (int j = 0; j < m; ++j) {
        const complex cm = residual.at(j, km);
        const complex cp = residual.at(j, ks);
        ce[j] = cm + cp;
        co[j] = cm - cp;
    }
    for (int k = 0; k < n; ++k) {
        const complex rp = residual.at(js, k);
        const complex rm = residual.at(jm, k);
        re[k] = rp + rm;
        ro[k] = rp - rm;
    }
    const complex de = 0.5 * p.m_even;
    const complex dodd = 0.5 * p.m_odd;
    const bool has_e = p.m_even != complex{};
    const bool has_o = p.m_odd != complex{};

    BMCGrid out = residual;
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < n; ++k) {
            complex upd{};
            if (has_e) upd += de * ce[j] * re[k];
            if (has_o) upd += dodd * co[j] * ro[k];
            out.at(j, k) -= upd;
        }
    }
    return out;
}

double vscale_estimate(const sphere_fn& f, int g) {
    if (g < 16 || g % 2 != 0) throw size_error("vscale_estimate: grid must be even and >= 16");
    double m = 0;
    for (int i = 0; i <= g / 2; ++i) {
        const double theta = kTwoPi * i / g;
        for (int k = 0; k < g; ++k)
            m = std::max(m, std::abs(f(-kPi + kTwoPi * k / g, theta)));
    }
    return m;
}

namespace {

// Internal pivot bookkeeping on the phase-1 grid: indices are exact node
// positions, so their fine-grid images stay exact under doubling.
struct GePivot {
    int it = 0;  // theta index, theta* = 2*pi*it/g, 0..g/2
    int kl = 0;  // lambda index on the doubled grid, lambda* in [0,pi)
    complex a{}, b{}, m_even{}, m_odd{};
};

struct Phase1Run {
    enum class Status { converged, stagnated, rank_exceeded, zero_function } status;
    double vscale = 0;
    double tau = 0;            // absolute termination threshold used
    double reached_floor = 0;  // smallest residual max seen
    bool zero_out = false;
    int k0 = -1;               // zero-out column index
    std::vector<GePivot> pivots;
    double max_growth = 0;
    int term_count = 0;
};

bool tails_ok(const CoeffVec& c, double tau) {
    const int n = c.size();
    const int t = std::max(1, n / 16);
    for (int i = 0; i < t; ++i)
        if (std::abs(c[i]) > tau || std::abs(c[n - 1 - i]) > tau) return false;
    return true;
}

std::vector<complex> extend_half_circle(const std::vector<complex>& s, int m, Parity p) {
    // s holds theta = 0..pi inclusive (m/2 + 1 samples); mirror to the full
    // circle with the term's parity.
    std::vector<complex> full(m);
    for (int t = 0; t < m; ++t) {
        if (t >= m / 2) {
            full[t] = s[t - m / 2];
        } else {
            const complex v = s[m / 2 - t];
            full[t] = (p == Parity::even) ? v : -v;
        }
    }
    return full;
}

// The pivot decisions are only trustworthy if the grid resolves f: aliased
// samples converge on-grid while hiding rank. Checks Fourier tails of the
// sampled rows and of the even/odd column combinations.
bool grid_resolved(const std::vector<complex>& e, int h, int g, double tau) {
    std::vector<complex> row(g);
    for (int i = 0; i < h; ++i) {
        std::copy(e.begin() + static_cast<size_t>(i) * g, e.begin() + static_cast<size_t>(i + 1) * g,
                  row.begin());
        if (!tails_ok(analyze_1d(row), tau)) return false;
    }
    std::vector<complex> ce(h), co(h);
    for (int k = 0; k < g / 2; ++k) {
        for (int i = 0; i < h; ++i) {
            const complex a = e[static_cast<size_t>(i) * g + k];
            const complex b = e[static_cast<size_t>(i) * g + k + g / 2];
            ce[i] = a + b;
            co[i] = a - b;
        }
        if (!tails_ok(analyze_1d(extend_half_circle(ce, g, Parity::even)), tau)) return false;
        if (!tails_ok(analyze_1d(extend_half_circle(co, g, Parity::odd)), tau)) return false;
    }
    return true;
}

// Runs sampling + zero-out + pivoted GE on one g x g grid (upper half only;
// the lower half is implied by the glide symmetry).
Phase1Run phase1_on_grid(const sphere_fn& f, const ConstructorConfig& cfg, int g,
                         double tol_rel) {
    Phase1Run run;
    const int h = g / 2 + 1;
    std::vector<complex> e(static_cast<size_t>(h) * g);
    for (int i = 0; i < h; ++i) {
        const double theta = kTwoPi * i / g;
        for (int k = 0; k < g; ++k) e[static_cast<size_t>(i) * g + k] = f(-kPi + kTwoPi * k / g, theta);
    }
    double vscale = 0;
    for (const complex& x : e) vscale = std::max(vscale, std::abs(x));
    run.vscale = vscale;
    if (vscale == 0.0) {
        run.status = Phase1Run::Status::zero_function;
        return run;
    }
    const double tau = std::max(tol_rel, resid_floor(g)) * vscale;
    run.tau = tau;

    if (!grid_resolved(e, h, g, tau)) {
        run.status = Phase1Run::Status::stagnated;
        return run;
    }

    auto max_abs = [&]() {
        double m = 0;
        for (const complex& x : e) m = std::max(m, std::abs(x));
        return m;
    };

    // Pole correction: only needed when the pole rows (theta = 0 and pi)
    // carry values; afterwards every GE term vanishes there. The captured
    // column is glide-symmetrized, (f~(l0,.) + f~(l0-pi,.))/2, which is the
    // even part of the slice: it zeroes both pole rows exactly, keeps the
    // residual BMC, and is a plain GE step pivoted on a pole row.
    double pole_mag = 0;
    for (int k = 0; k < g; ++k) {
        pole_mag = std::max(pole_mag, std::abs(e[k]));
        pole_mag = std::max(pole_mag, std::abs(e[static_cast<size_t>(h - 1) * g + k]));
    }
    if (pole_mag > tau) {
        int k0 = 0;
        double best = -1;
        for (int k = 0; k < g; ++k) {
            double colmax = 0;
            for (int i = 0; i < h; ++i) colmax = std::max(colmax, std::abs(e[static_cast<size_t>(i) * g + k]));
            if (colmax > best) {
                best = colmax;
                k0 = k;
            }
        }
        const int k0m = (k0 + g / 2) % g;
        std::vector<complex> z(h);
        for (int i = 0; i < h; ++i)
            z[i] = 0.5 * (e[static_cast<size_t>(i) * g + k0] + e[static_cast<size_t>(i) * g + k0m]);
        for (int i = 0; i < h; ++i)
            for (int k = 0; k < g; ++k) e[static_cast<size_t>(i) * g + k] -= z[i];
        run.zero_out = true;
        run.k0 = k0;
        run.term_count = 1;
    }

    double resid = max_abs();
    run.reached_floor = resid;
    // Plateau bookkeeping: GE cannot certify residuals below its own
    // rounding noise, so once progress stalls at that level the run is
    // accepted at the best point reached.
    double floor_best = resid;
    size_t best_pivots = 0;
    int best_terms = run.term_count;
    int since_improve = 0;
    int steps = 0;
    while (true) {
        if (resid <= tau) {
            run.status = Phase1Run::Status::converged;
            return run;
        }
        if (since_improve >= 4 && floor_best <= kPlateauAccept * vscale) {
            run.pivots.resize(best_pivots);
            run.term_count = best_terms;
            run.tau = std::max(tau, 2 * floor_best);
            run.status = Phase1Run::Status::converged;
            return run;
        }
        if (steps >= g / 2 || run.term_count > g / 2) {
            run.status = Phase1Run::Status::stagnated;
            return run;
        }

        // Complete pivoting over the sampled grid, theta* ascending 0..pi,
        // lambda* ascending [0,pi); first maximal block wins.
        int bi = -1, bk = -1;
        double best = 0;
        for (int i = 0; i < h; ++i) {
            const size_t row = static_cast<size_t>(i) * g;
            for (int k = g / 2; k < g; ++k) {
                const complex a = e[row + k - g / 2];
                const complex b = e[row + k];
                const double s1 = std::max(std::abs(a + b), std::abs(a - b));
                if (s1 > best) {
                    best = s1;
                    bi = i;
                    bk = k;
                }
            }
        }
        if (best == 0.0) {
            run.status = Phase1Run::Status::converged;
            return run;
        }

        GePivot p;
        p.it = bi;
        p.kl = bk;
        p.a = e[static_cast<size_t>(bi) * g + bk - g / 2];
        p.b = e[static_cast<size_t>(bi) * g + bk];
        std::tie(p.m_even, p.m_odd) = pinv_2x2(p.a, p.b, cfg.alpha);

        std::vector<complex> ce(h), co(h), re(g), ro(g);
        for (int i = 0; i < h; ++i) {
            const complex cm = e[static_cast<size_t>(i) * g + bk - g / 2];
            const complex cp = e[static_cast<size_t>(i) * g + bk];
            ce[i] = cm + cp;
            co[i] = cm - cp;
        }
        {
            const size_t row = static_cast<size_t>(bi) * g;
            for (int k = 0; k < g; ++k) {
                const complex rp = e[row + k];
                const complex rm = e[row + (k + g / 2) % g];
                re[k] = rp + rm;
                ro[k] = rp - rm;
            }
        }
        const complex de = 0.5 * p.m_even;
        const complex dodd = 0.5 * p.m_odd;
        const bool has_e = p.m_even != complex{};
        const bool has_o = p.m_odd != complex{};
        for (int i = 0; i < h; ++i) {
            const size_t row = static_cast<size_t>(i) * g;
            for (int k = 0; k < g; ++k) {
                complex upd{};
                if (has_e) upd += de * ce[i] * re[k];
                if (has_o) upd += dodd * co[i] * ro[k];
                e[row + k] -= upd;
            }
        }

        run.pivots.push_back(p);
        run.term_count += (has_e ? 1 : 0) + (has_o ? 1 : 0);
        const double next = max_abs();
        if (resid > 0) {
            const double ratio = next / resid;
            run.max_growth = std::max(run.max_growth, ratio);
            log_growth(cfg.alpha, ratio);
        }
        if (next < 0.7 * floor_best)
            since_improve = 0;
        else
            ++since_improve;
        if (next < floor_best) {
            floor_best = next;
            best_pivots = run.pivots.size();
            best_terms = run.term_count;
        }
        resid = next;
        run.reached_floor = std::min(run.reached_floor, resid);
        ++steps;
        if (run.term_count > cfg.max_rank) {
            run.status = Phase1Run::Status::rank_exceeded;
            return run;
        }
    }
}

struct Phase2Term {
    complex d{};
    std::vector<complex> cth;  // theta samples on [0,pi], length M/2+1
    std::vector<complex> rlm;  // lambda samples on the full circle, length N
    Parity parity = Parity::even;
};

// Re-runs the recorded GE steps restricted to the skeleton lines at
// resolution (M columns-wise, N rows-wise). Values at skeleton intersections
// reproduce the phase-1 recurrence, so the recorded pivot weights stay valid.
std::vector<Phase2Term> resolve_skeleton(const sphere_fn& f, const Phase1Run& p1, int g, int m,
                                         int n) {
    const int hm = m / 2 + 1;
    const int mscale = m / g;
    const int nscale = n / g;
    const size_t np = p1.pivots.size();

    std::vector<complex> zc;
    if (p1.zero_out) {
        zc.resize(hm);
        const double lambda0 = -kPi + kTwoPi * p1.k0 / g;
        const double lambda0m = lambda0 >= 0.0 ? lambda0 - kPi : lambda0 + kPi;
        for (int i = 0; i < hm; ++i) {
            const double theta = kTwoPi * i / m;
            zc[i] = 0.5 * (f(lambda0, theta) + f(lambda0m, theta));
        }
    }

    std::vector<std::vector<complex>> colp(np), colm(np), row(np);
    for (size_t j = 0; j < np; ++j) {
        const double ls = -kPi + kTwoPi * p1.pivots[j].kl / g;
        colp[j].resize(hm);
        colm[j].resize(hm);
        for (int i = 0; i < hm; ++i) {
            const double theta = kTwoPi * i / m;
            colp[j][i] = f(ls, theta);
            colm[j][i] = f(ls - kPi, theta);
        }
        const double ts = kTwoPi * p1.pivots[j].it / g;
        row[j].resize(n);
        for (int k = 0; k < n; ++k) row[j][k] = f(-kPi + kTwoPi * k / n, ts);
        if (p1.zero_out) {
            for (int i = 0; i < hm; ++i) {
                colp[j][i] -= zc[i];
                colm[j][i] -= zc[i];
            }
            const complex zrow = zc[p1.pivots[j].it * mscale];
            for (int k = 0; k < n; ++k) row[j][k] -= zrow;
        }
    }

    std::vector<Phase2Term> terms;
    if (p1.zero_out) {
        Phase2Term t;
        t.d = 1.0;
        t.cth = zc;
        t.rlm.assign(n, complex{});  // coefficients set directly by the caller
        t.parity = Parity::even;
        terms.push_back(std::move(t));
    }

    std::vector<complex> ce(hm), co(hm), re(n), ro(n);
    for (size_t j = 0; j < np; ++j) {
        const GePivot& p = p1.pivots[j];
        for (int i = 0; i < hm; ++i) {
            ce[i] = colm[j][i] + colp[j][i];
            co[i] = colm[j][i] - colp[j][i];
        }
        for (int k = 0; k < n; ++k) {
            const complex rp = row[j][k];
            const complex rm = row[j][(k + n / 2) % n];
            re[k] = rp + rm;
            ro[k] = rp - rm;
        }
        const complex de = 0.5 * p.m_even;
        const complex dodd = 0.5 * p.m_odd;
        const bool has_e = p.m_even != complex{};
        const bool has_o = p.m_odd != complex{};
        if (has_e) {
            Phase2Term t;
            t.d = de;
            t.cth = ce;
            t.rlm = re;
            t.parity = Parity::even;
            terms.push_back(std::move(t));
        }
        if (has_o) {
            Phase2Term t;
            t.d = dodd;
            t.cth = co;
            t.rlm = ro;
            t.parity = Parity::odd;
            terms.push_back(std::move(t));
        }
        // Update the remaining skeleton samples.
        for (size_t l = j + 1; l < np; ++l) {
            const int kf = p1.pivots[l].kl * nscale;
            const int kfm = kf - n / 2;
            const int itf = p1.pivots[l].it * mscale;
            const complex rep = re[kf], rop = ro[kf];
            const complex rem = re[kfm], rom = ro[kfm];
            for (int i = 0; i < hm; ++i) {
                complex updp{}, updm{};
                if (has_e) {
                    updp += de * ce[i] * rep;
                    updm += de * ce[i] * rem;
                }
                if (has_o) {
                    updp += dodd * co[i] * rop;
                    updm += dodd * co[i] * rom;
                }
                colp[l][i] -= updp;
                colm[l][i] -= updm;
            }
            const complex cei = ce[itf], coi = co[itf];
            for (int k = 0; k < n; ++k) {
                complex upd{};
                if (has_e) upd += de * cei * re[k];
                if (has_o) upd += dodd * coi * ro[k];
                row[l][k] -= upd;
            }
        }
    }
    return terms;
}

LowRankSphereFun assemble(const sphere_fn&, const Phase1Run& p1, int g,
                          std::vector<Phase2Term> terms, int m, int n, double tol) {
    LowRankSphereFun fun;
    fun.vscale = p1.vscale;
    fun.tol = tol;
    fun.diag.phase1_grid = g;
    fun.diag.zero_out = p1.zero_out;
    fun.diag.lambda0 = p1.zero_out ? -kPi + kTwoPi * p1.k0 / g : 0.0;
    fun.diag.max_growth = p1.max_growth;
    for (const GePivot& p : p1.pivots) {
        PivotBlock b;
        b.theta_star = kTwoPi * p.it / g;
        b.lambda_star = -kPi + kTwoPi * p.kl / g;
        b.a = p.a;
        b.b = p.b;
        b.m_even = p.m_even;
        b.m_odd = p.m_odd;
        fun.diag.pivots.push_back(b);
    }

    size_t idx = 0;
    for (Phase2Term& t : terms) {
        fun.d.push_back(t.d);
        fun.parity.push_back(t.parity);
        const std::vector<complex> full = extend_half_circle(t.cth, m, t.parity);
        fun.col_coeffs.push_back(analyze_1d(full));
        if (p1.zero_out && idx == 0) {
            CoeffVec r(n);
            r.mode(0) = 1.0;  // r = 1 exactly
            fun.row_coeffs.push_back(std::move(r));
        } else {
            fun.row_coeffs.push_back(analyze_1d(t.rlm));
        }
        ++idx;
    }
    return fun;
}

double verify_error(const sphere_fn& f, const LowRankSphereFun& fun, int vm, int vn) {
    // Max deviation on a doubled vm x vn grid, upper half.
    const int hm = vm / 2 + 1;
    std::vector<std::vector<complex>> cvals(fun.rank()), rvals(fun.rank());
    for (int j = 0; j < fun.rank(); ++j) {
        cvals[j] = synthesize_1d(fun.col_coeffs[j], vm);
        rvals[j] = synthesize_1d(fun.row_coeffs[j], vn);
    }
    double err = 0;
    for (int i = 0; i < hm; ++i) {
        const int t = (i + vm / 2) % vm;  // row of theta = 2*pi*i/vm in the doubled grid
        const double theta = kTwoPi * i / vm;
        for (int k = 0; k < vn; ++k) {
            complex s{};
            for (int j = 0; j < fun.rank(); ++j) s += fun.d[j] * cvals[j][t] * rvals[j][k];
            err = std::max(err, std::abs(f(-kPi + kTwoPi * k / vn, theta) - s));
        }
    }
    return err;
}

}  // namespace

LowRankSphereFun construct(const sphere_fn& f, const ConstructorConfig& cfg) {
    if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
        throw precondition_error("construct: coupling parameter must lie in [0,1]");
    const double tol_rel = cfg.tol;

    int g_start = 16;
    while (true) {
        // Phase 1: hunt pivots on doubling grids.
        Phase1Run run;
        int g = g_start;
        double prev_floor = std::numeric_limits<double>::infinity();
        bool converged = false;
        while (true) {
            run = phase1_on_grid(f, cfg, g, tol_rel);
            if (trace_enabled())
                std::fprintf(stderr, "[construct] g=%d status=%d terms=%d pivots=%zu floor=%.3g tau=%.3g\n",
                             g, static_cast<int>(run.status), run.term_count, run.pivots.size(),
                             run.reached_floor, run.tau);
            if (run.status == Phase1Run::Status::zero_function) {
                LowRankSphereFun zero;
                zero.vscale = 0;
                zero.tol = tol_rel;
                zero.diag.phase1_grid = g;
                return zero;
            }
            if (run.status == Phase1Run::Status::converged) {
                converged = true;
                break;
            }
            if (run.status == Phase1Run::Status::rank_exceeded) break;
            // Roundoff plateau that refinement does not improve: accept at
            // the achieved level instead of doubling forever.
            if (run.reached_floor <= kPlateauAccept * run.vscale &&
                prev_floor <= 4 * run.reached_floor) {
                run = phase1_on_grid(f, cfg, g, 2 * run.reached_floor / run.vscale);
                if (run.status == Phase1Run::Status::converged) {
                    converged = true;
                    break;
                }
            }
            prev_floor = run.reached_floor;
            if (2 * g > cfg.max_grid) break;
            g *= 2;
        }

        if (!converged) {
            // Best effort at the last grid, then report failure.
            std::vector<Phase2Term> terms = resolve_skeleton(f, run, g, g, g);
            LowRankSphereFun best = assemble(f, run, g, std::move(terms), g, g, run.vscale > 0 ? run.tau / run.vscale : tol_rel);
            throw unresolved_error(
                run.status == Phase1Run::Status::rank_exceeded
                    ? "construct: max_rank exceeded before the residual was resolved"
                    : "construct: max_grid exceeded before the residual was resolved",
                std::move(best));
        }

        // Phase 2: refine the skeleton slices until coefficient tails drop
        // below the termination threshold.
        int m = g, n = g;
        const double tail_tau = run.tau;
        while (true) {
            std::vector<Phase2Term> terms = resolve_skeleton(f, run, g, m, n);
            LowRankSphereFun fun = assemble(f, run, g, std::move(terms), m, n, run.tau / run.vscale);
            bool col_ok = true, row_ok = true;
            for (int j = 0; j < fun.rank(); ++j) {
                if (!tails_ok(fun.col_coeffs[j], tail_tau)) {
                    col_ok = false;
                    if (trace_enabled()) {
                        double worst = 0;
                        const CoeffVec& c = fun.col_coeffs[j];
                        for (int i = 0; i < std::max(1, c.size() / 16); ++i)
                            worst = std::max({worst, std::abs(c[i]), std::abs(c[c.size() - 1 - i])});
                        std::fprintf(stderr, "[construct] col tail fail term=%d m=%d worst=%.3g\n", j, m,
                                     worst);
                    }
                }
                if (!tails_ok(fun.row_coeffs[j], tail_tau)) {
                    row_ok = false;
                    if (trace_enabled()) {
                        double worst = 0;
                        const CoeffVec& c = fun.row_coeffs[j];
                        for (int i = 0; i < std::max(1, c.size() / 16); ++i)
                            worst = std::max({worst, std::abs(c[i]), std::abs(c[c.size() - 1 - i])});
                        std::fprintf(stderr, "[construct] row tail fail term=%d n=%d worst=%.3g\n", j, n,
                                     worst);
                    }
                }
            }
            if (!col_ok || !row_ok) {
                const bool col_capped = !col_ok && 2 * m > cfg.max_grid;
                const bool row_capped = !row_ok && 2 * n > cfg.max_grid;
                if (col_capped || row_capped)
                    throw unresolved_error("construct: max_grid exceeded while resolving slices",
                                           std::move(fun));
                if (!col_ok) m *= 2;
                if (!row_ok) n *= 2;
                continue;
            }
            // Guard against rank hidden from the phase-1 grid: compare
            // against fresh samples at twice the phase-1 resolution.
            const int vg = std::min(2 * g, cfg.max_grid);
            const double err = verify_error(f, fun, vg, vg);
            if (trace_enabled())
                std::fprintf(stderr, "[construct] verify g=%d m=%d n=%d rank=%d err=%.3g bound=%.3g\n",
                             g, m, n, fun.rank(), err, 200.0 * std::max(1, fun.rank()) * run.tau);
            if (err <= 200.0 * std::max(1, fun.rank()) * run.tau) return fun;
            if (2 * g_start > cfg.max_grid || 2 * g > cfg.max_grid)
                throw unresolved_error("construct: verification failed at max_grid",
                                       std::move(fun));
            g_start = 2 * g;
            break;  // back to phase 1 on a finer starting grid
        }
    }
}

CoeffMatrix coeffs2(const LowRankSphereFun& f) {
    return CoeffMatrix::from_factors(f.col_coeffs, f.d, f.row_coeffs);
}

BMCGrid sample_fun(const LowRankSphereFun& f, int m, int n) {
    if (f.rank() == 0) return BMCGrid(m, n);
    return sample_grid(coeffs2(f), m, n);
}

}  // namespace spherekit
