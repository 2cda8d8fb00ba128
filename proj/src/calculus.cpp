#include "spherekit/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace spherekit {

namespace {

bool is_zero_vec(const CoeffVec& c) {
    for (int i = 0; i < c.size(); ++i)
        if (c[i] != complex{}) return false;
    return true;
}

struct TermList {
    std::vector<complex> d;
    std::vector<CoeffVec> col, row;
    std::vector<Parity> parity;

    void push(complex dj, CoeffVec c, CoeffVec r, Parity p) {
        if (dj == complex{} || is_zero_vec(c) || is_zero_vec(r)) return;
        d.push_back(dj);
        col.push_back(std::move(c));
        row.push_back(std::move(r));
        parity.push_back(p);
    }
};

double sampled_max(const std::vector<complex>& d, const std::vector<CoeffVec>& col,
                   const std::vector<CoeffVec>& row) {
    if (d.empty()) return 0;
    const int m = std::max(64, col.front().size());
    const int n = std::max(64, row.front().size());
    std::vector<std::vector<complex>> cv(d.size()), rv(d.size());
    for (size_t j = 0; j < d.size(); ++j) {
        cv[j] = synthesize_1d(col[j], m);
        rv[j] = synthesize_1d(row[j], n);
    }
    double vmax = 0;
    for (int t = 0; t < m; ++t) {
        for (int k = 0; k < n; ++k) {
            complex s{};
            for (size_t j = 0; j < d.size(); ++j) s += d[j] * cv[j][t] * rv[j][k];
            vmax = std::max(vmax, std::abs(s));
        }
    }
    return vmax;
}

LowRankSphereFun make_fun(TermList t, double tol) {
    LowRankSphereFun f;
    if (t.d.empty()) {
        f.tol = tol;
        return f;
    }
    // Uniform mode counts across terms keep the representation vectorizable.
    int m = 0, n = 0;
    for (const CoeffVec& c : t.col) m = std::max(m, c.size());
    for (const CoeffVec& r : t.row) n = std::max(n, r.size());
    for (CoeffVec& c : t.col)
        if (c.size() != m) c = pad_to(c, m);
    for (CoeffVec& r : t.row)
        if (r.size() != n) r = pad_to(r, n);
    f.d = std::move(t.d);
    f.col_coeffs = std::move(t.col);
    f.row_coeffs = std::move(t.row);
    f.parity = std::move(t.parity);
    f.vscale = sampled_max(f.d, f.col_coeffs, f.row_coeffs);
    f.tol = tol;
    return f;
}

Parity flip(Parity p) { return p == Parity::even ? Parity::odd : Parity::even; }

}  // namespace

complex evaluate(const LowRankSphereFun& f, const SphPoint& p) {
    complex s{};
    for (int j = 0; j < f.rank(); ++j)
        s += f.d[j] * eval_series(f.col_coeffs[j], p.theta) * eval_series(f.row_coeffs[j], p.lambda);
    return s;
}

complex evaluate(const LowRankSphereFun& f, const CartPoint& p) {
    return evaluate(f, cart_to_sph(p));
}

complex sum2(const LowRankSphereFun& f) {
    // Per term: (sum_k w_k a_k) * (2*pi*b_0) with w_{+-1} = 0 and
    // w_k = (1 + e^{i*pi*k})/(1 - k^2), i.e. 2/(1-k^2) for even k.
    complex total{};
    for (int j = 0; j < f.rank(); ++j) {
        const CoeffVec& a = f.col_coeffs[j];
        complex ci{};
        for (int k = a.kmin(); k < -a.kmin(); ++k) {
            if (k % 2 != 0) continue;
            ci += 2.0 / (1.0 - static_cast<double>(k) * k) * a.at_mode(k);
        }
        total += f.d[j] * ci * (kTwoPi * f.row_coeffs[j].at_mode(0));
    }
    return total;
}

LowRankSphereFun diff_tangential(const LowRankSphereFun& f, Axis dir) {
    TermList out;
    for (int j = 0; j < f.rank(); ++j) {
        const complex d = f.d[j];
        const CoeffVec& c = f.col_coeffs[j];
        const CoeffVec& r = f.row_coeffs[j];
        const Parity p = f.parity[j];
        switch (dir) {
            case Axis::x: {
                // -(c/sin)(sin(lambda) r') + (cos(theta) c')(cos(lambda) r)
                CoeffVec rd = mult_sin(deriv_coeffs(r));
                if (!is_zero_vec(rd))
                    out.push(-d, pad_to(div_sin(c), c.size() + 2), std::move(rd), flip(p));
                CoeffVec cd = mult_cos(deriv_coeffs(c));
                if (!is_zero_vec(cd)) out.push(d, std::move(cd), mult_cos(r), flip(p));
                break;
            }
            case Axis::y: {
                // (c/sin)(cos(lambda) r') + (cos(theta) c')(sin(lambda) r)
                CoeffVec rd = mult_cos(deriv_coeffs(r));
                if (!is_zero_vec(rd))
                    out.push(d, pad_to(div_sin(c), c.size() + 2), std::move(rd), flip(p));
                CoeffVec cd = mult_cos(deriv_coeffs(c));
                if (!is_zero_vec(cd)) out.push(d, std::move(cd), mult_sin(r), flip(p));
                break;
            }
            case Axis::z: {
                // -sin(theta) d/dtheta, applied to the theta factor only.
                CoeffVec cd = mult_sin(deriv_coeffs(c));
                if (!is_zero_vec(cd)) out.push(-d, std::move(cd), r, p);
                break;
            }
        }
    }
    return make_fun(std::move(out), f.tol);
}

VectorSphereFun gradient(const LowRankSphereFun& f) {
    return {diff_tangential(f, Axis::x), diff_tangential(f, Axis::y), diff_tangential(f, Axis::z)};
}

LowRankSphereFun divergence(const VectorSphereFun& v) {
    return add(add(diff_tangential(v.x, Axis::x), diff_tangential(v.y, Axis::y)),
               diff_tangential(v.z, Axis::z));
}

VectorSphereFun curl_vec(const VectorSphereFun& v) {
    return {sub(diff_tangential(v.z, Axis::y), diff_tangential(v.y, Axis::z)),
            sub(diff_tangential(v.x, Axis::z), diff_tangential(v.z, Axis::x)),
            sub(diff_tangential(v.y, Axis::x), diff_tangential(v.x, Axis::y))};
}

VectorSphereFun curl_scalar(const LowRankSphereFun& f) {
    const LowRankSphereFun fx = diff_tangential(f, Axis::x);
    const LowRankSphereFun fy = diff_tangential(f, Axis::y);
    const LowRankSphereFun fz = diff_tangential(f, Axis::z);
    return {sub(mult_coordinate(fz, Axis::y), mult_coordinate(fy, Axis::z)),
            sub(mult_coordinate(fx, Axis::z), mult_coordinate(fz, Axis::x)),
            sub(mult_coordinate(fy, Axis::x), mult_coordinate(fx, Axis::y))};
}

LowRankSphereFun vorticity(const VectorSphereFun& v) {
    const VectorSphereFun c = curl_vec(v);
    return add(add(mult_coordinate(c.x, Axis::x), mult_coordinate(c.y, Axis::y)),
               mult_coordinate(c.z, Axis::z));
}

LowRankSphereFun add(const LowRankSphereFun& f, const LowRankSphereFun& g) {
    TermList out;
    for (int j = 0; j < f.rank(); ++j) out.push(f.d[j], f.col_coeffs[j], f.row_coeffs[j], f.parity[j]);
    for (int j = 0; j < g.rank(); ++j) out.push(g.d[j], g.col_coeffs[j], g.row_coeffs[j], g.parity[j]);
    return make_fun(std::move(out), std::max(f.tol, g.tol));
}

LowRankSphereFun sub(const LowRankSphereFun& f, const LowRankSphereFun& g) {
    return add(f, scale(g, -1.0));
}

LowRankSphereFun scale(const LowRankSphereFun& f, complex s) {
    LowRankSphereFun out = f;
    for (complex& dj : out.d) dj *= s;
    out.vscale = f.vscale * std::abs(s);
    if (s == complex{}) out = LowRankSphereFun{};
    return out;
}

LowRankSphereFun mult_coordinate(const LowRankSphereFun& f, Axis dir) {
    TermList out;
    for (int j = 0; j < f.rank(); ++j) {
        const complex d = f.d[j];
        const CoeffVec& c = f.col_coeffs[j];
        const CoeffVec& r = f.row_coeffs[j];
        const Parity p = f.parity[j];
        switch (dir) {
            case Axis::x:  // cos(lambda) sin(theta)
                out.push(d, mult_sin(c), mult_cos(r), flip(p));
                break;
            case Axis::y:  // sin(lambda) sin(theta)
                out.push(d, mult_sin(c), mult_sin(r), flip(p));
                break;
            case Axis::z:  // cos(theta)
                out.push(d, mult_cos(c), r, p);
                break;
        }
    }
    return make_fun(std::move(out), f.tol);
}

LowRankSphereFun recompress(const LowRankSphereFun& f, const ConstructorConfig& cfg) {
    return construct([&f](double lambda, double theta) { return evaluate(f, SphPoint{lambda, theta}); },
                     cfg);
}

}  // namespace spherekit
