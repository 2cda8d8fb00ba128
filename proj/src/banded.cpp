#include "spherekit/banded.hpp"

#include <algorithm>
#include <cmath>

namespace spherekit {

std::vector<complex> BandMatrix::apply(std::span<const complex> x) const {
    if (static_cast<int>(x.size()) != n_) throw size_error("BandMatrix::apply: size mismatch");
    std::vector<complex> y(n_, complex{});
    for (int i = 0; i < n_; ++i) {
        const int jlo = std::max(0, i - kl_);
        const int jhi = std::min(n_ - 1, i + ku_);
        complex acc{};
        for (int j = jlo; j <= jhi; ++j) acc += get(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

BandMatrix band_mul(const BandMatrix& a, const BandMatrix& b) {
    if (a.n() != b.n()) throw size_error("band_mul: size mismatch");
    const int n = a.n();
    BandMatrix c(n, std::min(n - 1, a.kl() + b.kl()), std::min(n - 1, a.ku() + b.ku()));
    for (int i = 0; i < n; ++i) {
        const int klo = std::max(0, i - a.kl());
        const int khi = std::min(n - 1, i + a.ku());
        for (int k = klo; k <= khi; ++k) {
            const complex aik = a.get(i, k);
            if (aik == complex{}) continue;
            const int jlo = std::max(0, k - b.kl());
            const int jhi = std::min(n - 1, k + b.ku());
            for (int j = jlo; j <= jhi; ++j) {
                if (!c.in_band(i, j)) continue;
                c.at(i, j) += aik * b.get(k, j);
            }
        }
    }
    return c;
}

BandMatrix band_add(const BandMatrix& a, const BandMatrix& b) {
    if (a.n() != b.n()) throw size_error("band_add: size mismatch");
    const int n = a.n();
    BandMatrix c(n, std::max(a.kl(), b.kl()), std::max(a.ku(), b.ku()));
    for (int i = 0; i < n; ++i) {
        const int jlo = std::max(0, i - c.kl());
        const int jhi = std::min(n - 1, i + c.ku());
        for (int j = jlo; j <= jhi; ++j) c.at(i, j) = a.get(i, j) + b.get(i, j);
    }
    return c;
}

BandMatrix band_scale(const BandMatrix& a, complex s) {
    BandMatrix c = a;
    for (int i = 0; i < c.n(); ++i) {
        const int jlo = std::max(0, i - c.kl());
        const int jhi = std::min(c.n() - 1, i + c.ku());
        for (int j = jlo; j <= jhi; ++j) c.at(i, j) *= s;
    }
    return c;
}

BandMatrix band_diag(std::span<const complex> d) {
    BandMatrix c(static_cast<int>(d.size()), 0, 0);
    for (int i = 0; i < c.n(); ++i) c.at(i, i) = d[i];
    return c;
}

void band_shift_diag(BandMatrix& a, complex s) {
    for (int i = 0; i < a.n(); ++i) a.at(i, i) += s;
}

namespace {

// Working rows for the pivoted eliminations: a window of `width` entries
// starting at global column `base`. Entries left of `base` are zero.
struct RowWindow {
    int base = 0;
    int len = 0;       // valid entries in e
    complex* e = nullptr;

    complex val(int col) const {
        const int t = col - base;
        return (t >= 0 && t < len) ? e[t] : complex{};
    }
};

void align_to(RowWindow& r, int col, int width) {
    if (r.base >= col) return;
    const int shift = col - r.base;
    const int keep = std::max(0, r.len - shift);
    for (int t = 0; t < keep; ++t) r.e[t] = r.e[t + shift];
    for (int t = keep; t < width; ++t) r.e[t] = complex{};
    r.base = col;
    r.len = width;
}

}  // namespace

std::vector<complex> band_solve(const BandMatrix& a, std::span<const complex> b) {
    const int n = a.n();
    if (static_cast<int>(b.size()) != n) throw size_error("band_solve: rhs size mismatch");
    const int kl = a.kl(), ku = a.ku();
    const int width = kl + ku + kl + 1;  // fill from pivoting extends ku by kl

    std::vector<complex> buf(static_cast<size_t>(n) * width, complex{});
    std::vector<RowWindow> rows(n);
    std::vector<complex> rhs(b.begin(), b.end());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) {
        perm[i] = i;
        rows[i].base = std::max(0, i - kl);
        rows[i].len = width;
        rows[i].e = buf.data() + static_cast<size_t>(i) * width;
        const int jhi = std::min(n - 1, i + ku);
        for (int j = rows[i].base; j <= jhi; ++j) rows[i].e[j - rows[i].base] = a.get(i, j);
    }

    const double tiny = 1e-300;
    for (int c = 0; c < n; ++c) {
        const int rhi = std::min(n - 1, c + kl);
        int best = c;
        double best_abs = std::abs(rows[perm[c]].val(c));
        for (int r = c + 1; r <= rhi; ++r) {
            const double v = std::abs(rows[perm[r]].val(c));
            if (v > best_abs) {
                best = r;
                best_abs = v;
            }
        }
        if (best_abs < tiny) throw structure_error("band_solve: matrix is numerically singular");
        std::swap(perm[c], perm[best]);
        RowWindow& piv = rows[perm[c]];
        align_to(piv, c, width);
        const complex pval = piv.e[0];
        for (int r = c + 1; r <= rhi; ++r) {
            RowWindow& row = rows[perm[r]];
            const complex v = row.val(c);
            if (v == complex{}) continue;
            align_to(row, c, width);
            const complex f = v / pval;
            row.e[0] = complex{};
            for (int t = 1; t < width; ++t) row.e[t] -= f * piv.e[t];
            rhs[perm[r]] -= f * rhs[perm[c]];
        }
    }

    std::vector<complex> x(n);
    for (int c = n - 1; c >= 0; --c) {
        const RowWindow& piv = rows[perm[c]];
        complex acc = rhs[perm[c]];
        const int jhi = std::min(n - 1, c + width - 1);
        for (int j = c + 1; j <= jhi; ++j) acc -= piv.val(j) * x[j];
        x[c] = acc / piv.e[c - piv.base];
    }
    return x;
}

std::vector<complex> band_solve_with_dense_row(const BandMatrix& a, int skip_row,
                                               std::span<const complex> w, complex dense_rhs,
                                               std::span<const complex> b) {
    const int n = a.n();
    if (static_cast<int>(w.size()) != n || static_cast<int>(b.size()) != n)
        throw size_error("band_solve_with_dense_row: size mismatch");
    const int kl = a.kl(), ku = a.ku();
    const int width = kl + ku + kl + 1;

    struct BandRow {
        RowWindow win;
        complex rhs;
        bool used = false;
    };
    std::vector<complex> buf(static_cast<size_t>(n) * width, complex{});
    std::vector<BandRow> band;
    band.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
        if (i == skip_row) continue;
        BandRow r;
        r.win.base = std::max(0, i - kl);
        r.win.len = width;
        r.win.e = buf.data() + band.size() * width;
        const int jhi = std::min(n - 1, i + ku);
        for (int j = r.win.base; j <= jhi; ++j) r.win.e[j - r.win.base] = a.get(i, j);
        r.rhs = b[i];
        band.push_back(r);
    }
    // Band rows sorted by window start; admitted to the active set as the
    // elimination reaches their first column.
    std::vector<int> order(band.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return band[x].win.base < band[y].win.base; });

    struct DenseRow {
        std::vector<complex> e;
        complex rhs;
        bool used = false;
    };
    std::vector<DenseRow> dense;
    dense.push_back({std::vector<complex>(w.begin(), w.end()), dense_rhs, false});

    // Upper rows recorded per column for back substitution.
    struct UpperRow {
        bool is_dense = false;
        int band_index = -1;
        int dense_index = -1;
    };
    std::vector<UpperRow> upper(n);

    std::vector<int> active;
    size_t next_admit = 0;
    const double tiny = 1e-300;

    for (int c = 0; c < n; ++c) {
        while (next_admit < order.size() && band[order[next_admit]].win.base <= c)
            active.push_back(order[next_admit++]);

        int best_band = -1;
        double best_band_abs = 0;
        for (int idx : active) {
            if (band[idx].used) continue;
            const double v = std::abs(band[idx].win.val(c));
            if (v > best_band_abs) {
                best_band_abs = v;
                best_band = idx;
            }
        }
        int best_dense = -1;
        double best_dense_abs = 0;
        for (size_t d = 0; d < dense.size(); ++d) {
            if (dense[d].used) continue;
            const double v = std::abs(dense[d].e[c]);
            if (v > best_dense_abs) {
                best_dense_abs = v;
                best_dense = static_cast<int>(d);
            }
        }

        const bool take_band = best_band >= 0 && best_band_abs >= 1e-10 * best_dense_abs &&
                               best_band_abs >= tiny;
        if (take_band) {
            BandRow& piv = band[best_band];
            piv.used = true;
            align_to(piv.win, c, width);
            upper[c] = {false, best_band, -1};
            const complex pval = piv.win.e[0];
            for (int idx : active) {
                BandRow& row = band[idx];
                if (row.used) continue;
                const complex v = row.win.val(c);
                if (v == complex{}) continue;
                align_to(row.win, c, width);
                const complex f = v / pval;
                row.win.e[0] = complex{};
                for (int t = 1; t < width; ++t) row.win.e[t] -= f * piv.win.e[t];
                row.rhs -= f * piv.rhs;
            }
            for (DenseRow& dr : dense) {
                if (dr.used) continue;
                const complex v = dr.e[c];
                if (v == complex{}) continue;
                const complex f = v / pval;
                dr.e[c] = complex{};
                for (int t = 1; t < width && c + t < n; ++t) dr.e[c + t] -= f * piv.win.e[t];
                dr.rhs -= f * piv.rhs;
            }
        } else if (best_dense >= 0 && best_dense_abs >= tiny) {
            DenseRow& piv = dense[best_dense];
            piv.used = true;
            upper[c] = {true, -1, best_dense};
            const complex pval = piv.e[c];
            // Band rows touched here go dense; structurally this does not
            // happen for the spectral Poisson system (the remaining column
            // is zero), but stays correct in general.
            for (int idx : active) {
                BandRow& row = band[idx];
                if (row.used) continue;
                const complex v = row.win.val(c);
                if (v == complex{}) continue;
                DenseRow promoted;
                promoted.e.assign(n, complex{});
                for (int t = 0; t < row.win.len; ++t) {
                    const int col = row.win.base + t;
                    if (col >= 0 && col < n) promoted.e[col] = row.win.e[t];
                }
                promoted.rhs = row.rhs;
                const complex f = v / pval;
                for (int j = c; j < n; ++j) promoted.e[j] -= f * piv.e[j];
                promoted.e[c] = complex{};
                promoted.rhs -= f * piv.rhs;
                row.used = true;  // replaced by the promoted dense copy
                dense.push_back(std::move(promoted));
            }
            for (size_t d = 0; d < dense.size(); ++d) {
                DenseRow& dr = dense[d];
                if (dr.used || static_cast<int>(d) == best_dense) continue;
                const complex v = dr.e[c];
                if (v == complex{}) continue;
                const complex f = v / pval;
                for (int j = c; j < n; ++j) dr.e[j] -= f * piv.e[j];
                dr.e[c] = complex{};
                dr.rhs -= f * piv.rhs;
            }
        } else {
            throw structure_error("band_solve_with_dense_row: singular bordered system");
        }
    }

    std::vector<complex> x(n);
    for (int c = n - 1; c >= 0; --c) {
        complex acc, pval;
        if (upper[c].is_dense) {
            const DenseRow& r = dense[upper[c].dense_index];
            acc = r.rhs;
            for (int j = c + 1; j < n; ++j) acc -= r.e[j] * x[j];
            pval = r.e[c];
        } else {
            const BandRow& r = band[upper[c].band_index];
            acc = r.rhs;
            const int jhi = std::min(n - 1, r.win.base + r.win.len - 1);
            for (int j = c + 1; j <= jhi; ++j) acc -= r.win.val(j) * x[j];
            pval = r.win.val(c);
        }
        x[c] = acc / pval;
    }
    return x;
}

}  // namespace spherekit
