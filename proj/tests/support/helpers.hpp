#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <string>

#include "spherekit/sphere_domain.hpp"

namespace spherekit::testing {

// Real orthonormal spherical harmonic Y_l^m(lambda, theta); m < 0 selects the
// sin(|m| lambda) branch.
inline double real_sph_harmonic(int l, int m, double lambda, double theta) {
    const int am = std::abs(m);
    double ratio = 1.0;  // (l-|m|)! / (l+|m|)!
    for (int k = l - am + 1; k <= l + am; ++k) ratio /= k;
    const double norm = std::sqrt((2 * l + 1) / (4.0 * kPi) * ratio);
    const double p = std::assoc_legendre(l, am, std::cos(theta));
    if (m == 0) return norm * p;
    const double trig = m > 0 ? std::cos(am * lambda) : std::sin(am * lambda);
    return std::numbers::sqrt2 * norm * p * trig;
}

// Projected ambient finite-difference gradient: (I - n n^T) grad F, the
// reference for tangential derivatives. F is any smooth extension off the
// sphere; the projection removes the extension dependence.
inline std::array<double, 3> surface_grad_fd(const std::function<double(double, double, double)>& f,
                                             double x, double y, double z, double h = 1e-5) {
    const double gx = (f(x + h, y, z) - f(x - h, y, z)) / (2 * h);
    const double gy = (f(x, y + h, z) - f(x, y - h, z)) / (2 * h);
    const double gz = (f(x, y, z + h) - f(x, y, z - h)) / (2 * h);
    const double ndot = gx * x + gy * y + gz * z;
    return {gx - ndot * x, gy - ndot * y, gz - ndot * z};
}

// Random band-limited function of exact rank k built from parity-respecting
// factors drawn from 8-dimensional spaces, so up to eight terms per symmetry
// class stay independent. Pole rows vanish (or are constant when the
// optional lambda-independent term is present), so the result is a BMC-I
// function whose glide extension equals itself.
inline sphere_fn random_exact_rank(int k, unsigned seed, bool with_constant_term) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    constexpr int depth = 8;
    struct Term {
        std::array<double, depth> ct;       // theta factor coefficients
        std::array<double, depth> rc, rs;   // lambda factor cos/sin coefficients
        bool odd;
        bool constant;
    };
    auto terms = std::make_shared<std::vector<Term>>();
    for (int j = 0; j < k; ++j) {
        Term t{};
        t.constant = with_constant_term && j == 0;
        t.odd = !t.constant && rng() % 2 == 0;
        for (int q = 0; q < depth; ++q) {
            t.ct[q] = u(rng);
            t.rc[q] = u(rng);
            t.rs[q] = u(rng);
        }
        terms->push_back(t);
    }
    return [terms](double lam, double th) {
        double acc = 0;
        for (const Term& t : *terms) {
            double c = 0, r = 0;
            if (t.constant) {
                for (int q = 0; q < depth; ++q) c += t.ct[q] * std::cos((q + 1) * th);
                r = 1.0;
            } else if (t.odd) {
                // odd in theta, pi-antiperiodic in lambda
                for (int q = 0; q < depth; ++q) {
                    c += t.ct[q] * std::sin((q + 1) * th);
                    const int freq = 2 * (q % (depth / 2)) + 1;
                    if (q < depth / 2)
                        r += t.rc[q] * std::cos(freq * lam);
                    else
                        r += t.rs[q] * std::sin(freq * lam);
                }
            } else {
                // even in theta, pi-periodic in lambda, zero at both poles
                for (int q = 0; q < depth; ++q) {
                    c += t.ct[q] * (std::cos(2 * (q + 1) * th) - 1.0);
                    const int freq = 2 * ((q % (depth / 2)) + 1);
                    if (q < depth / 2)
                        r += t.rc[q] * std::cos(freq * lam);
                    else
                        r += t.rs[q] * std::sin(freq * lam);
                }
            }
            acc += c * r;
        }
        return complex(acc, 0.0);
    };
}

// Deterministic generator of random smooth Cartesian expression strings.
class ExprGen {
public:
    explicit ExprGen(unsigned seed) : rng_(seed) {}

    std::string next() {
        switch (pick_(rng_) % 6) {
            case 0: return lin() + "+" + trig();
            case 1: return trig() + "*" + trig();
            case 2: return "exp(" + coef(0.8) + "*z)*" + trig();
            case 3: return "(" + lin() + ")^2";
            case 4: return trig() + "+" + coef(1.5) + "*" + var();
            default: return "cos(" + coef(2.0) + "*" + var() + "*" + var() + ")+" + trig();
        }
    }

private:
    std::string var() {
        const char* names[3] = {"x", "y", "z"};
        return names[pick_(rng_) % 3];
    }
    std::string coef(double amp) {
        std::uniform_real_distribution<double> d(-amp, amp);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", d(rng_));
        return buf;
    }
    std::string lin() {
        return coef(1.5) + "*x+" + coef(1.5) + "*y+" + coef(1.5) + "*z";
    }
    std::string trig() {
        const std::string f = (pick_(rng_) % 2) ? "sin" : "cos";
        return f + "(" + coef(2.5) + "*" + var() + "+" + coef(1.5) + "*" + var() + ")";
    }

    std::mt19937 rng_;
    std::uniform_int_distribution<int> pick_{0, 1 << 20};
};

}  // namespace spherekit::testing
