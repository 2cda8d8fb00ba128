#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spherekit/sphere_domain.hpp"

namespace spherekit {

struct parse_error : std::runtime_error {
    parse_error(const std::string& what, size_t offset_)
        : std::runtime_error(what + " (at offset " + std::to_string(offset_) + ")"),
          offset(offset_) {}
    size_t offset;
};

enum class VarSet { none, cart, sph };

// Parsed scalar expression over {x,y,z} or {lam,th}. Supported: the unary
// functions sin cos tan exp log sqrt abs sinh cosh, operators + - * / ^
// (right-associative, binds tighter than unary minus), constants pi and e,
// and numeric literals. Variable sets may not be mixed.
class Expr {
public:
    static Expr parse(std::string_view text);

    VarSet vars() const { return vars_; }

    double eval_cart(double x, double y, double z) const;
    double eval_sph(double lam, double th) const;

    // The expression as a function on the physical domain; Cartesian
    // expressions are composed with the coordinate map.
    sphere_fn as_sphere_fn() const;

private:
    struct Node {
        enum class Kind { number, var, neg, add, sub, mul, div, pow, call } kind = Kind::number;
        double value = 0;
        int var = 0;   // 0..2 = x,y,z (cart) or 0..1 = lam,th (sph)
        int func = 0;
        int lhs = -1, rhs = -1;
    };

    double eval_node(int idx, const double* v) const;

    std::vector<Node> nodes_;
    int root_ = -1;
    VarSet vars_ = VarSet::none;

    friend class ExprParser;
};

}  // namespace spherekit
