#pragma once

#include "spherekit/lowrank.hpp"

namespace spherekit {

enum class Axis { x, y, z };

// Cartesian components of a vector field tangent to the sphere.
struct VectorSphereFun {
    LowRankSphereFun x, y, z;
};

// Pointwise evaluation; 1D Horner on each factor, O(K(m+n)) per point.
complex evaluate(const LowRankSphereFun& f, const SphPoint& p);
// Cartesian points are projected radially onto the sphere first.
complex evaluate(const LowRankSphereFun& f, const CartPoint& p);

// Surface integral over the sphere.
complex sum2(const LowRankSphereFun& f);

// Tangential derivative along a Cartesian axis (a component of the surface
// gradient). Smooth on the sphere; the 1/sin(theta) factor is applied in
// coefficient space, never pointwise.
LowRankSphereFun diff_tangential(const LowRankSphereFun& f, Axis dir);

VectorSphereFun gradient(const LowRankSphereFun& f);
LowRankSphereFun divergence(const VectorSphereFun& v);
VectorSphereFun curl_vec(const VectorSphereFun& v);
// n x grad(f), the rotational field of a stream function.
VectorSphereFun curl_scalar(const LowRankSphereFun& f);
LowRankSphereFun vorticity(const VectorSphereFun& v);

// Term-concatenating arithmetic (no recompression).
LowRankSphereFun add(const LowRankSphereFun& f, const LowRankSphereFun& g);
LowRankSphereFun sub(const LowRankSphereFun& f, const LowRankSphereFun& g);
LowRankSphereFun scale(const LowRankSphereFun& f, complex s);

// Multiplication by the coordinate functions x, y, z in coefficient space.
LowRankSphereFun mult_coordinate(const LowRankSphereFun& f, Axis dir);

// Optional recompression: reconstructs through the adaptive constructor.
LowRankSphereFun recompress(const LowRankSphereFun& f, const ConstructorConfig& cfg = {});

}  // namespace spherekit
