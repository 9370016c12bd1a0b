#pragma once

#include "qcap/mesh.hpp"
#include "qcap/vec2.hpp"

namespace qcap {

using KernelPoint = Vec2;

// Closed-form integrals of the 2D free-space Green's function
// G = -ln|r - r'| / (2 pi) over a straight element a-b with unit density.
// Values exclude 1/eps0.

/// P = -(1/2pi) * integral over the element of ln|obs - r'| dl'. Finite everywhere,
/// including on the element itself.
double segment_potential(Vec2 a, Vec2 b, KernelPoint obs);

/// F = (1/2pi) * integral over the element of (obs - r') / |obs - r'|^2 dl'.
/// On the element's own line the normal component is the principal value (0).
/// Throws SingularKernelError when obs coincides with an endpoint.
Vec2 segment_field(Vec2 a, Vec2 b, KernelPoint obs);

/// Free-space kernels minus the kernels of the mirror image across y = 0.
double grounded_potential(Vec2 a, Vec2 b, KernelPoint obs);
Vec2 grounded_field(Vec2 a, Vec2 b, KernelPoint obs);

inline double segment_potential(const Element& e, KernelPoint obs) { return segment_potential(e.a, e.b, obs); }
inline Vec2 segment_field(const Element& e, KernelPoint obs) { return segment_field(e.a, e.b, obs); }
inline double grounded_potential(const Element& e, KernelPoint obs) { return grounded_potential(e.a, e.b, obs); }
inline Vec2 grounded_field(const Element& e, KernelPoint obs) { return grounded_field(e.a, e.b, obs); }

} // namespace qcap
