#ifndef POLYSPEC_POLYSPEC_HPP
#define POLYSPEC_POLYSPEC_HPP

#include "constants.hpp"
#include "deriv.hpp"
#include "dissect.hpp"
#include "femeig.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "triangle.hpp"
#include "verify.hpp"

namespace polyspec {
inline constexpr const char *version = "0.1.0";
}

#endif // POLYSPEC_POLYSPEC_HPP
