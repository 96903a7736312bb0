#ifndef QLAT_QLAT_HPP
#define QLAT_QLAT_HPP

#include "core.hpp"
#include "matrix.hpp"
#include "arith.hpp"
#include "lattice.hpp"
#include "lifting.hpp"
#include "local.hpp"
#include "isometry.hpp"
#include "gram_io.hpp"
#include "genus.hpp"
#include "represent.hpp"
#include "linnik.hpp"
#include "harness.hpp"

#endif
