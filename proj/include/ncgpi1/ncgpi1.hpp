#pragma once

#include "ncgpi1/algebra.hpp"
#include "ncgpi1/axioms.hpp"
#include "ncgpi1/builders.hpp"
#include "ncgpi1/center.hpp"
#include "ncgpi1/char_poly.hpp"
#include "ncgpi1/connection.hpp"
#include "ncgpi1/dm_check.hpp"
#include "ncgpi1/errors.hpp"
#include "ncgpi1/intmat.hpp"
#include "ncgpi1/io.hpp"
#include "ncgpi1/linsolve.hpp"
#include "ncgpi1/matrix.hpp"
#include "ncgpi1/phase.hpp"
#include "ncgpi1/pseudoinverse.hpp"
#include "ncgpi1/rational.hpp"
#include "ncgpi1/report.hpp"
#include "ncgpi1/rng.hpp"
#include "ncgpi1/scalar.hpp"
#include "ncgpi1/torus.hpp"
#include "ncgpi1/transport.hpp"
#include "ncgpi1/version.hpp"
