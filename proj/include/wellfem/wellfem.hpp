#pragma once

#include "wellfem/coupling.hpp"
#include "wellfem/errors.hpp"
#include "wellfem/experiment.hpp"
#include "wellfem/fem.hpp"
#include "wellfem/geometry.hpp"
#include "wellfem/peaceman.hpp"
#include "wellfem/postprocess.hpp"
#include "wellfem/quadrature.hpp"
#include "wellfem/singular.hpp"
#include "wellfem/solver.hpp"
#include "wellfem/sparse.hpp"
#include "wellfem/testcases.hpp"
