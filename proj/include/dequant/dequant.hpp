#pragma once

#include "dequant/alias_table.hpp"
#include "dequant/eigensolve.hpp"
#include "dequant/errors.hpp"
#include "dequant/generators.hpp"
#include "dequant/hamiltonian.hpp"
#include "dequant/hamiltonian_io.hpp"
#include "dequant/imm.hpp"
#include "dequant/inner_product.hpp"
#include "dequant/oracle.hpp"
#include "dequant/parallel.hpp"
#include "dequant/polyfilter.hpp"
#include "dequant/report.hpp"
#include "dequant/rng.hpp"
#include "dequant/state.hpp"
#include "dequant/transform.hpp"
