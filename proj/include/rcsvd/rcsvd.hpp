#pragma once

// Umbrella header: the whole library.

#include "rcsvd/error.hpp"
#include "rcsvd/matrix.hpp"
#include "rcsvd/qr.hpp"
#include "rcsvd/random.hpp"
#include "rcsvd/ldr.hpp"
#include "rcsvd/svd.hpp"
#include "rcsvd/decomp.hpp"
#include "rcsvd/analysis.hpp"
#include "rcsvd/synth.hpp"
#include "rcsvd/io/atomic_file.hpp"
#include "rcsvd/io/matrix_market.hpp"
#include "rcsvd/io/pgm.hpp"
#include "rcsvd/app/bench.hpp"
#include "rcsvd/app/compress.hpp"
