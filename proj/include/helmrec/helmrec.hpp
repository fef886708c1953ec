#pragma once

#include "helmrec/bessel.hpp"
#include "helmrec/errors.hpp"
#include "helmrec/fem.hpp"
#include "helmrec/forward.hpp"
#include "helmrec/geometry.hpp"
#include "helmrec/io.hpp"
#include "helmrec/linalg.hpp"
#include "helmrec/monotonicity.hpp"
#include "helmrec/pipeline.hpp"
#include "helmrec/reconstruct.hpp"
#include "helmrec/rng.hpp"
#include "helmrec/sparse.hpp"
