// entverdict.hpp -- umbrella header.

#pragma once

#include "entverdict/analyze.hpp"
#include "entverdict/entanglement.hpp"
#include "entverdict/errors.hpp"
#include "entverdict/io.hpp"
#include "entverdict/linalg.hpp"
#include "entverdict/rng.hpp"
#include "entverdict/simulate.hpp"
#include "entverdict/states.hpp"
#include "entverdict/tomography.hpp"
