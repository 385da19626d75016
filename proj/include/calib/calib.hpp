#pragma once

#include "exterior.hpp"
#include "kform.hpp"
#include "linalg.hpp"
#include "multi_index.hpp"
#include "orbit.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "slag.hpp"
#include "structures.hpp"
#include "subspace.hpp"
#include "torus.hpp"
