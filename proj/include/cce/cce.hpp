#pragma once

#include "errors.hpp"
#include "dual.hpp"
#include "tps.hpp"
#include "systems.hpp"
#include "expansions.hpp"
#include "profile.hpp"
#include "solver.hpp"
#include "geometry.hpp"
#include "continuation.hpp"
#include "verification.hpp"
#include "io.hpp"
