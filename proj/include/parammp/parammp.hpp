#pragma once

#include "parammp/config_space.hpp"
#include "parammp/deformation.hpp"
#include "parammp/error.hpp"
#include "parammp/io.hpp"
#include "parammp/path.hpp"
#include "parammp/planner.hpp"
#include "parammp/vec.hpp"
#include "parammp/verification.hpp"
