#pragma once

#include "gcl/common.hpp"
#include "gcl/config.hpp"
#include "gcl/controller.hpp"
#include "gcl/dataset.hpp"
#include "gcl/evaluation.hpp"
#include "gcl/features.hpp"
#include "gcl/learning.hpp"
#include "gcl/model.hpp"
#include "gcl/net.hpp"
#include "gcl/parallel.hpp"
#include "gcl/plant.hpp"
#include "gcl/presets.hpp"
#include "gcl/robot.hpp"
#include "gcl/robot_io.hpp"
#include "gcl/rng.hpp"
#include "gcl/teacher.hpp"
#include "gcl/textio.hpp"
