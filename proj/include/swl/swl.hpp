#pragma once

#include "swl/box_sums.hpp"
#include "swl/config.hpp"
#include "swl/construct.hpp"
#include "swl/czd.hpp"
#include "swl/error.hpp"
#include "swl/gfd.hpp"
#include "swl/grid.hpp"
#include "swl/json_io.hpp"
#include "swl/maximal.hpp"
#include "swl/parallel.hpp"
#include "swl/potential.hpp"
#include "swl/random.hpp"
#include "swl/report.hpp"
#include "swl/suites.hpp"
#include "swl/verify.hpp"
#include "swl/weights.hpp"
