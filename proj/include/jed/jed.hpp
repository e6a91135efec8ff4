#pragma once

#include "jed/analysis.hpp"
#include "jed/core.hpp"
#include "jed/decompose.hpp"
#include "jed/enhance.hpp"
#include "jed/gradient.hpp"
#include "jed/image_io.hpp"
#include "jed/params.hpp"
#include "jed/solver.hpp"
