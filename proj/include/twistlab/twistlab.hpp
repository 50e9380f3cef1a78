#pragma once

#include "twistlab/error.hpp"
#include "twistlab/vector.hpp"
#include "twistlab/spaces.hpp"
#include "twistlab/qmap.hpp"
#include "twistlab/sampling.hpp"
#include "twistlab/estimate.hpp"
#include "twistlab/catalog.hpp"
#include "twistlab/inverse.hpp"
#include "twistlab/duality.hpp"
#include "twistlab/suite.hpp"
