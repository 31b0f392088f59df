#pragma once

#include "hac/baselines.hpp"
#include "hac/config.hpp"
#include "hac/datagen.hpp"
#include "hac/error.hpp"
#include "hac/io.hpp"
#include "hac/metric.hpp"
#include "hac/oracle.hpp"
#include "hac/output.hpp"
#include "hac/point.hpp"
#include "hac/postprocess.hpp"
#include "hac/sketch.hpp"
#include "hac/tracker.hpp"
