#ifndef QOC_QOC_HPP
#define QOC_QOC_HPP

#include "qoc/common.hpp"
#include "qoc/config.hpp"
#include "qoc/controllability.hpp"
#include "qoc/fft.hpp"
#include "qoc/field.hpp"
#include "qoc/filters.hpp"
#include "qoc/grid.hpp"
#include "qoc/grid_system.hpp"
#include "qoc/io.hpp"
#include "qoc/level_system.hpp"
#include "qoc/optimizer.hpp"
#include "qoc/propagator.hpp"
#include "qoc/targets.hpp"
#include "qoc/time_grid.hpp"
#include "qoc/twolevel.hpp"

#endif
