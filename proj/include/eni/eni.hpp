#pragma once

#include "eni/boolean.hpp"
#include "eni/errors.hpp"
#include "eni/geometry.hpp"
#include "eni/io.hpp"
#include "eni/metric.hpp"
#include "eni/parallel.hpp"
#include "eni/sampling.hpp"
#include "eni/simulator.hpp"
#include "eni/trace.hpp"
#include "eni/triangulation.hpp"
#include "eni/visibility.hpp"
