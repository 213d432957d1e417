#pragma once

#include "veertrack/error.hpp"
#include "veertrack/scalar.hpp"
#include "veertrack/period.hpp"
#include "veertrack/triangulation.hpp"
#include "veertrack/surface.hpp"
#include "veertrack/io.hpp"
#include "veertrack/delaunay.hpp"
#include "veertrack/linalg.hpp"
#include "veertrack/lp.hpp"
#include "veertrack/dd.hpp"
#include "veertrack/traintrack.hpp"
#include "veertrack/isomorphism.hpp"
#include "veertrack/flow.hpp"
#include "veertrack/cones.hpp"
#include "veertrack/lab.hpp"
#include "veertrack/fixtures.hpp"
