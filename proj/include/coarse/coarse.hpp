#pragma once

#include "ball.hpp"
#include "circles.hpp"
#include "classify.hpp"
#include "cross_examiner.hpp"
#include "errors.hpp"
#include "families.hpp"
#include "growth.hpp"
#include "hyperbolicity.hpp"
#include "metric.hpp"
#include "oracle.hpp"
#include "rational.hpp"
#include "report.hpp"
#include "separation.hpp"
#include "tiling.hpp"
#include "vertex_key.hpp"
