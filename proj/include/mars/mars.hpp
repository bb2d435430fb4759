#pragma once

#include "mars/algorithms.hpp"
#include "mars/benchmarks.hpp"
#include "mars/core_model.hpp"
#include "mars/oracle.hpp"
#include "mars/qset.hpp"
#include "mars/render.hpp"
#include "mars/report.hpp"
#include "mars/spec_io.hpp"
