#pragma once

// Outside-view due diligence for project forecasts: reference-class
// ingestion, benchmark distributions, claim-vs-benchmark comparisons, and
// the eight-step report.

#include "outsideview/csv.hpp"
#include "outsideview/diligence.hpp"
#include "outsideview/empirics.hpp"
#include "outsideview/errors.hpp"
#include "outsideview/forecast.hpp"
#include "outsideview/normal.hpp"
#include "outsideview/refclass.hpp"
#include "outsideview/report.hpp"
#include "outsideview/stats.hpp"
