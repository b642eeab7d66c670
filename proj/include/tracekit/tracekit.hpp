#pragma once

#include "tracekit/analysis.hpp"
#include "tracekit/csv.hpp"
#include "tracekit/errors.hpp"
#include "tracekit/filters.hpp"
#include "tracekit/geo.hpp"
#include "tracekit/net.hpp"
#include "tracekit/nmea.hpp"
#include "tracekit/replay.hpp"
#include "tracekit/report.hpp"
#include "tracekit/text.hpp"
#include "tracekit/trace.hpp"
#include "tracekit/track.hpp"
