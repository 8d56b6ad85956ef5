#pragma once

// Umbrella header for the whole toolkit.

#include "ubi/accel_bands.hpp"
#include "ubi/calendar.hpp"
#include "ubi/csv.hpp"
#include "ubi/digest.hpp"
#include "ubi/error.hpp"
#include "ubi/eval.hpp"
#include "ubi/features.hpp"
#include "ubi/glm.hpp"
#include "ubi/ingest.hpp"
#include "ubi/labeling.hpp"
#include "ubi/model_io.hpp"
#include "ubi/synth_params.hpp"
#include "ubi/synthgen.hpp"
#include "ubi/time.hpp"
#include "ubi/trips.hpp"
#include "ubi/version.hpp"
