#pragma once

#include "shm/aggregation.hpp"
#include "shm/baseline_ttc.hpp"
#include "shm/core_model.hpp"
#include "shm/hazard_measure.hpp"
#include "shm/ingest_io.hpp"
#include "shm/kinematics.hpp"
#include "shm/pipeline.hpp"
#include "shm/scenario_gen.hpp"
#include "shm/svg_plot.hpp"
