#pragma once

#include "nvthermo/constants.hpp"
#include "nvthermo/errors.hpp"
#include "nvthermo/spectrum.hpp"
#include "nvthermo/version.hpp"

#include "nvthermo/spin/spin_model.hpp"

#include "nvthermo/thermo/dwf.hpp"
#include "nvthermo/thermo/expansion.hpp"
#include "nvthermo/thermo/phonon.hpp"
#include "nvthermo/thermo/shift.hpp"
#include "nvthermo/thermo/strain.hpp"

#include "nvthermo/fit/calibration.hpp"
#include "nvthermo/fit/least_squares.hpp"
#include "nvthermo/fit/models.hpp"
#include "nvthermo/fit/odmr.hpp"
#include "nvthermo/fit/zpl.hpp"

#include "nvthermo/noise/noise_floor.hpp"
#include "nvthermo/noise/normality.hpp"
#include "nvthermo/noise/rng.hpp"
#include "nvthermo/noise/synthetic.hpp"
#include "nvthermo/noise/timeseries.hpp"
