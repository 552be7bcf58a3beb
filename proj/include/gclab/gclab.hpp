#pragma once

// Gyrocompassing workbench: synthesize disturbed stationary gyro windows,
// recover heading by closed-form gyrocompassing, and benchmark classical
// denoisers against a small trainable heading regressor.

#include "gclab/analysis.hpp"
#include "gclab/angles.hpp"
#include "gclab/augment.hpp"
#include "gclab/config.hpp"
#include "gclab/dynamics.hpp"
#include "gclab/errors.hpp"
#include "gclab/filters.hpp"
#include "gclab/frames.hpp"
#include "gclab/gyro.hpp"
#include "gclab/io.hpp"
#include "gclab/learner.hpp"
#include "gclab/rng.hpp"
#include "gclab/series.hpp"
#include "gclab/util.hpp"
