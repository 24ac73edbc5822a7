#pragma once

#include "hqmm/errors.hpp"
#include "hqmm/experiment.hpp"
#include "hqmm/io.hpp"
#include "hqmm/linalg.hpp"
#include "hqmm/models.hpp"
#include "hqmm/rng.hpp"
#include "hqmm/sampler.hpp"
#include "hqmm/stationary.hpp"
#include "hqmm/trajectory.hpp"
#include "hqmm/version.hpp"
#include "hqmm/wordprob.hpp"
