#pragma once

#include "cvegauss/analysis.hpp"
#include "cvegauss/calibration.hpp"
#include "cvegauss/error.hpp"
#include "cvegauss/fading.hpp"
#include "cvegauss/fft.hpp"
#include "cvegauss/generators.hpp"
#include "cvegauss/io.hpp"
#include "cvegauss/parallel.hpp"
#include "cvegauss/random.hpp"
#include "cvegauss/signal.hpp"
#include "cvegauss/stats.hpp"
#include "cvegauss/surrogates.hpp"
