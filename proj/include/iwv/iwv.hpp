#pragma once

#include "iwv/constants.hpp"
#include "iwv/csv.hpp"
#include "iwv/errors.hpp"
#include "iwv/fft.hpp"
#include "iwv/optics.hpp"
#include "iwv/photon_montecarlo.hpp"
#include "iwv/rng.hpp"
#include "iwv/signal_chain.hpp"
#include "iwv/spectral.hpp"
#include "iwv/weak_measurement.hpp"
