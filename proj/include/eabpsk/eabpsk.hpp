#pragma once

// Umbrella header for the numerical library (the CLI headers live in cli/).

#include "eabpsk/errors.hpp"
#include "eabpsk/special_functions.hpp"
#include "eabpsk/photostats.hpp"
#include "eabpsk/receivers.hpp"
#include "eabpsk/parallel.hpp"
#include "eabpsk/detection.hpp"
#include "eabpsk/capacity.hpp"
