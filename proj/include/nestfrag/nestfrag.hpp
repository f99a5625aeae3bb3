#pragma once

#include "nestfrag/error.hpp"
#include "nestfrag/events.hpp"
#include "nestfrag/mass_partition.hpp"
#include "nestfrag/paintbox.hpp"
#include "nestfrag/partition.hpp"
#include "nestfrag/rates.hpp"
#include "nestfrag/rng.hpp"
#include "nestfrag/simulator.hpp"
#include "nestfrag/verify.hpp"
