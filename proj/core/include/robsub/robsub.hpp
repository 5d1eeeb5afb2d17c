#pragma once

#include "robsub/cluster.hpp"
#include "robsub/csv.hpp"
#include "robsub/error.hpp"
#include "robsub/linalg.hpp"
#include "robsub/lowrank.hpp"
#include "robsub/matcore.hpp"
#include "robsub/meanest.hpp"
#include "robsub/opnorms.hpp"
#include "robsub/poisoning.hpp"
#include "robsub/sdpsolve.hpp"
#include "robsub/spiked.hpp"
#include "robsub/version.hpp"
