#pragma once

#include "p4bft/assets.hpp"
#include "p4bft/control.hpp"
#include "p4bft/error.hpp"
#include "p4bft/json_io.hpp"
#include "p4bft/optimizer.hpp"
#include "p4bft/packet.hpp"
#include "p4bft/pipeline.hpp"
#include "p4bft/random.hpp"
#include "p4bft/register_bank.hpp"
#include "p4bft/sim.hpp"
#include "p4bft/sweep.hpp"
#include "p4bft/topology.hpp"
