#pragma once

#include "dcb/channelization.hpp"
#include "dcb/ctmc.hpp"
#include "dcb/error.hpp"
#include "dcb/io.hpp"
#include "dcb/mac_phy.hpp"
#include "dcb/optimizer.hpp"
#include "dcb/parallel.hpp"
#include "dcb/rng.hpp"
#include "dcb/se_catalog.hpp"
#include "dcb/simulator.hpp"
#include "dcb/sweep.hpp"
