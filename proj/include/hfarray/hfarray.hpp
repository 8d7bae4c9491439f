#pragma once

#include "hfarray/array.hpp"
#include "hfarray/error.hpp"
#include "hfarray/experiments.hpp"
#include "hfarray/oracle.hpp"
#include "hfarray/time.hpp"
#include "hfarray/twochannel.hpp"
#include "hfarray/version.hpp"
