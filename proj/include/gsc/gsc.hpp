#pragma once

#include <gsc/analyzer.hpp>
#include <gsc/config.hpp>
#include <gsc/degrade.hpp>
#include <gsc/dictionary.hpp>
#include <gsc/error.hpp>
#include <gsc/grouping.hpp>
#include <gsc/image.hpp>
#include <gsc/io.hpp>
#include <gsc/lowrank.hpp>
#include <gsc/pgm.hpp>
#include <gsc/restorer.hpp>
#include <gsc/rng.hpp>
