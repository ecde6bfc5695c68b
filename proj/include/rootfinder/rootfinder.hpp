#pragma once

#include "rootfinder/canonical.hpp"
#include "rootfinder/error.hpp"
#include "rootfinder/estimators.hpp"
#include "rootfinder/experiments.hpp"
#include "rootfinder/generators.hpp"
#include "rootfinder/oracle.hpp"
#include "rootfinder/rng.hpp"
#include "rootfinder/tree.hpp"
#include "rootfinder/tree_io.hpp"
#include "rootfinder/verify.hpp"
