#pragma once

#include "rtoda/error.hpp"
#include "rtoda/parallel.hpp"
#include "rtoda/algebra.hpp"
#include "rtoda/lattice.hpp"
#include "rtoda/gauge.hpp"
#include "rtoda/wavefun.hpp"
#include "rtoda/bethe.hpp"
