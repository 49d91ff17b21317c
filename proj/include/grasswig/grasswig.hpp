#pragma once

#include "grasswig/errors.hpp"
#include "grasswig/grassmann.hpp"
#include "grasswig/pauli.hpp"
#include "grasswig/oracle.hpp"
#include "grasswig/weyl.hpp"
#include "grasswig/dynamics.hpp"
#include "grasswig/twogen.hpp"
#include "grasswig/phasespace.hpp"
#include "grasswig/measurement.hpp"
#include "grasswig/cli.hpp"
