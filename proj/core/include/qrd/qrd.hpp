#pragma once

#include "qrd/channels.hpp"
#include "qrd/classical.hpp"
#include "qrd/divergences.hpp"
#include "qrd/errors.hpp"
#include "qrd/extended_real.hpp"
#include "qrd/families.hpp"
#include "qrd/io.hpp"
#include "qrd/measured.hpp"
#include "qrd/opcore.hpp"
#include "qrd/reversetests.hpp"
#include "qrd/sampling.hpp"
#include "qrd/zlimits.hpp"
