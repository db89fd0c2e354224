// SPDX-License-Identifier: Apache-2.0
//
// Convenience umbrella: the whole library.

#pragma once

#include "sgns/certify.hpp"
#include "sgns/config.hpp"
#include "sgns/convection.hpp"
#include "sgns/ensemble.hpp"
#include "sgns/estimators.hpp"
#include "sgns/grid.hpp"
#include "sgns/inequalities.hpp"
#include "sgns/integrator.hpp"
#include "sgns/kirchhoff.hpp"
#include "sgns/report.hpp"
#include "sgns/rng.hpp"
#include "sgns/snapshot.hpp"
#include "sgns/spectral_field.hpp"
#include "sgns/transport_noise.hpp"
#include "sgns/truncation.hpp"
#include "sgns/version.hpp"
#include "sgns/wavevector.hpp"
