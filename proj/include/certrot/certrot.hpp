#pragma once

// Umbrella header: pulls in the full certified rotation-search toolkit.

#include "certrot/baselines.hpp"
#include "certrot/certify.hpp"
#include "certrot/chi2.hpp"
#include "certrot/io.hpp"
#include "certrot/pipeline.hpp"
#include "certrot/problem.hpp"
#include "certrot/quaternion.hpp"
#include "certrot/relaxation.hpp"
#include "certrot/rng.hpp"
#include "certrot/sdp_solver.hpp"
#include "certrot/sdpa.hpp"
#include "certrot/sweep.hpp"
#include "certrot/synthetic.hpp"
