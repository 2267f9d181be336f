#pragma once

#include "pathlaw/errors.hpp"
#include "pathlaw/exp_functional.hpp"
#include "pathlaw/identities.hpp"
#include "pathlaw/lawtest.hpp"
#include "pathlaw/log_math.hpp"
#include "pathlaw/parallel.hpp"
#include "pathlaw/path_io.hpp"
#include "pathlaw/pl_path.hpp"
#include "pathlaw/quadrature.hpp"
#include "pathlaw/random.hpp"
#include "pathlaw/report.hpp"
#include "pathlaw/run.hpp"
#include "pathlaw/sampler.hpp"
#include "pathlaw/transforms.hpp"
