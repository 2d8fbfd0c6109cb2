#pragma once

#include "adaprune/archive.hpp"
#include "adaprune/dataset.hpp"
#include "adaprune/errors.hpp"
#include "adaprune/hessian.hpp"
#include "adaprune/linalg.hpp"
#include "adaprune/matrix.hpp"
#include "adaprune/model.hpp"
#include "adaprune/obs_pruner.hpp"
#include "adaprune/pipeline.hpp"
#include "adaprune/report.hpp"
#include "adaprune/robustness.hpp"
#include "adaprune/soup.hpp"
#include "adaprune/train.hpp"
