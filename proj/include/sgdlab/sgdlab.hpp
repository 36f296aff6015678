#pragma once

#include "sgdlab/bounds.hpp"
#include "sgdlab/census.hpp"
#include "sgdlab/core.hpp"
#include "sgdlab/dataset.hpp"
#include "sgdlab/experiment.hpp"
#include "sgdlab/gd.hpp"
#include "sgdlab/lbfgs.hpp"
#include "sgdlab/libsvm.hpp"
#include "sgdlab/logistic.hpp"
#include "sgdlab/objective.hpp"
#include "sgdlab/quartic.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/rt.hpp"
#include "sgdlab/sgd.hpp"
#include "sgdlab/svrg.hpp"
#include "sgdlab/synthetic.hpp"
#include "sgdlab/trace.hpp"
#include "sgdlab/variance.hpp"
