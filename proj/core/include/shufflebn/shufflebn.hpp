#pragma once

#include "shufflebn/batch_stats.hpp"
#include "shufflebn/dataset.hpp"
#include "shufflebn/deep_model.hpp"
#include "shufflebn/error.hpp"
#include "shufflebn/io.hpp"
#include "shufflebn/linalg.hpp"
#include "shufflebn/model.hpp"
#include "shufflebn/optima.hpp"
#include "shufflebn/random.hpp"
#include "shufflebn/risks.hpp"
#include "shufflebn/robustness.hpp"
#include "shufflebn/separability.hpp"
#include "shufflebn/simplex.hpp"
#include "shufflebn/toygen.hpp"
#include "shufflebn/trainers.hpp"
