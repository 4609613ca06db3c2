#pragma once

#include "indexlab/correlation.hpp"
#include "indexlab/dataset.hpp"
#include "indexlab/descriptive.hpp"
#include "indexlab/distributions.hpp"
#include "indexlab/error.hpp"
#include "indexlab/index_engine.hpp"
#include "indexlab/linalg.hpp"
#include "indexlab/pca.hpp"
#include "indexlab/regression.hpp"
#include "indexlab/report.hpp"
