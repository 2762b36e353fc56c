#pragma once

// Umbrella header.

#include "sensauth/evaluate.hpp"
#include "sensauth/feature_functions.hpp"
#include "sensauth/features.hpp"
#include "sensauth/forest.hpp"
#include "sensauth/fusion.hpp"
#include "sensauth/grid.hpp"
#include "sensauth/ingest.hpp"
#include "sensauth/kfold.hpp"
#include "sensauth/logreg.hpp"
#include "sensauth/metrics.hpp"
#include "sensauth/model.hpp"
#include "sensauth/mutual_info.hpp"
#include "sensauth/production.hpp"
#include "sensauth/report_io.hpp"
#include "sensauth/segment.hpp"
#include "sensauth/svm.hpp"
#include "sensauth/synth.hpp"
#include "sensauth/version.hpp"

namespace sensauth {}
